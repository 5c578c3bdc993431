#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hyperprover/calculus.hpp"
#include "support.hpp"

using namespace hyperprover;
namespace ht = hyperprover::testing;

namespace {

bool same_schema(const RuleSchema& a, const RuleSchema& b) {
    if (a.forms.size() != b.forms.size()) return false;
    for (std::size_t i = 0; i < a.forms.size(); i++) {
        if (a.forms[i].premises.size() != b.forms[i].premises.size()) return false;
        if (a.forms[i].conclusion.text() != b.forms[i].conclusion.text()) return false;
        for (std::size_t j = 0; j < a.forms[i].premises.size(); j++)
            if (a.forms[i].premises[j].text() != b.forms[i].premises[j].text()) return false;
    }
    return true;
}

bool same_instance(const RuleInstance& a, const RuleInstance& b) {
    if (!(a.conclusion == b.conclusion)) return false;
    std::vector<Hypersequent> pa = a.premises, pb = b.premises;
    std::sort(pa.begin(), pa.end());
    std::sort(pb.begin(), pb.end());
    return pa == pb;
}

}  // namespace

TEST_CASE("builtin presets") {
    CHECK(builtin_calculus("HFLe").size() == 17);
    CHECK(builtin_calculus("fle").size() == 17);
    CHECK(builtin_calculus("HFLelw").contains("lw"));
    CHECK(builtin_calculus("HFLew").contains("rw"));
    CHECK(builtin_calculus("HFLec").contains("c"));
    Calculus mtl = builtin_calculus("mtl");
    CHECK(mtl.contains("lw"));
    CHECK(mtl.contains("rw"));
    CHECK(mtl.contains("com"));
    CHECK(mtl.size() == 20);
    CHECK_THROWS_AS(builtin_calculus("nonsense"), std::invalid_argument);
    CHECK_THROWS_AS(builtin_rule("bwk", {0}), std::invalid_argument);
}

TEST_CASE("knot(2,1) is the mingle shape") {
    RuleSchema knot = builtin_rule("knot", {2, 1});
    RuleSchema mingle = builtin_rule("mingle");
    REQUIRE(knot.forms.size() == 1);
    CHECK(knot.forms[0].premises.size() == 2);
    CHECK(mingle.forms[0].premises.size() == 2);
    // same component structure: premises Y,X_i => P; conclusion Y,X1,X2 => P
    CHECK(knot.forms[0].conclusion.comps.size() == 1);
    CHECK(knot.forms[0].conclusion.comps[0].mset_vars.size() == 3);
    // knot(n,m) premise count is the number of size-m multisets over {1..n}
    CHECK(builtin_rule("knot", {3, 2}).forms[0].premises.size() == 6);
    CHECK(builtin_rule("knot", {2, 0}).forms[0].premises.size() == 1);
    // (c) is the knot(1,2) shape
    CHECK(builtin_rule("knot", {1, 2}).forms[0].premises[0].comps[0].mset_vars.size() == 3);
}

TEST_CASE("Bw/Bc premise families") {
    CHECK(builtin_rule("bwk", {1}).forms[0].premises.size() == 2);
    CHECK(builtin_rule("bwk", {2}).forms[0].premises.size() == 6);
    CHECK(builtin_rule("bck", {2}).forms[0].premises.size() == 3);
    CHECK(builtin_rule("bck", {3}).forms[0].premises.size() == 6);
}

TEST_CASE("validation of the built-ins") {
    for (const char* name : {"c", "lw", "rw", "com", "wem", "mingle"}) {
        ValidationReport report = validate_schema(builtin_rule(name));
        CHECK(report.linear_conclusion);
        CHECK(report.subvariable);
        CHECK(report.structural);
    }
    for (auto&& r : {builtin_rule("bwk", {2}), builtin_rule("bck", {2}),
                     builtin_rule("knot", {2, 1}), builtin_rule("knot", {2, 3})}) {
        ValidationReport report = validate_schema(r);
        CHECK(report.all());
    }
    // Fig. 1 logical schemas carry exactly one H in every premise and the
    // conclusion.
    Calculus fle = builtin_calculus("fle");
    for (const RuleSchema& r : fle.schemas())
        for (const RuleForm& form : r.forms) {
            CHECK(form.conclusion.has_hvar);
            for (const auto& p : form.premises) CHECK(p.has_hvar);
        }
}

TEST_CASE("validation flags broken schemas") {
    // conclusion repeats Y1: not linear
    RuleSchema bad1;
    bad1.name = "bad1";
    bad1.kind = RuleKind::Logical;  // bypass the fatal structural check
    SchematicComponent c1;
    c1.mset_vars = {"Y1"};
    SchematicHypersequent concl;
    concl.has_hvar = true;
    concl.comps = {c1, c1};
    SchematicHypersequent prem;
    prem.has_hvar = true;
    prem.comps = {c1};
    bad1.forms.push_back({{prem}, concl});
    ValidationReport r1 = validate_schema(bad1);
    CHECK_FALSE(r1.linear_conclusion);
    CHECK(r1.subvariable);
    CHECK(std::find(r1.offending.begin(), r1.offending.end(), "Y1") != r1.offending.end());

    // premise-only variable Z: subvariable property fails
    RuleSchema bad2;
    bad2.name = "bad2";
    bad2.kind = RuleKind::Logical;
    SchematicComponent cz;
    cz.mset_vars = {"Z"};
    SchematicHypersequent prem2;
    prem2.has_hvar = true;
    prem2.comps = {cz};
    SchematicHypersequent concl2;
    concl2.has_hvar = true;
    concl2.comps = {SchematicComponent{}};
    bad2.forms.push_back({{prem2}, concl2});
    ValidationReport r2 = validate_schema(bad2);
    CHECK(r2.linear_conclusion);
    CHECK_FALSE(r2.subvariable);

    // adding a broken structural schema to a calculus is fatal
    bad1.kind = RuleKind::Structural;
    CHECK_THROWS_AS(Calculus{}.add(bad1), std::invalid_argument);
}

TEST_CASE("rule DSL round-trips the built-ins") {
    RuleSchema com = parse_rule_dsl(
        "rule com\n"
        "premise: H | Y1, X1 => P1\n"
        "premise: H | Y2, X2 => P2\n"
        "conclusion: H | Y1, X2 => P1 | Y2, X1 => P2\n");
    CHECK(same_schema(com, builtin_rule("com")));
    CHECK(com.kind == RuleKind::Structural);

    RuleSchema wem = parse_rule_dsl(
        "rule wem\n"
        "premise: H | Z1, Z2 =>\n"
        "conclusion: H | Z1 => | Z2 =>\n");
    CHECK(same_schema(wem, builtin_rule("wem")));

    CHECK_THROWS_AS(parse_rule_dsl("rule broken\npremise H | X =>\n"), std::invalid_argument);
    // non-structural content is rejected outright
    CHECK_THROWS_AS(parse_rule_dsl("rule f\npremise: H | A => P1\nconclusion: H | A => P1\n"),
                    std::invalid_argument);
    // subvariable violation is fatal
    CHECK_THROWS_AS(parse_rule_dsl("rule g\npremise: H | Z1 =>\nconclusion: H | =>\n"),
                    std::invalid_argument);
}

TEST_CASE("instantiation: the (andR) examples") {
    Calculus fle = builtin_calculus("fle");
    const RuleSchema* andR = fle.find("andR");
    REQUIRE(andR);

    Instantiation i1;
    i1.hyper = Hypersequent{};
    i1.msets["X"] = FormulaMultiset{};
    i1.fvars.insert_or_assign("A", Formula::var("p"));
    i1.fvars.insert_or_assign("B", Formula::var("q"));
    RuleInstance r1 = instantiate(*andR, i1);
    CHECK(r1.conclusion == parse_hypersequent("=> p /\\ q"));
    REQUIRE(r1.premises.size() == 2);
    CHECK(r1.premises[0] == parse_hypersequent("=> p"));
    CHECK(r1.premises[1] == parse_hypersequent("=> q"));

    Instantiation i3;
    i3.hyper = parse_hypersequent("=> s | q -> p => p");
    i3.msets["X"] = FormulaMultiset({Formula::var("r")});
    i3.fvars.insert_or_assign("A", parse_formula("p /\\ q"));
    i3.fvars.insert_or_assign("B", Formula::var("q"));
    RuleInstance r3 = instantiate(*andR, i3);
    CHECK(r3.conclusion == parse_hypersequent("=> s | q -> p => p | r => (p /\\ q) /\\ q"));
    CHECK(r3.premises[0] == parse_hypersequent("=> s | q -> p => p | r => p /\\ q"));
    CHECK(r3.premises[1] == parse_hypersequent("=> s | q -> p => p | r => q"));

    // missing binding
    Instantiation missing;
    missing.hyper = Hypersequent{};
    CHECK_THROWS_AS(instantiate(*andR, missing), std::invalid_argument);

    // (com) with all variables empty: premises (=>), (=>); conclusion (=> | =>)
    Instantiation empty;
    empty.hyper = Hypersequent{};
    for (const char* v : {"X1", "X2", "Y1", "Y2"}) empty.msets[v] = FormulaMultiset{};
    empty.succs["P1"] = std::nullopt;
    empty.succs["P2"] = std::nullopt;
    RuleInstance rc = instantiate(builtin_rule("com"), empty);
    CHECK(rc.conclusion == parse_hypersequent("=> | =>"));
    CHECK(rc.premises[0] == parse_hypersequent("=>"));
    CHECK(rc.premises[1] == parse_hypersequent("=>"));
}

TEST_CASE("match_conclusion examples") {
    Calculus fle = builtin_calculus("fle");
    OmegaSet omega = OmegaSet::closure_of(parse_formula("p /\\ q"));

    auto matches = match_conclusion(*fle.find("andR"), parse_hypersequent("=> p /\\ q"), omega);
    REQUIRE(matches.size() == 1);
    CHECK(matches[0].hyper == Hypersequent{});
    CHECK(matches[0].msets.at("X").empty());
    CHECK(matches[0].fvars.at("A") == Formula::var("p"));
    CHECK(matches[0].fvars.at("B") == Formula::var("q"));

    OmegaSet omega_or = OmegaSet::closure_of(parse_formula("p \\/ q"));
    CHECK(match_conclusion(*fle.find("andR"), parse_hypersequent("=> p \\/ q"), omega_or).empty());

    OmegaSet omega_p = OmegaSet::closure_of(Formula::var("p"));
    CHECK(match_conclusion(builtin_rule("com"), parse_hypersequent("p => p"), omega_p).empty());
}

TEST_CASE("match after instantiate recovers the instance") {
    ht::Rng rng(606);
    OmegaSet omega = OmegaSet::closure_of(parse_formula("(p -> q) \\/ (q -> p)"));
    Calculus calc = builtin_calculus("mtl");
    for (int round = 0; round < 400; round++) {
        const RuleSchema& r = calc.schemas()[ht::pick(rng, calc.size())];
        std::size_t fi = ht::pick(rng, r.forms.size());

        Instantiation inst;
        inst.form_index = fi;
        inst.hyper = ht::random_omega_hypersequent(rng, omega, 2, 1);
        std::vector<std::string> msets, svars, fvars;
        // gather the variables the schema needs
        for (const auto& sh : r.forms[fi].premises)
            for (const auto& c : sh.comps) {
                for (const auto& v : c.mset_vars) msets.push_back(v);
                if (c.succ_kind == SchematicComponent::Succ::Var) svars.push_back(c.succ_var);
                for (const auto& t : c.terms) t.collect_fvars(fvars);
                if (c.succ_kind == SchematicComponent::Succ::Term)
                    c.succ_term->collect_fvars(fvars);
            }
        for (const auto& c : r.forms[fi].conclusion.comps) {
            for (const auto& v : c.mset_vars) msets.push_back(v);
            if (c.succ_kind == SchematicComponent::Succ::Var) svars.push_back(c.succ_var);
            for (const auto& t : c.terms) t.collect_fvars(fvars);
            if (c.succ_kind == SchematicComponent::Succ::Term) c.succ_term->collect_fvars(fvars);
        }
        for (const std::string& v : msets) {
            FormulaMultiset m;
            std::size_t n = ht::pick(rng, 3);
            for (std::size_t i = 0; i < n; i++) m.add(omega.formula(ht::pick(rng, omega.size())));
            inst.msets.emplace(v, m);
        }
        for (const std::string& v : svars) {
            std::size_t s = ht::pick(rng, omega.size() + 1);
            inst.succs.emplace(v, s == 0 ? std::optional<Formula>{}
                                         : std::optional<Formula>{omega.formula(s - 1)});
        }
        bool fvars_in_omega = true;
        for (const std::string& v : fvars)
            inst.fvars.emplace(v, omega.formula(ht::pick(rng, omega.size())));
        if (!fvars_in_omega) continue;

        RuleInstance ri;
        try {
            ri = instantiate(r, inst);
        } catch (const std::invalid_argument&) {
            continue;  // incomplete random binding; not the property under test
        }

        bool recovered = false;
        for (const Instantiation& found : match_conclusion(r, ri.conclusion, omega)) {
            if (same_instance(instantiate(r, found), ri)) {
                recovered = true;
                break;
            }
        }
        CHECK(recovered);
    }
}

TEST_CASE("schema sizes under the counting convention") {
    // (lw): premise H | X => P (5 symbols), conclusion H | X, Y => P (7)
    CHECK(builtin_rule("lw").symbol_size() == 12);
    Calculus just_lw;
    just_lw.add(builtin_rule("lw"));
    CHECK(schema_size_max(just_lw) == 12);

    Calculus fle = builtin_calculus("fle");
    int base = schema_size_max(fle);
    for (const char* name : {"com", "wem", "mingle"})
        CHECK(schema_size_max(fle.with(builtin_rule(name))) >= base);
    // Bw3 towers over (com)
    CHECK(builtin_rule("bwk", {3}).symbol_size() > builtin_rule("com").symbol_size());
}

TEST_CASE("premise growth bound holds on random backward expansions") {
    Calculus mtl = builtin_calculus("mtl");
    ControlFunction bound = premise_growth_bound(mtl);
    OmegaSet omega = OmegaSet::closure_of(parse_formula("(p * q -> p) \\/ (q -> p -> q)"));
    ht::Rng rng(99991);
    for (int i = 0; i < 200; i++) {
        // sparse goals: a handful of antecedent occurrences per component
        std::vector<Sequent> comps;
        std::size_t n = 1 + ht::pick(rng, 2);
        for (std::size_t ci = 0; ci < n; ci++) {
            Sequent s;
            std::size_t ante = ht::pick(rng, 4);
            for (std::size_t j = 0; j < ante; j++)
                s.antecedent.add(omega.formula(ht::pick(rng, omega.size())));
            std::size_t succ = ht::pick(rng, omega.size() + 1);
            if (succ > 0) s.succedent = omega.formula(succ - 1);
            comps.push_back(std::move(s));
        }
        Hypersequent goal(std::move(comps));
        if (goal.empty()) continue;
        std::uint64_t limit = bound.apply(static_cast<std::uint64_t>(goal.symbol_size()));
        for (const RuleSchema& r : mtl.schemas())
            for (const AbsorbedMatch& m : match_conclusion_absorbed(r, goal, omega))
                for (const Hypersequent& p : m.premises)
                    CHECK(static_cast<std::uint64_t>(p.symbol_size()) <= limit);
    }
}
