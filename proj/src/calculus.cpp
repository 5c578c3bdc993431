#include "hyperprover/calculus.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace hyperprover {

// ── SchemaFormula ───────────────────────────────────────────────────────────

SchemaFormula SchemaFormula::fvar(std::string name) {
    SchemaFormula f;
    f.kind_ = FormulaKind::Var;
    f.name_ = std::move(name);
    return f;
}

SchemaFormula SchemaFormula::constant(FormulaKind k) {
    assert(k == FormulaKind::Top || k == FormulaKind::Bot || k == FormulaKind::One ||
           k == FormulaKind::Zero);
    SchemaFormula f;
    f.kind_ = k;
    return f;
}

SchemaFormula SchemaFormula::binary(FormulaKind k, SchemaFormula lhs, SchemaFormula rhs) {
    SchemaFormula f;
    f.kind_ = k;
    f.lhs_ = std::make_shared<SchemaFormula>(std::move(lhs));
    f.rhs_ = std::make_shared<SchemaFormula>(std::move(rhs));
    return f;
}

int SchemaFormula::symbol_count() const {
    if (!lhs_) return 1;
    return 1 + lhs_->symbol_count() + rhs_->symbol_count();
}

std::string SchemaFormula::text() const {
    if (is_fvar()) return name_;
    switch (kind_) {
        case FormulaKind::Top: return "top";
        case FormulaKind::Bot: return "bot";
        case FormulaKind::One: return "1";
        case FormulaKind::Zero: return "0";
        default: break;
    }
    const char* op = kind_ == FormulaKind::And    ? " /\\ "
                     : kind_ == FormulaKind::Or   ? " \\/ "
                     : kind_ == FormulaKind::Fuse ? " * "
                                                  : " -> ";
    auto wrap = [](const SchemaFormula& g) {
        return g.lhs_ ? "(" + g.text() + ")" : g.text();
    };
    return wrap(*lhs_) + op + wrap(*rhs_);
}

void SchemaFormula::collect_fvars(std::vector<std::string>& out) const {
    if (is_fvar()) {
        out.push_back(name_);
        return;
    }
    if (lhs_) {
        lhs_->collect_fvars(out);
        rhs_->collect_fvars(out);
    }
}

Formula SchemaFormula::instantiate(const std::map<std::string, Formula>& bindings) const {
    if (is_fvar()) {
        auto it = bindings.find(name_);
        if (it == bindings.end())
            throw std::invalid_argument("unbound formula-variable " + name_);
        return it->second;
    }
    switch (kind_) {
        case FormulaKind::Top: return Formula::top();
        case FormulaKind::Bot: return Formula::bot();
        case FormulaKind::One: return Formula::one();
        case FormulaKind::Zero: return Formula::zero();
        default:
            return Formula::make(kind_, lhs_->instantiate(bindings), rhs_->instantiate(bindings));
    }
}

bool SchemaFormula::unify(const Formula& f, std::map<std::string, Formula>& bindings) const {
    if (is_fvar()) {
        auto [it, inserted] = bindings.emplace(name_, f);
        return inserted || it->second == f;
    }
    if (f.kind() != kind_) return false;
    if (!lhs_) return true;  // matching constants
    return lhs_->unify(f.left(), bindings) && rhs_->unify(f.right(), bindings);
}

// ── Schematic hypersequents ─────────────────────────────────────────────────

int SchematicComponent::symbol_size() const {
    int items = static_cast<int>(mset_vars.size() + terms.size());
    int n = static_cast<int>(mset_vars.size());
    for (const SchemaFormula& t : terms) n += t.symbol_count();
    if (items > 1) n += items - 1;  // commas
    n += 1;                         // arrow
    if (succ_kind == Succ::Var) n += 1;
    if (succ_kind == Succ::Term) n += succ_term->symbol_count();
    return n;
}

std::string SchematicComponent::text() const {
    std::string out;
    bool first = true;
    for (const std::string& v : mset_vars) {
        if (!first) out += ", ";
        out += v;
        first = false;
    }
    for (const SchemaFormula& t : terms) {
        if (!first) out += ", ";
        out += t.text();
        first = false;
    }
    if (!first) out += " ";
    out += "=>";
    if (succ_kind == Succ::Var) out += " " + succ_var;
    if (succ_kind == Succ::Term) out += " " + succ_term->text();
    return out;
}

int SchematicHypersequent::symbol_size() const {
    int units = (has_hvar ? 1 : 0) + static_cast<int>(comps.size());
    int n = has_hvar ? 1 : 0;
    for (const SchematicComponent& c : comps) n += c.symbol_size();
    if (units > 1) n += units - 1;  // separators
    return n;
}

std::string SchematicHypersequent::text() const {
    std::string out;
    bool first = true;
    if (has_hvar) {
        out += "H";
        first = false;
    }
    for (const SchematicComponent& c : comps) {
        if (!first) out += " | ";
        out += c.text();
        first = false;
    }
    return out;
}

int RuleSchema::symbol_size() const {
    const RuleForm& form = forms.at(0);
    int n = form.conclusion.symbol_size();
    for (const SchematicHypersequent& p : form.premises) n += p.symbol_size();
    return n;
}

// ── Validation ──────────────────────────────────────────────────────────────

namespace {

struct VarOccurrences {
    std::map<std::string, int> msets;
    std::map<std::string, int> succs;
    std::map<std::string, int> fvars;
    int hvar = 0;

    void add(const SchematicHypersequent& sh) {
        if (sh.has_hvar) hvar++;
        for (const SchematicComponent& c : sh.comps) {
            for (const std::string& v : c.mset_vars) msets[v]++;
            for (const SchemaFormula& t : c.terms) {
                std::vector<std::string> fv;
                t.collect_fvars(fv);
                for (auto& v : fv) fvars[v]++;
            }
            if (c.succ_kind == SchematicComponent::Succ::Var) succs[c.succ_var]++;
            if (c.succ_kind == SchematicComponent::Succ::Term) {
                std::vector<std::string> fv;
                c.succ_term->collect_fvars(fv);
                for (auto& v : fv) fvars[v]++;
            }
        }
    }
};

bool component_is_structural(const SchematicComponent& c) {
    return c.terms.empty() && c.succ_kind != SchematicComponent::Succ::Term;
}

}  // namespace

ValidationReport validate_schema(const RuleSchema& r) {
    ValidationReport report;
    std::set<std::string> offenders;

    for (const RuleForm& form : r.forms) {
        VarOccurrences concl;
        concl.add(form.conclusion);
        VarOccurrences prem;
        for (const auto& p : form.premises) prem.add(p);

        auto check_linear = [&](const std::map<std::string, int>& occ) {
            for (const auto& [v, n] : occ)
                if (n > 1) {
                    report.linear_conclusion = false;
                    offenders.insert(v);
                }
        };
        check_linear(concl.msets);
        check_linear(concl.succs);
        check_linear(concl.fvars);
        if (concl.hvar > 1) report.linear_conclusion = false;

        auto check_sub = [&](const std::map<std::string, int>& in_prem,
                             const std::map<std::string, int>& in_concl) {
            for (const auto& [v, n] : in_prem)
                if (!in_concl.count(v)) {
                    report.subvariable = false;
                    offenders.insert(v);
                }
        };
        check_sub(prem.msets, concl.msets);
        check_sub(prem.succs, concl.succs);
        check_sub(prem.fvars, concl.fvars);
        if (prem.hvar > 0 && concl.hvar == 0) report.subvariable = false;

        auto structural_hs = [&](const SchematicHypersequent& sh) {
            for (const SchematicComponent& c : sh.comps)
                if (!component_is_structural(c)) {
                    report.structural = false;
                    for (const SchemaFormula& t : c.terms) {
                        std::vector<std::string> fv;
                        t.collect_fvars(fv);
                        offenders.insert(fv.begin(), fv.end());
                    }
                }
        };
        structural_hs(form.conclusion);
        for (const auto& p : form.premises) structural_hs(p);
    }

    report.offending.assign(offenders.begin(), offenders.end());
    return report;
}

// ── Instantiation ───────────────────────────────────────────────────────────

std::string Instantiation::digest() const {
    std::string out = "form=" + std::to_string(form_index) + ";H=[" + hyper.text() + "]";
    for (const auto& [v, m] : msets) {
        out += ";" + v + "={";
        const auto& occ = m.occurrences();
        for (std::size_t i = 0; i < occ.size(); i++) {
            if (i > 0) out += ",";
            out += occ[i].text();
        }
        out += "}";
    }
    for (const auto& [v, f] : succs) out += ";" + v + "=" + (f ? f->text() : "");
    for (const auto& [v, f] : fvars) out += ";" + v + "=" + f.text();
    return out;
}

namespace {

Hypersequent build_instance(const SchematicHypersequent& sh, const Instantiation& inst) {
    std::vector<Sequent> comps;
    if (sh.has_hvar)
        for (const Sequent& s : inst.hyper.components()) comps.push_back(s);
    for (const SchematicComponent& c : sh.comps) {
        Sequent s;
        for (const std::string& v : c.mset_vars) {
            auto it = inst.msets.find(v);
            if (it == inst.msets.end())
                throw std::invalid_argument("unbound multiset-variable " + v);
            s.antecedent = s.antecedent.sum(it->second);
        }
        for (const SchemaFormula& t : c.terms) s.antecedent.add(t.instantiate(inst.fvars));
        switch (c.succ_kind) {
            case SchematicComponent::Succ::Empty: break;
            case SchematicComponent::Succ::Var: {
                auto it = inst.succs.find(c.succ_var);
                if (it == inst.succs.end())
                    throw std::invalid_argument("unbound succedent-variable " + c.succ_var);
                s.succedent = it->second;
                break;
            }
            case SchematicComponent::Succ::Term:
                s.succedent = c.succ_term->instantiate(inst.fvars);
                break;
        }
        comps.push_back(std::move(s));
    }
    return Hypersequent(std::move(comps));
}

}  // namespace

RuleInstance instantiate(const RuleSchema& r, const Instantiation& inst) {
    const RuleForm& form = r.forms.at(inst.form_index);
    RuleInstance out;
    for (const SchematicHypersequent& p : form.premises)
        out.premises.push_back(build_instance(p, inst));
    out.conclusion = build_instance(form.conclusion, inst);
    return out;
}

// ── Calculus ────────────────────────────────────────────────────────────────

Calculus& Calculus::add(RuleSchema schema) {
    if (schema.kind == RuleKind::Structural) {
        ValidationReport report = validate_schema(schema);
        if (!report.all()) {
            std::string what = "structural schema '" + schema.name + "' fails validation:";
            for (const auto& v : report.offending) what += " " + v;
            throw std::invalid_argument(what);
        }
    }
    schemas_.push_back(std::move(schema));
    return *this;
}

Calculus Calculus::with(RuleSchema schema) const {
    Calculus out = *this;
    out.add(std::move(schema));
    return out;
}

const RuleSchema* Calculus::find(const std::string& name) const noexcept {
    for (const RuleSchema& r : schemas_)
        if (r.name == name) return &r;
    return nullptr;
}

int schema_size_max(const Calculus& c) {
    int m = 0;
    for (const RuleSchema& r : c.schemas()) m = std::max(m, r.symbol_size());
    return m;
}

ControlFunction premise_growth_bound(const Calculus& c) {
    auto k = static_cast<std::uint64_t>(schema_size_max(c));
    return ControlFunction::affine(k, k);
}

// ── Built-in schemas ────────────────────────────────────────────────────────

namespace {

using SC = SchematicComponent;

SC comp(std::vector<std::string> msets, std::vector<SchemaFormula> terms) {
    SC c;
    c.mset_vars = std::move(msets);
    c.terms = std::move(terms);
    c.succ_kind = SC::Succ::Empty;
    return c;
}

SC with_svar(SC c, std::string v) {
    c.succ_kind = SC::Succ::Var;
    c.succ_var = std::move(v);
    return c;
}

SC with_term(SC c, SchemaFormula t) {
    c.succ_kind = SC::Succ::Term;
    c.succ_term = std::move(t);
    return c;
}

SchematicHypersequent hs(std::vector<SC> comps, bool hvar = true) {
    SchematicHypersequent s;
    s.has_hvar = hvar;
    s.comps = std::move(comps);
    return s;
}

RuleSchema make_schema(std::string name, RuleKind kind, std::vector<RuleForm> forms) {
    RuleSchema r;
    r.name = std::move(name);
    r.kind = kind;
    r.forms = std::move(forms);
    return r;
}

SchemaFormula A() { return SchemaFormula::fvar("A"); }
SchemaFormula B() { return SchemaFormula::fvar("B"); }

std::vector<RuleSchema> base_schemas() {
    std::vector<RuleSchema> out;
    auto bin = [](FormulaKind k) { return SchemaFormula::binary(k, A(), B()); };

    out.push_back(make_schema("id", RuleKind::Initial,
                              {{{}, hs({with_term(comp({}, {A()}), A())})}}));
    out.push_back(make_schema(
        "botL", RuleKind::Initial,
        {{{}, hs({with_svar(comp({"X"}, {SchemaFormula::constant(FormulaKind::Bot)}), "P")})}}));
    out.push_back(make_schema(
        "topR", RuleKind::Initial,
        {{{}, hs({with_term(comp({"X"}, {}), SchemaFormula::constant(FormulaKind::Top))})}}));
    out.push_back(make_schema(
        "0L", RuleKind::Initial,
        {{{}, hs({comp({}, {SchemaFormula::constant(FormulaKind::Zero)})})}}));
    out.push_back(make_schema(
        "1R", RuleKind::Initial,
        {{{}, hs({with_term(comp({}, {}), SchemaFormula::constant(FormulaKind::One))})}}));

    out.push_back(make_schema(
        "1L", RuleKind::Logical,
        {{{hs({with_svar(comp({"X"}, {}), "P")})},
          hs({with_svar(comp({"X"}, {SchemaFormula::constant(FormulaKind::One)}), "P")})}}));
    out.push_back(make_schema(
        "0R", RuleKind::Logical,
        {{{hs({comp({"X"}, {})})},
          hs({with_term(comp({"X"}, {}), SchemaFormula::constant(FormulaKind::Zero))})}}));

    out.push_back(make_schema("EC", RuleKind::Structural,
                              {{{hs({with_svar(comp({"X"}, {}), "P"),
                                     with_svar(comp({"X"}, {}), "P")})},
                                hs({with_svar(comp({"X"}, {}), "P")})}}));
    out.push_back(make_schema("EW", RuleKind::Structural,
                              {{{hs({})}, hs({with_svar(comp({"X"}, {}), "P")})}}));

    out.push_back(make_schema("fuseL", RuleKind::Logical,
                              {{{hs({with_svar(comp({"X"}, {A(), B()}), "P")})},
                                hs({with_svar(comp({"X"}, {bin(FormulaKind::Fuse)}), "P")})}}));
    out.push_back(make_schema("fuseR", RuleKind::Logical,
                              {{{hs({with_term(comp({"X"}, {}), A())}),
                                 hs({with_term(comp({"Y"}, {}), B())})},
                                hs({with_term(comp({"X", "Y"}, {}), bin(FormulaKind::Fuse))})}}));
    out.push_back(make_schema("orL", RuleKind::Logical,
                              {{{hs({with_svar(comp({"X"}, {A()}), "P")}),
                                 hs({with_svar(comp({"X"}, {B()}), "P")})},
                                hs({with_svar(comp({"X"}, {bin(FormulaKind::Or)}), "P")})}}));
    out.push_back(make_schema(
        "orR", RuleKind::Logical,
        {{{hs({with_term(comp({"X"}, {}), A())})},
          hs({with_term(comp({"X"}, {}), bin(FormulaKind::Or))})},
         {{hs({with_term(comp({"X"}, {}), B())})},
          hs({with_term(comp({"X"}, {}), bin(FormulaKind::Or))})}}));
    out.push_back(make_schema(
        "andL", RuleKind::Logical,
        {{{hs({with_svar(comp({"X"}, {A()}), "P")})},
          hs({with_svar(comp({"X"}, {bin(FormulaKind::And)}), "P")})},
         {{hs({with_svar(comp({"X"}, {B()}), "P")})},
          hs({with_svar(comp({"X"}, {bin(FormulaKind::And)}), "P")})}}));
    out.push_back(make_schema("andR", RuleKind::Logical,
                              {{{hs({with_term(comp({"X"}, {}), A())}),
                                 hs({with_term(comp({"X"}, {}), B())})},
                                hs({with_term(comp({"X"}, {}), bin(FormulaKind::And))})}}));
    out.push_back(make_schema("impL", RuleKind::Logical,
                              {{{hs({with_term(comp({"X"}, {}), A())}),
                                 hs({with_svar(comp({"Y"}, {B()}), "P")})},
                                hs({with_svar(comp({"X", "Y"}, {bin(FormulaKind::Imp)}), "P")})}}));
    out.push_back(make_schema("impR", RuleKind::Logical,
                              {{{hs({with_term(comp({"X"}, {A()}), B())})},
                                hs({with_term(comp({"X"}, {}), bin(FormulaKind::Imp))})}}));
    return out;
}

}  // namespace

RuleSchema builtin_rule(const std::string& name, const std::vector<int>& params) {
    if (name == "c")
        return make_schema("c", RuleKind::Structural,
                           {{{hs({with_svar(comp({"X", "Y", "Y"}, {}), "P")})},
                             hs({with_svar(comp({"X", "Y"}, {}), "P")})}});
    if (name == "lw")
        return make_schema("lw", RuleKind::Structural,
                           {{{hs({with_svar(comp({"X"}, {}), "P")})},
                             hs({with_svar(comp({"X", "Y"}, {}), "P")})}});
    if (name == "rw")
        return make_schema("rw", RuleKind::Structural,
                           {{{hs({comp({"X"}, {})})},
                             hs({with_svar(comp({"X"}, {}), "P")})}});
    if (name == "com")
        return make_schema("com", RuleKind::Structural,
                           {{{hs({with_svar(comp({"Y1", "X1"}, {}), "P1")}),
                              hs({with_svar(comp({"Y2", "X2"}, {}), "P2")})},
                             hs({with_svar(comp({"Y1", "X2"}, {}), "P1"),
                                 with_svar(comp({"Y2", "X1"}, {}), "P2")})}});
    if (name == "wem")
        return make_schema("wem", RuleKind::Structural,
                           {{{hs({comp({"Z1", "Z2"}, {})})},
                             hs({comp({"Z1"}, {}), comp({"Z2"}, {})})}});
    if (name == "mingle")
        return make_schema("mingle", RuleKind::Structural,
                           {{{hs({with_svar(comp({"Y", "X1"}, {}), "P")}),
                              hs({with_svar(comp({"Y", "X2"}, {}), "P")})},
                             hs({with_svar(comp({"Y", "X1", "X2"}, {}), "P")})}});
    if (name == "bwk" || name == "Bw") {
        if (params.size() != 1 || params[0] < 1)
            throw std::invalid_argument("Bw(k) needs a parameter k >= 1");
        int k = params[0];
        RuleForm form;
        std::vector<SC> concl;
        for (int i = 0; i <= k; i++)
            concl.push_back(with_svar(comp({"Y" + std::to_string(i)}, {}), "P" + std::to_string(i)));
        form.conclusion = hs(std::move(concl));
        for (int i = 0; i <= k; i++)
            for (int j = 0; j <= k; j++) {
                if (i == j) continue;
                form.premises.push_back(hs({with_svar(
                    comp({"Y" + std::to_string(i), "Y" + std::to_string(j)}, {}),
                    "P" + std::to_string(i))}));
            }
        return make_schema("Bw" + std::to_string(k), RuleKind::Structural, {std::move(form)});
    }
    if (name == "bck" || name == "Bc") {
        if (params.size() != 1 || params[0] < 1)
            throw std::invalid_argument("Bc(k) needs a parameter k >= 1");
        int k = params[0];
        RuleForm form;
        std::vector<SC> concl;
        for (int i = 0; i < k; i++)
            concl.push_back(with_svar(comp({"Y" + std::to_string(i)}, {}), "P" + std::to_string(i)));
        concl.push_back(comp({"Y" + std::to_string(k)}, {}));
        form.conclusion = hs(std::move(concl));
        for (int i = 0; i <= k - 1; i++)
            for (int j = i + 1; j <= k; j++)
                form.premises.push_back(hs({with_svar(
                    comp({"Y" + std::to_string(i), "Y" + std::to_string(j)}, {}),
                    "P" + std::to_string(i))}));
        return make_schema("Bc" + std::to_string(k), RuleKind::Structural, {std::move(form)});
    }
    if (name == "knot") {
        if (params.size() != 2 || params[0] < 1 || params[1] < 0)
            throw std::invalid_argument("knot(n,m) needs parameters n >= 1, m >= 0");
        int n = params[0], m = params[1];
        RuleForm form;
        std::vector<std::string> all{"Y"};
        for (int i = 1; i <= n; i++) all.push_back("X" + std::to_string(i));
        form.conclusion = hs({with_svar(comp(all, {}), "P")});
        // One premise per size-m multiset over {1..n} (indices nondecreasing).
        std::vector<int> idx(static_cast<std::size_t>(m), 1);
        while (true) {
            std::vector<std::string> vars{"Y"};
            for (int i : idx) vars.push_back("X" + std::to_string(i));
            form.premises.push_back(hs({with_svar(comp(std::move(vars), {}), "P")}));
            int pos = m - 1;
            while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n) pos--;
            if (pos < 0) break;
            int v = ++idx[static_cast<std::size_t>(pos)];
            for (std::size_t q = static_cast<std::size_t>(pos) + 1; q < idx.size(); q++)
                idx[q] = v;
        }
        return make_schema("knot(" + std::to_string(n) + "," + std::to_string(m) + ")",
                           RuleKind::Structural, {std::move(form)});
    }
    throw std::invalid_argument("unknown rule '" + name + "'");
}

Calculus builtin_calculus(const std::string& preset) {
    std::string p;
    for (char c : preset) p += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (p.rfind("h", 0) == 0) p = p.substr(1);

    Calculus c;
    for (RuleSchema& r : base_schemas()) c.add(std::move(r));
    if (p == "fle") {
        c.set_preset("HFLe");
        return c;
    }
    if (p == "flelw") {
        c.add(builtin_rule("lw"));
        c.set_preset("HFLelw");
        return c;
    }
    if (p == "flew") {
        c.add(builtin_rule("lw")).add(builtin_rule("rw"));
        c.set_preset("HFLew");
        return c;
    }
    if (p == "flec") {
        c.add(builtin_rule("c"));
        c.set_preset("HFLec");
        return c;
    }
    if (p == "mtl") {
        c.add(builtin_rule("lw")).add(builtin_rule("rw")).add(builtin_rule("com"));
        c.set_preset("MTL");
        return c;
    }
    throw std::invalid_argument("unknown preset '" + preset + "'");
}

// ── Rule DSL ────────────────────────────────────────────────────────────────

namespace {

std::string_view trim_view(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

bool is_ident(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

SchematicHypersequent parse_schematic(std::string_view text) {
    SchematicHypersequent out;
    std::size_t start = 0;
    std::vector<std::string_view> parts;
    for (std::size_t i = 0; i <= text.size(); i++) {
        if (i == text.size() || text[i] == '|') {
            parts.push_back(trim_view(text.substr(start, i - start)));
            start = i + 1;
        }
    }
    for (std::string_view part : parts) {
        if (part == "H") {
            if (out.has_hvar) throw std::invalid_argument("duplicate hypersequent-variable H");
            out.has_hvar = true;
            continue;
        }
        auto arrow = part.find("=>");
        if (arrow == std::string_view::npos)
            throw std::invalid_argument("schematic component missing '=>': " + std::string(part));
        SchematicComponent c;
        std::string_view ante = trim_view(part.substr(0, arrow));
        std::string_view succ = trim_view(part.substr(arrow + 2));
        if (!ante.empty()) {
            std::size_t p = 0;
            for (std::size_t i = 0; i <= ante.size(); i++) {
                if (i == ante.size() || ante[i] == ',') {
                    std::string item(trim_view(ante.substr(p, i - p)));
                    p = i + 1;
                    if (!is_ident(item))
                        throw std::invalid_argument("bad antecedent item '" + item + "'");
                    char head = item[0];
                    if (head == 'X' || head == 'Y' || head == 'Z' || head == 'M')
                        c.mset_vars.push_back(item);
                    else if (head == 'A' || head == 'B')
                        c.terms.push_back(SchemaFormula::fvar(item));
                    else
                        throw std::invalid_argument("item '" + item +
                                                    "' is not in a known variable namespace");
                }
            }
        }
        if (!succ.empty()) {
            std::string sv(succ);
            if (!is_ident(sv)) throw std::invalid_argument("bad succedent '" + sv + "'");
            if (sv[0] == 'P') {
                c.succ_kind = SC::Succ::Var;
                c.succ_var = sv;
            } else if (sv[0] == 'A' || sv[0] == 'B') {
                c.succ_kind = SC::Succ::Term;
                c.succ_term = SchemaFormula::fvar(sv);
            } else {
                throw std::invalid_argument("succedent '" + sv +
                                            "' is not in a known variable namespace");
            }
        }
        out.comps.push_back(std::move(c));
    }
    return out;
}

}  // namespace

RuleSchema parse_rule_dsl(std::string_view text) {
    auto rules = parse_rules_file(text);
    if (rules.size() != 1)
        throw std::invalid_argument("expected exactly one rule, found " +
                                    std::to_string(rules.size()));
    return rules.front();
}

std::vector<RuleSchema> parse_rules_file(std::string_view text) {
    std::vector<RuleSchema> out;
    std::optional<RuleSchema> current;
    bool saw_conclusion = false;

    auto finish = [&]() {
        if (!current) return;
        if (!saw_conclusion)
            throw std::invalid_argument("rule '" + current->name + "' has no conclusion");
        current->kind = current->forms[0].premises.empty() ? RuleKind::Initial
                                                           : RuleKind::Structural;
        ValidationReport report = validate_schema(*current);
        if (!report.all()) {
            std::string what = "rule '" + current->name + "' fails validation:";
            if (!report.linear_conclusion) what += " conclusion not linear;";
            if (!report.subvariable) what += " subvariable property violated;";
            if (!report.structural) what += " not a structural schema;";
            for (const auto& v : report.offending) what += " " + v;
            throw std::invalid_argument(what);
        }
        out.push_back(std::move(*current));
        current.reset();
        saw_conclusion = false;
    };

    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        std::string_view line = trim_view(
            text.substr(pos, nl == std::string_view::npos ? nl : nl - pos));
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        if (line.empty() || line.front() == '#') continue;
        if (line.rfind("rule ", 0) == 0 || line == "rule") {
            finish();
            std::string name(trim_view(line.substr(4)));
            if (name.empty()) throw std::invalid_argument("rule header without a name");
            current = RuleSchema{};
            current->name = name;
            current->forms.push_back({});
            continue;
        }
        if (!current) throw std::invalid_argument("expected 'rule <name>' header");
        if (line.rfind("premise:", 0) == 0) {
            if (saw_conclusion)
                throw std::invalid_argument("premise after conclusion in rule '" + current->name + "'");
            current->forms[0].premises.push_back(parse_schematic(trim_view(line.substr(8))));
        } else if (line.rfind("conclusion:", 0) == 0) {
            if (saw_conclusion)
                throw std::invalid_argument("duplicate conclusion in rule '" + current->name + "'");
            current->forms[0].conclusion = parse_schematic(trim_view(line.substr(11)));
            saw_conclusion = true;
        } else {
            throw std::invalid_argument("unrecognized line: " + std::string(line));
        }
    }
    finish();
    if (out.empty()) throw std::invalid_argument("no rules found");
    return out;
}

// ── Conclusion matching ─────────────────────────────────────────────────────

namespace {

struct Bindings {
    std::map<std::string, Formula> fvars;
    std::map<std::string, std::optional<Formula>> svars;
    std::map<std::string, FormulaMultiset> msets;
};

// Strict mode: nonnegative vectors x with sum_v w_v * x_v == target.
void enumerate_weights_exact(const std::vector<std::uint32_t>& weights, std::uint32_t target,
                             std::size_t i, std::vector<std::uint32_t>& cur,
                             std::vector<std::vector<std::uint32_t>>& out) {
    if (i == weights.size()) {
        std::uint32_t sum = 0;
        for (std::size_t j = 0; j < weights.size(); j++) sum += weights[j] * cur[j];
        if (sum == target) out.push_back(cur);
        return;
    }
    std::uint32_t limit = target / std::max<std::uint32_t>(weights[i], 1);
    for (std::uint32_t v = 0; v <= limit; v++) {
        cur[i] = v;
        enumerate_weights_exact(weights, target, i + 1, cur, out);
    }
    cur[i] = 0;
}

// Minimal covers: sum_v w_v * y_v >= deficit with no coordinate reducible.
void minimal_weight_covers(const std::vector<std::uint32_t>& weights, std::uint32_t deficit,
                           std::size_t i, std::vector<std::uint32_t>& cur,
                           std::vector<std::vector<std::uint32_t>>& out) {
    if (i == weights.size()) {
        std::uint32_t sum = 0;
        for (std::size_t j = 0; j < weights.size(); j++) sum += weights[j] * cur[j];
        if (sum < deficit) return;
        for (std::size_t j = 0; j < weights.size(); j++)
            if (cur[j] > 0 && sum - weights[j] >= deficit) return;
        out.push_back(cur);
        return;
    }
    std::uint32_t limit =
        weights[i] == 0 ? 0 : (deficit + weights[i] - 1) / weights[i];
    for (std::uint32_t v = 0; v <= limit; v++) {
        cur[i] = v;
        minimal_weight_covers(weights, deficit, i + 1, cur, out);
    }
    cur[i] = 0;
}

// Absorbed mode: vectors with sum >= target that are minimal within their
// support pattern.  A non-minimal option with the same pattern is subsumed:
// its premises follow from the minimal ones by internal contraction.
void enumerate_weights_absorbed(const std::vector<std::uint32_t>& weights, std::uint32_t target,
                                std::vector<std::vector<std::uint32_t>>& out) {
    const std::size_t k = weights.size();
    for (std::uint32_t pattern = 0; pattern < (1u << k); pattern++) {
        std::uint32_t base = 0;
        for (std::size_t v = 0; v < k; v++)
            if (pattern & (1u << v)) base += weights[v];
        if (pattern == 0) {
            if (target == 0) out.push_back(std::vector<std::uint32_t>(k, 0));
            continue;
        }
        if (base >= target) {
            std::vector<std::uint32_t> x(k, 0);
            for (std::size_t v = 0; v < k; v++)
                if (pattern & (1u << v)) x[v] = 1;
            out.push_back(std::move(x));
            continue;
        }
        std::vector<std::uint32_t> sub_weights;
        std::vector<std::size_t> sub_index;
        for (std::size_t v = 0; v < k; v++)
            if (pattern & (1u << v)) {
                sub_weights.push_back(weights[v]);
                sub_index.push_back(v);
            }
        std::vector<std::vector<std::uint32_t>> tops;
        std::vector<std::uint32_t> cur(sub_weights.size(), 0);
        minimal_weight_covers(sub_weights, target - base, 0, cur, tops);
        for (const auto& y : tops) {
            std::vector<std::uint32_t> x(k, 0);
            for (std::size_t t = 0; t < sub_index.size(); t++) x[sub_index[t]] = 1 + y[t];
            out.push_back(std::move(x));
        }
    }
}

struct ComponentSolution {
    Bindings bindings;
    Sequent instance;
};

struct MatchMode {
    bool absorbed = false;  // match modulo (c)/(EC) below the instance
    AbsorbMode weak;        // additionally absorb (lw)/(rw)
};

// Ways the schematic component can instantiate against `target`.  Strict mode
// requires the instance to equal target.  Absorbed mode allows the instance to
// exceed target pointwise with the same support ((c) below); with (lw)
// absorption the instance antecedent may be any multiset over the target's
// support, and the maximal choice subsumes every split, so each multiset
// variable simply receives the full target antecedent.  With (rw) absorption
// an empty-succedent pattern matches any succedent.
void match_component(const SchematicComponent& sc, const Sequent& target, const MatchMode& mode,
                     const Bindings& base, std::vector<ComponentSolution>& out) {
    Bindings b0 = base;
    bool succ_dropped = false;
    switch (sc.succ_kind) {
        case SC::Succ::Empty:
            if (target.succedent) {
                if (!(mode.absorbed && mode.weak.weaken_right)) return;
                succ_dropped = true;
            }
            break;
        case SC::Succ::Var: {
            auto [it, inserted] = b0.svars.emplace(sc.succ_var, target.succedent);
            if (!inserted && it->second != target.succedent) return;
            break;
        }
        case SC::Succ::Term:
            if (!target.succedent) return;
            if (!sc.succ_term->unify(*target.succedent, b0.fvars)) return;
            break;
    }

    // Distinct multiset variables with occurrence weights.
    std::vector<std::string> vars;
    std::vector<std::uint32_t> weights;
    for (const std::string& v : sc.mset_vars) {
        auto it = std::find(vars.begin(), vars.end(), v);
        if (it == vars.end()) {
            vars.push_back(v);
            weights.push_back(1);
        } else {
            weights[static_cast<std::size_t>(it - vars.begin())]++;
        }
    }

    // Assign each antecedent term a formula occurring in the target.
    struct TermState {
        Bindings b;
        FormulaMultiset chosen;  // term instances
    };
    std::vector<TermState> states{{b0, FormulaMultiset{}}};
    for (const SchemaFormula& term : sc.terms) {
        std::vector<TermState> next;
        for (const TermState& st : states) {
            for (const Formula& f : target.antecedent.support()) {
                if (!mode.absorbed) {
                    // strict: the term consumes a real occurrence
                    if (st.chosen.count(f) >= target.antecedent.count(f)) continue;
                }
                Bindings b = st.b;
                if (!term.unify(f, b.fvars)) continue;
                TermState ns{std::move(b), st.chosen};
                ns.chosen.add(f);
                next.push_back(std::move(ns));
            }
        }
        states = std::move(next);
    }

    auto finish = [&](Bindings b, const FormulaMultiset& chosen,
                      const std::vector<FormulaMultiset>& assigned) {
        bool ok = true;
        for (std::size_t vi = 0; vi < vars.size() && ok; vi++) {
            auto [it, inserted] = b.msets.emplace(vars[vi], assigned[vi]);
            if (!inserted && !(it->second == assigned[vi])) ok = false;
        }
        if (!ok) return;
        Sequent inst;
        inst.antecedent = chosen;
        for (std::size_t vi = 0; vi < vars.size(); vi++)
            for (std::uint32_t w = 0; w < weights[vi]; w++)
                inst.antecedent = inst.antecedent.sum(assigned[vi]);
        inst.succedent = succ_dropped || sc.succ_kind == SC::Succ::Empty
                             ? std::optional<Formula>{}
                             : target.succedent;
        out.push_back({std::move(b), std::move(inst)});
    };

    if (mode.absorbed && mode.weak.weaken_left) {
        // maximal content: every variable takes the whole target antecedent
        for (TermState& st : states) {
            std::vector<FormulaMultiset> assigned(vars.size(), target.antecedent);
            finish(std::move(st.b), st.chosen, assigned);
        }
        return;
    }

    for (const TermState& st : states) {
        // Per distinct formula, distribute the remaining demand over the
        // multiset variables.
        std::vector<Formula> support = target.antecedent.support();
        std::vector<std::vector<std::vector<std::uint32_t>>> choices;  // per formula
        bool feasible = true;
        for (const Formula& f : support) {
            std::uint32_t have = st.chosen.count(f);
            std::uint32_t total = target.antecedent.count(f);
            if (!mode.absorbed && have > total) {
                feasible = false;
                break;
            }
            std::uint32_t need = total > have ? total - have : 0;
            std::vector<std::vector<std::uint32_t>> opts;
            if (vars.empty()) {
                if (need == 0)
                    opts.push_back({});
                else
                    feasible = false;
            } else if (mode.absorbed) {
                enumerate_weights_absorbed(weights, need, opts);
            } else {
                std::vector<std::uint32_t> cur(vars.size(), 0);
                enumerate_weights_exact(weights, need, 0, cur, opts);
                if (opts.empty()) feasible = false;
            }
            if (!feasible) break;
            choices.push_back(std::move(opts));
        }
        if (!feasible) continue;

        // Cartesian product over the per-formula choices.
        std::vector<std::size_t> pick(support.size(), 0);
        while (true) {
            std::vector<FormulaMultiset> assigned(vars.size());
            for (std::size_t fi = 0; fi < support.size(); fi++) {
                const auto& vec = choices[fi].empty() ? std::vector<std::uint32_t>{}
                                                      : choices[fi][pick[fi]];
                for (std::size_t vi = 0; vi < vec.size(); vi++)
                    if (vec[vi] > 0) assigned[vi].add(support[fi], vec[vi]);
            }
            finish(st.b, st.chosen, assigned);
            // advance cartesian counter
            std::size_t fi = 0;
            for (; fi < support.size(); fi++) {
                if (choices[fi].empty()) continue;
                if (++pick[fi] < choices[fi].size()) break;
                pick[fi] = 0;
            }
            if (fi == support.size()) break;
        }
    }
}

struct MatchSink {
    std::vector<Instantiation>* strict = nullptr;
    std::vector<AbsorbedMatch>* absorbed = nullptr;
};

struct HypVecKey {
    std::vector<Hypersequent> items;
    bool operator==(const HypVecKey&) const = default;
};

struct HypVecKeyHash {
    std::size_t operator()(const HypVecKey& k) const noexcept {
        std::size_t h = k.items.size();
        for (const Hypersequent& x : k.items) h = h * 0x9e3779b97f4a7c15ull ^ x.hash();
        return h;
    }
};

using SeenSet = std::unordered_set<HypVecKey, HypVecKeyHash>;

void emit_solution(const RuleSchema& rule, std::size_t form_index, const Hypersequent& goal,
                   const OmegaSet& omega, const MatchMode& mode,
                   const std::vector<std::pair<Sequent, std::uint32_t>>& distinct,
                   const std::vector<std::uint32_t>& consumed,
                   const std::vector<std::pair<std::size_t, Sequent>>& instances,
                   const Bindings& b, SeenSet& seen, MatchSink sink) {
    const RuleForm& form = rule.forms[form_index];
    std::vector<Sequent> hcomps;
    for (std::size_t di = 0; di < distinct.size(); di++)
        for (std::uint32_t k = consumed[di]; k < distinct[di].second; k++)
            hcomps.push_back(distinct[di].first);
    if (!form.conclusion.has_hvar && !hcomps.empty()) return;

    for (const auto& [v, f] : b.fvars)
        if (!omega.contains(f)) return;

    Instantiation inst;
    inst.form_index = form_index;
    inst.hyper = Hypersequent(std::move(hcomps));
    inst.fvars = b.fvars;
    inst.succs = b.svars;
    inst.msets = b.msets;
    RuleInstance ri;
    try {
        ri = instantiate(rule, inst);
    } catch (const std::invalid_argument&) {
        return;  // a variable the conclusion does not mention; invalid schema
    }

    if (!mode.absorbed) {
        if (!(ri.conclusion == goal)) return;  // safety net; holds by construction
        if (!seen.insert(HypVecKey{ri.premises}).second) return;
        sink.strict->push_back(std::move(inst));
        return;
    }

    HypVecKey key{ri.premises};
    key.items.push_back(ri.conclusion);
    if (!seen.insert(std::move(key)).second) return;

    AbsorbedMatch match;
    match.inst = std::move(inst);
    match.instance_conclusion = ri.conclusion;
    match.premises = std::move(ri.premises);

    // Materialize the weak-rule chain from the instance conclusion down to
    // the goal: per placed component contract surplus copies, add whatever
    // (lw) absorbed, restore an absorbed succedent, then merge surplus
    // duplicates away.
    Hypersequent cur = match.instance_conclusion;
    std::vector<std::pair<std::string, Hypersequent>> chain_down;
    auto replace_comp = [&](const Sequent& from, const Sequent& to, const char* rule_name) {
        std::vector<Sequent> cs = cur.components();
        auto it = std::find(cs.begin(), cs.end(), from);
        assert(it != cs.end());
        *it = to;
        Hypersequent next(std::move(cs));
        chain_down.emplace_back(rule_name, next);
        cur = next;
    };
    for (std::size_t idx = 0; idx < instances.size(); idx++) {
        const Sequent& target = distinct[instances[idx].first].first;
        Sequent now = instances[idx].second;
        // (c): surplus copies down to the target multiplicity
        for (const Formula& f : now.antecedent.support()) {
            while (now.antecedent.count(f) > std::max(target.antecedent.count(f), 1u)) {
                Sequent reduced = now;
                reduced.antecedent.remove(f, 1);
                replace_comp(now, reduced, "c");
                now = reduced;
            }
        }
        // (lw): whatever the instance is missing
        if (!(now.antecedent == target.antecedent)) {
            Sequent grown = now;
            grown.antecedent = target.antecedent;
            replace_comp(now, grown, "lw");
            now = grown;
        }
        // (rw): restore an absorbed succedent
        if (now.succedent != target.succedent) {
            Sequent filled = now;
            filled.succedent = target.succedent;
            replace_comp(now, filled, "rw");
            now = filled;
        }
    }
    while (!(cur == goal)) {
        // (EC): merge one surplus duplicate
        bool merged = false;
        for (const auto& [s, mult] : cur.distinct_components()) {
            if (mult > goal.multiplicity(s)) {
                std::vector<Sequent> cs = cur.components();
                cs.erase(std::find(cs.begin(), cs.end(), s));
                Hypersequent next(std::move(cs));
                chain_down.emplace_back("EC", next);
                cur = next;
                merged = true;
                break;
            }
        }
        if (!merged) break;  // should not happen
    }
    assert(cur == goal);
    match.chain = std::move(chain_down);
    sink.absorbed->push_back(std::move(match));
}

void match_recurse(const RuleSchema& rule, std::size_t form_index, const Hypersequent& goal,
                   const OmegaSet& omega, const MatchMode& mode,
                   const std::vector<std::pair<Sequent, std::uint32_t>>& distinct,
                   std::size_t ci, std::vector<std::uint32_t>& consumed,
                   std::vector<std::pair<std::size_t, Sequent>>& instances, const Bindings& b,
                   SeenSet& seen, MatchSink sink) {
    const RuleForm& form = rule.forms[form_index];
    if (ci == form.conclusion.comps.size()) {
        emit_solution(rule, form_index, goal, omega, mode, distinct, consumed, instances, b,
                      seen, sink);
        return;
    }
    const SchematicComponent& sc = form.conclusion.comps[ci];
    for (std::size_t di = 0; di < distinct.size(); di++) {
        for (int share = 0; share <= (mode.absorbed ? 1 : 0); share++) {
            if (!share && consumed[di] >= distinct[di].second) continue;
            std::vector<ComponentSolution> sols;
            match_component(sc, distinct[di].first, mode, b, sols);
            if (sols.empty()) continue;
            if (!share) consumed[di]++;
            for (ComponentSolution& sol : sols) {
                instances.emplace_back(di, std::move(sol.instance));
                match_recurse(rule, form_index, goal, omega, mode, distinct, ci + 1, consumed,
                              instances, sol.bindings, seen, sink);
                instances.pop_back();
            }
            if (!share) consumed[di]--;
        }
    }
}

}  // namespace

std::vector<Instantiation> match_conclusion(const RuleSchema& r, const Hypersequent& h,
                                            const OmegaSet& omega) {
    std::vector<Instantiation> out;
    SeenSet seen;
    auto distinct = h.distinct_components();
    MatchMode mode;
    for (std::size_t fi = 0; fi < r.forms.size(); fi++) {
        std::vector<std::uint32_t> consumed(distinct.size(), 0);
        std::vector<std::pair<std::size_t, Sequent>> instances;
        Bindings b;
        MatchSink sink;
        sink.strict = &out;
        match_recurse(r, fi, h, omega, mode, distinct, 0, consumed, instances, b, seen, sink);
    }
    return out;
}

std::vector<AbsorbedMatch> match_conclusion_absorbed(const RuleSchema& r, const Hypersequent& h,
                                                     const OmegaSet& omega,
                                                     const AbsorbMode& weak) {
    std::vector<AbsorbedMatch> out;
    SeenSet seen;
    auto distinct = h.distinct_components();
    MatchMode mode;
    mode.absorbed = true;
    mode.weak = weak;
    for (std::size_t fi = 0; fi < r.forms.size(); fi++) {
        std::vector<std::uint32_t> consumed(distinct.size(), 0);
        std::vector<std::pair<std::size_t, Sequent>> instances;
        Bindings b;
        MatchSink sink;
        sink.absorbed = &out;
        match_recurse(r, fi, h, omega, mode, distinct, 0, consumed, instances, b, seen, sink);
    }
    return out;
}

}  // namespace hyperprover
