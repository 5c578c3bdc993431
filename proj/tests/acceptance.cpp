// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion.  Exit code 0 iff all pass.

#include <chrono>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <vector>

#include "hyperprover/backward.hpp"
#include "hyperprover/checker.hpp"
#include "hyperprover/forward.hpp"
#include "support.hpp"

using namespace hyperprover;
namespace ht = hyperprover::testing;
using Clock = std::chrono::steady_clock;

namespace {

double secs_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Aggregates for the instrumentation criteria, fed by every engine run the
// suite performs.
struct SaturationAudit {
    std::size_t runs = 0;
    std::size_t fixpoint_runs = 0;
    std::size_t monotone_failures = 0;
    std::size_t antitone_failures = 0;
    std::size_t thin_violations = 0;
    std::size_t bad_sequence_failures = 0;
    std::size_t incomplete_full_runs = 0;
} g_sat;

struct BackwardAudit {
    std::size_t runs = 0;
    std::uint64_t growth_violations = 0;
    std::uint64_t badness_violations = 0;
    std::size_t path_failures = 0;
} g_back;

void audit_saturation(const SaturationState& state, bool expected_fixpoint) {
    g_sat.runs++;
    if (state.fixpoint) g_sat.fixpoint_runs++;
    if (expected_fixpoint && !state.fixpoint) g_sat.incomplete_full_runs++;
    g_sat.thin_violations += state.thin_violations;
    for (std::size_t i = 0; i < state.elements.size(); i++)
        for (std::size_t j = i + 1; j < state.elements.size(); j++)
            if (state.elements[i].round < state.elements[j].round &&
                weak_reach_unchecked(state.elements[i].h, state.elements[j].h))
                g_sat.antitone_failures++;
    // rounds are stored append-only; set sizes must be nondecreasing
    for (std::size_t i = 1; i < state.rounds.size(); i++)
        if (state.rounds[i].set_size < state.rounds[i - 1].set_size) g_sat.monotone_failures++;
    if (!verify_controlled_bad(state.record, SetOrder::Majoring).ok)
        g_sat.bad_sequence_failures++;
}

void audit_backward(const BackwardResult& result) {
    g_back.runs++;
    g_back.growth_violations += result.stats.growth_violations;
    g_back.badness_violations += result.stats.badness_violations;
    if (!verify_controlled_bad(result.deepest_path, SetOrder::Minoring).ok)
        g_back.path_failures++;
}

Verdict forward_verdict(const Hypersequent& goal, const Calculus& calc,
                        bool full_fixpoint = false) {
    SaturateOptions opts;
    opts.full_fixpoint = full_fixpoint;
    ForwardResult r = decide_forward(goal, calc, opts);
    audit_saturation(r.state, full_fixpoint || r.verdict == Verdict::NotDerivable);
    return r.verdict;
}

Verdict backward_verdict(const Hypersequent& goal, const Calculus& calc) {
    BackwardResult r = decide_backward(goal, calc);
    audit_backward(r);
    return r.verdict;
}

const char* kFig2 =
    "=> p | p * (q \\/ r) => (p * q) \\/ (p * r)  [fuseL]\n"
    "  => p | p, q \\/ r => (p * q) \\/ (p * r)  [orL]\n"
    "    => p | p, q => (p * q) \\/ (p * r)  [orR]\n"
    "      => p | p, q => p * q  [fuseR]\n"
    "        => p | p => p  [id]\n"
    "        => p | q => q  [id]\n"
    "    => p | p, r => (p * q) \\/ (p * r)  [orR]\n"
    "      => p | p, r => p * r  [fuseR]\n"
    "        => p | p => p  [id]\n"
    "        => p | r => r  [id]\n";

// ── Criteria ────────────────────────────────────────────────────────────────

bool criterion1(std::string& detail) {
    auto t0 = Clock::now();
    std::stringstream ss(kFig2);
    DerivationTree fig2 = read_derivation(ss);
    CheckResult checked = check_derivation(fig2, builtin_calculus("fle"));
    if (!checked.accepted) {
        detail = "checker rejected the transcription: " + checked.reason;
        return false;
    }
    Hypersequent goal = fig2->conclusion;
    SaturateOptions opts;
    ForwardResult fw = decide_forward(goal, builtin_calculus("flelw"), opts);
    audit_saturation(fw.state, false);
    double elapsed = secs_since(t0);
    std::ostringstream os;
    os << "checker accepted; forward verdict " << verdict_name(fw.verdict) << "; "
       << elapsed << "s";
    detail = os.str();
    return fw.verdict == Verdict::Derivable && elapsed < 10.0;
}

bool criterion2(std::string& detail) {
    Calculus mtl = builtin_calculus("mtl");
    std::ostringstream os;
    bool ok = true;
    for (const char* text : {"(p -> q) \\/ (q -> p)", "p * q -> p", "bot -> p"}) {
        auto t0 = Clock::now();
        Verdict v = forward_verdict(Hypersequent::goal(parse_formula(text)), mtl);
        double elapsed = secs_since(t0);
        os << text << ": " << verdict_name(v) << " in " << elapsed << "s; ";
        ok = ok && v == Verdict::Derivable && elapsed < 60.0;
    }
    detail = os.str();
    return ok;
}

bool criterion3(std::string& detail) {
    Calculus mtl = builtin_calculus("mtl");
    auto t0 = Clock::now();
    Formula f = parse_formula("p -> p * p");
    Verdict v = forward_verdict(Hypersequent::goal(f), mtl);
    double elapsed = secs_since(t0);
    ChainEval eval = eval_chain(f, {ChainModel::Kind::Lukasiewicz, 3});
    std::ostringstream os;
    os << verdict_name(v) << " in " << elapsed << "s; chain value " << eval.value << "/"
       << eval.denom << " at p=" << eval.assignment.at("p") << "/" << eval.denom;
    detail = os.str();
    return v == Verdict::NotDerivable && elapsed < 60.0 && !eval.valid && eval.value == 1 &&
           eval.denom == 2 && eval.assignment.at("p") == 1;
}

bool criterion4(std::string& detail) {
    auto t0 = Clock::now();
    Calculus forward_side =
        builtin_calculus("flelw").with(builtin_rule("c")).with(builtin_rule("rw"));
    Calculus backward_side =
        builtin_calculus("flec").with(builtin_rule("lw")).with(builtin_rule("rw"));
    ht::Rng rng(0x5eed5eedULL);
    std::size_t disagreements = 0, derivable = 0;
    for (int i = 0; i < 200; i++) {
        Formula f = ht::random_formula(rng, {"p", "q"}, 3);
        Hypersequent goal = Hypersequent::goal(f);
        Verdict fv = forward_verdict(goal, forward_side);
        Verdict bv = backward_verdict(goal, backward_side);
        if (fv != bv) {
            disagreements++;
            std::cerr << "  disagreement on " << f.text() << ": forward " << verdict_name(fv)
                      << ", backward " << verdict_name(bv) << "\n";
        }
        if (fv == Verdict::Derivable) derivable++;
        if (i % 50 == 49)
            std::cerr << "  [criterion 4] " << (i + 1) << "/200 formulas, "
                      << secs_since(t0) << "s elapsed\n";
    }
    double elapsed = secs_since(t0);
    std::ostringstream os;
    os << "200 formulas, " << derivable << " derivable, " << disagreements
       << " disagreements, " << elapsed << "s";
    detail = os.str();
    return disagreements == 0 && elapsed < 1800.0;
}

bool criterion5(std::string& detail) {
    std::ostringstream os;
    bool ok = true;
    Calculus calc = builtin_calculus("flelw");
    std::vector<std::vector<Formula>> vocabularies = {
        {Formula::var("p")}, {Formula::var("p"), Formula::var("q")}};
    for (const auto& seeds : vocabularies) {
        OmegaSet omega = OmegaSet::closure(seeds);
        std::vector<Hypersequent> s0 = initial_set(omega, calc);
        WiBounds wb = ht::tiny_wi_bounds();
        std::vector<Hypersequent> direct = compute_wi(s0, omega, calc, wb);
        std::vector<Hypersequent> brute = ht::wi_bruteforce(s0, omega, calc, wb);
        bool equal = std::set<Hypersequent>(direct.begin(), direct.end()) ==
                     std::set<Hypersequent>(brute.begin(), brute.end());
        os << "|omega|=" << omega.size() << ": " << direct.size() << " vs " << brute.size()
           << (equal ? " equal; " : " MISMATCH; ");
        ok = ok && equal && !direct.empty();
    }
    detail = os.str();
    return ok;
}

bool criterion6(std::string& detail) {
    std::size_t mismatches = 0, checked = 0;

    // slice 1: |omega| = 1, full caps (<= 3 components, multiplicities <= 2)
    {
        OmegaSet omega = OmegaSet::closure_of(Formula::var("p"));
        std::vector<Hypersequent> box = enumerate_universe(omega, 2, 3, 3);
        for (const Hypersequent& g : box)
            for (const Hypersequent& h : box) {
                checked++;
                if (weak_reach_unchecked(g, h) != ht::weak_reach_bruteforce(g, h, omega))
                    mismatches++;
            }
    }
    // slice 2: |omega| = 2, all pairs with <= 2 components
    {
        OmegaSet omega = OmegaSet::closure(
            std::vector<Formula>{Formula::var("p"), Formula::var("q")});
        std::vector<Hypersequent> box = enumerate_universe(omega, 4, 2, 2);
        // keep the per-formula multiplicity cap of 2
        std::vector<Hypersequent> filtered;
        for (const Hypersequent& h : box) {
            bool ok = true;
            for (const auto& [s, m] : h.distinct_components())
                for (const Formula& f : s.antecedent.support())
                    if (s.antecedent.count(f) > 2) ok = false;
            if (ok) filtered.push_back(h);
        }
        for (const Hypersequent& g : filtered)
            for (const Hypersequent& h : filtered) {
                checked++;
                if (weak_reach_unchecked(g, h) != ht::weak_reach_bruteforce(g, h, omega))
                    mismatches++;
            }
    }
    // slice 3: |omega| = 2, three components, seeded random sample of the rest
    {
        OmegaSet omega = OmegaSet::closure(
            std::vector<Formula>{Formula::var("p"), Formula::var("q")});
        ht::Rng rng(616);
        for (int i = 0; i < 30000; i++) {
            Hypersequent g = ht::random_omega_hypersequent(rng, omega, 3, 2);
            Hypersequent h = ht::random_omega_hypersequent(rng, omega, 3, 2);
            checked++;
            if (weak_reach_unchecked(g, h) != ht::weak_reach_bruteforce(g, h, omega))
                mismatches++;
        }
    }
    std::ostringstream os;
    os << checked << " pairs (two exhaustive slices + 30000 sampled 3-component pairs), "
       << mismatches << " mismatches";
    detail = os.str();
    return mismatches == 0;
}

bool criterion7(std::string& detail) {
    OmegaSet omega = OmegaSet::closure_of(parse_formula("p \\/ q"));
    ht::Rng rng(0xC0FFEE);
    std::size_t violations = 0;
    for (int i = 0; i < 1000; i++) {
        Hypersequent g = ht::random_omega_hypersequent(rng, omega);
        Hypersequent h = ht::random_omega_hypersequent(rng, omega);
        bool direct = weak_reach_unchecked(g, h);
        bool encoded = leq_majoring_vector(encode_sharp(g, omega), encode_sharp(h, omega));
        if (direct != encoded) violations++;
    }
    std::ostringstream os;
    os << "1000 pairs, " << violations << " violations";
    detail = os.str();
    return violations == 0;
}

bool criterion8(std::string& detail) {
    // two dedicated full-fixpoint runs on top of everything audited so far
    for (const char* preset : {"flelw", "mtl"}) {
        Calculus calc = builtin_calculus(preset);
        OmegaSet omega = OmegaSet::closure_of(parse_formula("p \\/ q"));
        SaturateOptions opts;
        opts.full_fixpoint = true;
        audit_saturation(saturate(omega, calc, opts), true);
    }
    std::ostringstream os;
    os << g_sat.runs << " saturation runs (" << g_sat.fixpoint_runs << " to fixpoint), "
       << g_sat.monotone_failures << " monotonicity / " << g_sat.antitone_failures
       << " antitone-filter / " << g_sat.thin_violations << " thinness / "
       << g_sat.bad_sequence_failures << " bad-sequence failures, "
       << g_sat.incomplete_full_runs << " full runs without fixpoint";
    detail = os.str();
    return g_sat.monotone_failures == 0 && g_sat.antitone_failures == 0 &&
           g_sat.thin_violations == 0 && g_sat.bad_sequence_failures == 0 &&
           g_sat.incomplete_full_runs == 0 && g_sat.fixpoint_runs > 0;
}

bool criterion9(std::string& detail) {
    // one dedicated run with a structural extension beyond criterion 4's
    Calculus calc = builtin_calculus("flec").with(builtin_rule("com"));
    BackwardResult r = decide_backward(
        Hypersequent::goal(parse_formula("((p -> q) /\\ 1) \\/ ((q -> p) /\\ 1)")), calc);
    audit_backward(r);
    bool guarded_ok = r.verdict == Verdict::Derivable;

    std::ostringstream os;
    os << g_back.runs << " backward runs, " << g_back.growth_violations
       << " growth violations, " << g_back.badness_violations << " badness violations, "
       << g_back.path_failures << " path verification failures";
    detail = os.str();
    return guarded_ok && g_back.growth_violations == 0 && g_back.badness_violations == 0 &&
           g_back.path_failures == 0;
}

bool criterion10(std::string& detail) {
    Calculus calc = builtin_calculus("flelw");
    OmegaSet omega = OmegaSet::closure_of(Formula::var("p"));
    std::vector<Hypersequent> got = initial_set(omega, calc);
    std::set<Hypersequent> expected = {
        parse_hypersequent("p => p"), parse_hypersequent("=> 1"),
        parse_hypersequent("=> top"), parse_hypersequent("0 =>"),
        parse_hypersequent("bot =>"), parse_hypersequent("bot => p"),
    };
    bool equal = std::set<Hypersequent>(got.begin(), got.end()) == expected;
    std::ostringstream os;
    os << got.size() << " elements";
    for (const Hypersequent& h : got) os << "; " << h.text();
    detail = os.str();
    return equal;
}

}  // namespace

int main() {
    struct Entry {
        int id;
        const char* name;
        std::function<bool(std::string&)> run;
    };
    const Entry criteria[] = {
        {1, "Fig. 2 golden proof checked and forward-provable (< 10 s)", criterion1},
        {2, "MTL positives: prelinearity, left weakening, ex falso (< 60 s each)", criterion2},
        {3, "MTL negative p -> p*p with Lukasiewicz-3 countermodel (< 60 s)", criterion3},
        {4, "engine agreement on 200 random formulas (< 30 min)", criterion4},
        {5, "compute_wi equals the brute-force WI enumeration", criterion5},
        {6, "weak_reach equals exhaustive weak-rule reachability", criterion6},
        {7, "weak_reach iff majoring comparison of # encodings (1000 pairs)", criterion7},
        {8, "saturation invariants and majoring-controlled bad sequences", criterion8},
        {9, "backward instrumentation: minoring bad sequences, growth bound", criterion9},
        {10, "initial_set({p}, HFLelw) exact content", criterion10},
    };

    int failures = 0;
    for (const Entry& c : criteria) {
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::cout << (ok ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name
                  << "  [" << detail << "]" << std::endl;
        if (!ok) failures++;
    }
    if (failures) std::cout << failures << " criteria failed" << std::endl;
    return failures == 0 ? 0 : 1;
}
