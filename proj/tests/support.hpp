#ifndef HYPERPROVER_TEST_SUPPORT_HPP
#define HYPERPROVER_TEST_SUPPORT_HPP

// Shared test utilities: deterministic generators and the independent
// brute-force oracles the engine results are checked against.

#include <algorithm>
#include <deque>
#include <random>
#include <set>
#include <vector>

#include "hyperprover/calculus.hpp"
#include "hyperprover/forward.hpp"
#include "hyperprover/hyperseq.hpp"

namespace hyperprover::testing {

// mt19937_64 is fully specified by the standard, so sequences are portable.
using Rng = std::mt19937_64;

inline std::size_t pick(Rng& rng, std::size_t n) { return rng() % n; }

// ── Random structures ───────────────────────────────────────────────────────

inline Formula random_formula(Rng& rng, const std::vector<std::string>& vars, int depth,
                              bool with_constants = true) {
    bool leaf = depth <= 0 || pick(rng, 100) < 30;
    if (leaf) {
        std::size_t n = vars.size() + (with_constants ? 4 : 0);
        std::size_t i = pick(rng, n);
        if (i < vars.size()) return Formula::var(vars[i]);
        switch (i - vars.size()) {
            case 0: return Formula::one();
            case 1: return Formula::zero();
            case 2: return Formula::top();
            default: return Formula::bot();
        }
    }
    FormulaKind kinds[] = {FormulaKind::And, FormulaKind::Or, FormulaKind::Fuse,
                           FormulaKind::Imp};
    FormulaKind k = kinds[pick(rng, 4)];
    return Formula::make(k, random_formula(rng, vars, depth - 1, with_constants),
                         random_formula(rng, vars, depth - 1, with_constants));
}

inline Hypersequent random_omega_hypersequent(Rng& rng, const OmegaSet& omega,
                                              std::size_t max_components = 3,
                                              std::uint32_t max_mult = 2) {
    std::vector<Sequent> comps;
    std::size_t n = pick(rng, max_components + 1);
    for (std::size_t i = 0; i < n; i++) {
        Sequent s;
        for (std::size_t j = 0; j < omega.size(); j++) {
            std::uint32_t m = static_cast<std::uint32_t>(pick(rng, max_mult + 1));
            if (m > 0) s.antecedent.add(omega.formula(j), m);
        }
        std::size_t succ = pick(rng, omega.size() + 1);
        if (succ > 0) s.succedent = omega.formula(succ - 1);
        comps.push_back(std::move(s));
    }
    return Hypersequent(std::move(comps));
}

// ── Weak structural reachability oracle ─────────────────────────────────────
// Exhaustive search over (lw), (EC), (EW) applications from g, looking for h.
// Intermediate states are capped soundly: (lw) never grows a formula beyond
// its maximum antecedent multiplicity in h, (EW) only introduces components
// whose shape can still end up in h, and component counts stay within
// |g| + |h| (an addition that is merged away again is a no-op).

inline bool weak_reach_bruteforce(const Hypersequent& g, const Hypersequent& h,
                                  const OmegaSet& omega) {
    if (g == h) return true;
    std::map<Formula, std::uint32_t> max_mult;
    std::set<std::optional<Formula>> succedents;
    for (const auto& [s, m] : h.distinct_components()) {
        succedents.insert(s.succedent);
        for (const Formula& f : s.antecedent.support())
            max_mult[f] = std::max(max_mult[f], s.antecedent.count(f));
    }
    const std::size_t comp_cap = g.component_count() + h.component_count();

    std::set<Hypersequent> visited{g};
    std::deque<Hypersequent> queue{g};
    auto push = [&](Hypersequent next) {
        if (next.component_count() > comp_cap) return;
        if (visited.insert(next).second) queue.push_back(std::move(next));
    };

    while (!queue.empty()) {
        Hypersequent cur = queue.front();
        queue.pop_front();
        if (cur == h) return true;

        const auto& comps = cur.components();
        for (std::size_t i = 0; i < comps.size(); i++) {
            // (lw): one more copy of any omega formula
            for (std::size_t j = 0; j < omega.size(); j++) {
                const Formula& f = omega.formula(j);
                auto it = max_mult.find(f);
                std::uint32_t cap = it == max_mult.end() ? 0 : it->second;
                if (comps[i].antecedent.count(f) >= cap) continue;
                Sequent grown = comps[i];
                grown.antecedent.add(f);
                push(cur.without_component_at(i).with_component(grown));
            }
            // (EC): drop one of two identical occurrences
            if (cur.multiplicity(comps[i]) >= 2) push(cur.without_component_at(i));
        }
        // (EW): add a component shaped like something in h
        for (const auto& [s, m] : h.distinct_components()) {
            Sequent fresh;
            fresh.succedent = s.succedent;
            push(cur.with_component(fresh));
            push(cur.with_component(s));
        }
    }
    return false;
}

// ── Contraction reachability oracle ─────────────────────────────────────────
// Exhaustive (c), (EC), (EW) applications starting from h, looking for g.

inline bool contract_reach_bruteforce(const Hypersequent& g, const Hypersequent& h) {
    if (g == h) return true;
    const std::size_t comp_cap = g.component_count() + h.component_count();
    std::set<Hypersequent> visited{h};
    std::deque<Hypersequent> queue{h};
    auto push = [&](Hypersequent next) {
        if (next.component_count() > comp_cap) return;
        if (visited.insert(next).second) queue.push_back(std::move(next));
    };
    while (!queue.empty()) {
        Hypersequent cur = queue.front();
        queue.pop_front();
        if (cur == g) return true;
        const auto& comps = cur.components();
        for (std::size_t i = 0; i < comps.size(); i++) {
            // (c): delete one duplicate copy of a formula
            for (const Formula& f : comps[i].antecedent.support()) {
                if (comps[i].antecedent.count(f) < 2) continue;
                Sequent reduced = comps[i];
                reduced.antecedent.remove(f);
                push(cur.without_component_at(i).with_component(reduced));
            }
            // (EC)
            if (cur.multiplicity(comps[i]) >= 2) push(cur.without_component_at(i));
        }
        // (EW): only components of g can usefully appear
        for (const auto& [s, m] : g.distinct_components()) push(cur.with_component(s));
    }
    return false;
}

// ── Hierarchy grammar oracle ────────────────────────────────────────────────
// Kleene iteration of the grammar clauses over the subformula universe,
// independent of the bottom-up classifier.

struct HierarchySets {
    std::set<Formula> p[4], n[4], p3p;
};

inline HierarchySets hierarchy_fixpoint(const Formula& root) {
    std::vector<Formula> univ = subformulas(root);
    HierarchySets sets;
    for (const Formula& f : univ)
        if (f.kind() == FormulaKind::Var) {
            sets.p[0].insert(f);
            sets.n[0].insert(f);
        }
    bool changed = true;
    auto add = [&](std::set<Formula>& s, const Formula& f) {
        if (s.insert(f).second) changed = true;
    };
    while (changed) {
        changed = false;
        for (const Formula& f : univ) {
            for (int lvl = 1; lvl <= 3; lvl++) {
                // P_lvl clauses
                if (f.kind() == FormulaKind::One || f.kind() == FormulaKind::Bot)
                    add(sets.p[lvl], f);
                if (sets.n[lvl - 1].count(f)) add(sets.p[lvl], f);
                if ((f.kind() == FormulaKind::Or || f.kind() == FormulaKind::Fuse) &&
                    sets.p[lvl].count(f.left()) && sets.p[lvl].count(f.right()))
                    add(sets.p[lvl], f);
                // N_lvl clauses
                if (f.kind() == FormulaKind::Zero || f.kind() == FormulaKind::Top)
                    add(sets.n[lvl], f);
                if (sets.p[lvl - 1].count(f)) add(sets.n[lvl], f);
                if (f.kind() == FormulaKind::And && sets.n[lvl].count(f.left()) &&
                    sets.n[lvl].count(f.right()))
                    add(sets.n[lvl], f);
                if (f.kind() == FormulaKind::Imp && sets.p[lvl].count(f.left()) &&
                    sets.n[lvl].count(f.right()))
                    add(sets.n[lvl], f);
            }
            // P_3' clauses
            if (f.kind() == FormulaKind::One || f.kind() == FormulaKind::Bot)
                add(sets.p3p, f);
            if (f.kind() == FormulaKind::And && sets.n[2].count(f.left()) &&
                f.right() == Formula::one())
                add(sets.p3p, f);
            if ((f.kind() == FormulaKind::Or || f.kind() == FormulaKind::Fuse) &&
                sets.p3p.count(f.left()) && sets.p3p.count(f.right()))
                add(sets.p3p, f);
        }
    }
    return sets;
}

// ── Literal WI oracle ───────────────────────────────────────────────────────
// Brute-force enumeration of WI(S, omega, C) within explicit caps: every rule
// is instantiated forward from exhaustively enumerated variable values, the
// opposite route from the backward-matching compute_wi.

inline std::vector<Hypersequent> wi_bruteforce(const std::vector<Hypersequent>& set,
                                               const OmegaSet& omega, const Calculus& calc,
                                               const WiBounds& wb) {
    std::vector<Hypersequent> conclusions = enumerate_universe(
        omega, wb.conclusion_antecedent_cap, wb.conclusion_multiplicity_cap,
        wb.conclusion_component_cap, wb.universe_guard);
    std::set<Hypersequent> conclusion_set(conclusions.begin(), conclusions.end());
    std::vector<Hypersequent> hvals = enumerate_universe(
        omega, wb.premise_antecedent_cap, wb.premise_multiplicity_cap, wb.premise_component_cap,
        wb.universe_guard);

    std::vector<FormulaMultiset> multisets;
    {
        FormulaMultiset cur;
        auto rec = [&](auto&& self, std::size_t idx, std::uint64_t left) -> void {
            multisets.push_back(cur);
            if (left == 0) return;
            for (std::size_t i = idx; i < omega.size(); i++) {
                cur.add(omega.formula(i));
                self(self, i, left - 1);
                cur.remove(omega.formula(i));
            }
        };
        rec(rec, 0, wb.premise_antecedent_cap);
        std::sort(multisets.begin(), multisets.end());
        multisets.erase(std::unique(multisets.begin(), multisets.end()), multisets.end());
    }

    auto premise_ok = [&](const Hypersequent& p) {
        if (!p.is_omega_hypersequent(omega)) return false;
        std::uint64_t total = 0;
        for (const auto& [s, mult] : p.distinct_components()) {
            total += mult;
            if (mult > wb.premise_multiplicity_cap) return false;
            if (s.antecedent.cardinality() > wb.premise_antecedent_cap) return false;
        }
        if (total > wb.premise_component_cap) return false;
        for (const Hypersequent& s : set)
            if (weak_reach_unchecked(s, p)) return true;
        return false;
    };

    std::set<Hypersequent> out;
    for (const RuleSchema& rule : calc.schemas()) {
        for (std::size_t fi = 0; fi < rule.forms.size(); fi++) {
            std::vector<std::string> msets, svars, fvars;
            auto scan = [&](const SchematicHypersequent& sh) {
                for (const SchematicComponent& c : sh.comps) {
                    for (const std::string& v : c.mset_vars) msets.push_back(v);
                    for (const SchemaFormula& t : c.terms) t.collect_fvars(fvars);
                    if (c.succ_kind == SchematicComponent::Succ::Var) svars.push_back(c.succ_var);
                    if (c.succ_kind == SchematicComponent::Succ::Term)
                        c.succ_term->collect_fvars(fvars);
                }
            };
            for (const auto& p : rule.forms[fi].premises) scan(p);
            scan(rule.forms[fi].conclusion);
            auto dedup = [](std::vector<std::string>& v) {
                std::sort(v.begin(), v.end());
                v.erase(std::unique(v.begin(), v.end()), v.end());
            };
            dedup(msets);
            dedup(svars);
            dedup(fvars);

            Instantiation inst;
            inst.form_index = fi;
            auto emit = [&]() {
                RuleInstance ri;
                try {
                    ri = instantiate(rule, inst);
                } catch (const std::invalid_argument&) {
                    return;
                }
                if (ri.conclusion.empty()) return;
                if (!conclusion_set.count(ri.conclusion)) return;
                for (const Hypersequent& p : ri.premises)
                    if (!premise_ok(p)) return;
                out.insert(ri.conclusion);
            };
            auto all_h = [&]() {
                for (const Hypersequent& h : hvals) {
                    inst.hyper = h;
                    emit();
                }
            };
            auto rec_m = [&](auto&& self, std::size_t i) -> void {
                if (i == msets.size()) {
                    all_h();
                    return;
                }
                for (const FormulaMultiset& m : multisets) {
                    inst.msets.insert_or_assign(msets[i], m);
                    self(self, i + 1);
                }
            };
            auto rec_s = [&](auto&& self, std::size_t i) -> void {
                if (i == svars.size()) {
                    rec_m(rec_m, 0);
                    return;
                }
                inst.succs.insert_or_assign(svars[i], std::optional<Formula>{});
                self(self, i + 1);
                for (std::size_t k = 0; k < omega.size(); k++) {
                    inst.succs.insert_or_assign(svars[i], omega.formula(k));
                    self(self, i + 1);
                }
            };
            auto rec_f = [&](auto&& self, std::size_t i) -> void {
                if (i == fvars.size()) {
                    rec_s(rec_s, 0);
                    return;
                }
                for (std::size_t k = 0; k < omega.size(); k++) {
                    inst.fvars.insert_or_assign(fvars[i], omega.formula(k));
                    self(self, i + 1);
                }
            };
            rec_f(rec_f, 0);
        }
    }
    return {out.begin(), out.end()};
}

inline WiBounds tiny_wi_bounds() {
    WiBounds wb;
    wb.conclusion_antecedent_cap = 2;
    wb.conclusion_multiplicity_cap = 1;
    wb.conclusion_component_cap = 2;
    wb.premise_antecedent_cap = 2;
    wb.premise_multiplicity_cap = 2;
    wb.premise_component_cap = 3;
    return wb;
}

}  // namespace hyperprover::testing

#endif
