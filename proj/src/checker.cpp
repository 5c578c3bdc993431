#include "hyperprover/checker.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <set>
#include <stdexcept>

namespace hyperprover {

// ── check_derivation ────────────────────────────────────────────────────────

namespace {

void collect_tree_formulas(const DerivationTree& t, std::vector<Formula>& out) {
    for (const Formula& f : t->conclusion.all_formulas()) out.push_back(f);
    for (const DerivationTree& p : t->premises) collect_tree_formulas(p, out);
}

bool check_node(const DerivationTree& t, const Calculus& calc, const OmegaSet& omega,
                CheckResult& result) {
    const RuleSchema* rule = calc.find(t->rule);
    if (!rule) {
        result = {false, t.get(), "rule '" + t->rule + "' is not in the calculus"};
        return false;
    }
    std::vector<std::string> kid_texts;
    for (const DerivationTree& p : t->premises) kid_texts.push_back(p->conclusion.text());
    std::sort(kid_texts.begin(), kid_texts.end());

    bool instance_found = false;
    for (const Instantiation& inst : match_conclusion(*rule, t->conclusion, omega)) {
        RuleInstance ri = instantiate(*rule, inst);
        std::vector<std::string> prem_texts;
        for (const Hypersequent& p : ri.premises) prem_texts.push_back(p.text());
        std::sort(prem_texts.begin(), prem_texts.end());
        if (prem_texts == kid_texts) {
            instance_found = true;
            break;
        }
    }
    if (!instance_found) {
        result = {false, t.get(),
                  "node is not the conclusion of a (" + t->rule + ") instance with these premises"};
        return false;
    }
    for (const DerivationTree& p : t->premises)
        if (!check_node(p, calc, omega, result)) return false;
    return true;
}

}  // namespace

CheckResult check_derivation(const DerivationTree& t, const Calculus& calc) {
    std::vector<Formula> formulas;
    collect_tree_formulas(t, formulas);
    OmegaSet omega = OmegaSet::closure(formulas);
    CheckResult result;
    check_node(t, calc, omega, result);
    return result;
}

// ── brute_closure ───────────────────────────────────────────────────────────
// Everything here is deliberately naive: instantiations are enumerated
// directly from the schema variables, with only a size budget for pruning.

namespace {

struct BruteUniverse {
    std::vector<Hypersequent> members;
    std::set<Hypersequent> index;
    std::vector<FormulaMultiset> antecedents;  // all multisets within the size budget

    bool contains(const Hypersequent& h) const { return index.count(h) > 0; }
};

BruteUniverse build_universe(const OmegaSet& omega, std::uint64_t size_cap,
                             std::uint64_t guard) {
    BruteUniverse u;
    // antecedent multisets whose formula symbols fit in the budget
    FormulaMultiset cur;
    auto rec = [&](auto&& self, std::size_t idx, std::uint64_t used) -> void {
        u.antecedents.push_back(cur);
        for (std::size_t i = idx; i < omega.size(); i++) {
            std::uint64_t cost = static_cast<std::uint64_t>(omega.formula(i).symbol_count());
            if (used + cost > size_cap) continue;
            cur.add(omega.formula(i));
            self(self, i, used + cost);
            cur.remove(omega.formula(i));
        }
    };
    rec(rec, 0, 0);

    std::vector<Sequent> sequents;
    for (const FormulaMultiset& a : u.antecedents) {
        Sequent s{a, std::nullopt};
        if (static_cast<std::uint64_t>(s.symbol_size()) <= size_cap) sequents.push_back(s);
        for (std::size_t i = 0; i < omega.size(); i++) {
            Sequent t{a, omega.formula(i)};
            if (static_cast<std::uint64_t>(t.symbol_size()) <= size_cap) sequents.push_back(t);
        }
    }

    std::vector<Sequent> comps;
    auto rec_h = [&](auto&& self, std::size_t idx, std::uint64_t used) -> void {
        u.members.push_back(Hypersequent(comps));
        if (u.members.size() > guard)
            throw std::runtime_error("brute_closure universe exceeds guard of " +
                                     std::to_string(guard));
        for (std::size_t i = idx; i < sequents.size(); i++) {
            std::uint64_t cost = static_cast<std::uint64_t>(sequents[i].symbol_size()) +
                                 (comps.empty() ? 0 : 1);
            if (used + cost > size_cap) continue;
            comps.push_back(sequents[i]);
            self(self, i, used + cost);
            comps.pop_back();
        }
    };
    rec_h(rec_h, 0, 0);
    std::sort(u.members.begin(), u.members.end());
    u.members.erase(std::unique(u.members.begin(), u.members.end()), u.members.end());
    u.index.insert(u.members.begin(), u.members.end());
    return u;
}

// Enumerate full instantiations of a rule form over the bounded universe and
// report every instance whose conclusion stays inside it.
void for_each_instance(const RuleSchema& rule, std::size_t form_index, const OmegaSet& omega,
                       const BruteUniverse& u, std::uint64_t size_cap,
                       const std::function<void(const RuleInstance&)>& visit) {
    const RuleForm& form = rule.forms[form_index];
    std::vector<std::string> msets, svars, fvars;
    {
        // local copy of the collector to stay independent of engine internals
        auto scan = [&](const SchematicHypersequent& sh) {
            for (const SchematicComponent& c : sh.comps) {
                for (const std::string& v : c.mset_vars) msets.push_back(v);
                for (const SchemaFormula& t : c.terms) t.collect_fvars(fvars);
                if (c.succ_kind == SchematicComponent::Succ::Var) svars.push_back(c.succ_var);
                if (c.succ_kind == SchematicComponent::Succ::Term)
                    c.succ_term->collect_fvars(fvars);
            }
        };
        for (const SchematicHypersequent& p : form.premises) scan(p);
        scan(form.conclusion);
        auto dedup = [](std::vector<std::string>& v) {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        };
        dedup(msets);
        dedup(svars);
        dedup(fvars);
    }

    bool form_has_hvar = form.conclusion.has_hvar;
    for (const SchematicHypersequent& p : form.premises)
        form_has_hvar = form_has_hvar || p.has_hvar;

    Instantiation inst;
    inst.form_index = form_index;

    // The conclusion carries every multiset variable once and all of H, so
    // their sizes give a lower bound used to prune the enumeration.
    auto multiset_symbols = [](const FormulaMultiset& m) {
        std::uint64_t n = 0;
        for (const Formula& f : m.occurrences()) n += static_cast<std::uint64_t>(f.symbol_count());
        return n;
    };

    auto rec_fvars = [&](auto&& self, std::size_t i) -> void {
        if (i < fvars.size()) {
            for (std::size_t k = 0; k < omega.size(); k++) {
                inst.fvars.insert_or_assign(fvars[i], omega.formula(k));
                self(self, i + 1);
            }
            inst.fvars.erase(fvars[i]);
            return;
        }
        auto rec_svars = [&](auto&& sself, std::size_t j) -> void {
            if (j < svars.size()) {
                inst.succs[svars[j]] = std::nullopt;
                sself(sself, j + 1);
                for (std::size_t k = 0; k < omega.size(); k++) {
                    inst.succs[svars[j]] = omega.formula(k);
                    sself(sself, j + 1);
                }
                inst.succs.erase(svars[j]);
                return;
            }
            auto rec_msets = [&](auto&& mself, std::size_t mi, std::uint64_t used) -> void {
                if (mi < msets.size()) {
                    for (const FormulaMultiset& a : u.antecedents) {
                        std::uint64_t cost = multiset_symbols(a);
                        if (used + cost > size_cap) continue;
                        inst.msets[msets[mi]] = a;
                        mself(mself, mi + 1, used + cost);
                    }
                    inst.msets.erase(msets[mi]);
                    return;
                }
                auto emit = [&]() {
                    RuleInstance ri;
                    try {
                        ri = instantiate(rule, inst);
                    } catch (const std::invalid_argument&) {
                        return;
                    }
                    if (static_cast<std::uint64_t>(ri.conclusion.symbol_size()) > size_cap)
                        return;
                    if (!u.contains(ri.conclusion)) return;
                    visit(ri);
                };
                if (form_has_hvar) {
                    for (const Hypersequent& h : u.members) {
                        if (used + static_cast<std::uint64_t>(h.symbol_size()) > size_cap)
                            continue;
                        inst.hyper = h;
                        emit();
                    }
                    inst.hyper = Hypersequent{};
                } else {
                    emit();
                }
            };
            rec_msets(rec_msets, 0, 0);
        };
        rec_svars(rec_svars, 0);
    };
    rec_fvars(rec_fvars, 0);
}

}  // namespace

std::vector<Hypersequent> brute_closure(const OmegaSet& omega, const Calculus& calc,
                                        std::uint64_t size_cap, std::uint64_t depth_cap,
                                        std::uint64_t universe_guard) {
    BruteUniverse universe = build_universe(omega, size_cap, universe_guard);

    std::set<Hypersequent> derived;
    for (std::uint64_t depth = 0; depth < depth_cap; depth++) {
        std::set<Hypersequent> next = derived;
        for (const RuleSchema& rule : calc.schemas()) {
            for (std::size_t fi = 0; fi < rule.forms.size(); fi++) {
                for_each_instance(rule, fi, omega, universe, size_cap,
                                  [&](const RuleInstance& ri) {
                                      for (const Hypersequent& p : ri.premises)
                                          if (!derived.count(p)) return;
                                      next.insert(ri.conclusion);
                                  });
            }
        }
        if (next.size() == derived.size()) break;
        derived = std::move(next);
    }
    return {derived.begin(), derived.end()};
}

// ── eval_chain ──────────────────────────────────────────────────────────────

namespace {

int chain_eval_rec(const Formula& f, const ChainModel& m,
                   const std::map<std::string, int>& assignment) {
    const int denom = m.size - 1;
    switch (f.kind()) {
        case FormulaKind::Var: return assignment.at(f.var_name());
        case FormulaKind::Top:
        case FormulaKind::One: return denom;
        case FormulaKind::Bot:
        case FormulaKind::Zero: return 0;
        default: break;
    }
    int a = chain_eval_rec(f.left(), m, assignment);
    int b = chain_eval_rec(f.right(), m, assignment);
    switch (f.kind()) {
        case FormulaKind::And: return std::min(a, b);
        case FormulaKind::Or: return std::max(a, b);
        case FormulaKind::Fuse:
            return m.kind == ChainModel::Kind::Lukasiewicz ? std::max(0, a + b - denom)
                                                           : std::min(a, b);
        case FormulaKind::Imp:
            if (a <= b) return denom;
            return m.kind == ChainModel::Kind::Lukasiewicz ? denom - a + b : b;
        default: return 0;
    }
}

}  // namespace

ChainEval eval_chain(const Formula& f, const ChainModel& m) {
    if (m.size < 2) throw std::invalid_argument("chain model needs size >= 2");
    std::vector<std::string> vars;
    for (const Formula& g : subformulas(f))
        if (g.kind() == FormulaKind::Var) vars.push_back(g.var_name());
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());

    ChainEval best;
    best.denom = m.size - 1;
    best.value = best.denom + 1;  // above everything

    std::map<std::string, int> assignment;
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == vars.size()) {
            int v = chain_eval_rec(f, m, assignment);
            if (v < best.value) {
                best.value = v;
                best.assignment = assignment;
            }
            return;
        }
        for (int v = 0; v < m.size; v++) {
            assignment[vars[i]] = v;
            self(self, i + 1);
        }
        assignment.erase(vars[i]);
    };
    rec(rec, 0);
    best.valid = best.value == best.denom;
    return best;
}

}  // namespace hyperprover
