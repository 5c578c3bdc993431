#include "hyperprover/forward.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <ostream>
#include <set>

#include <json.hpp>

namespace hyperprover {

const char* verdict_name(Verdict v) noexcept {
    switch (v) {
        case Verdict::Derivable: return "DERIVABLE";
        case Verdict::NotDerivable: return "NOT_DERIVABLE";
        case Verdict::Indeterminate: return "INDETERMINATE";
    }
    return "?";
}

// ── Bounds ──────────────────────────────────────────────────────────────────

namespace {

constexpr std::uint64_t kSat = std::numeric_limits<std::uint64_t>::max();

// C(n + k, k), saturating.
std::uint64_t binom_saturating(std::uint64_t n, std::uint64_t k) {
    std::uint64_t result = 1;
    for (std::uint64_t i = 1; i <= k; i++) {
        __uint128_t next = static_cast<__uint128_t>(result) * (n + i);
        next /= i;
        if (next > kSat) return kSat;
        result = static_cast<std::uint64_t>(next);
        if (result == kSat) return kSat;
    }
    return result;
}

}  // namespace

Bounds Bounds::compute(std::uint64_t set_size_max, std::uint64_t calc_size_max,
                       std::uint64_t omega_size) {
    Bounds b;
    b.multiplicity_cap = calc_size_max;
    b.antecedent_cap = saturating_mul(saturating_mul(set_size_max, calc_size_max), omega_size);
    b.slim_cap = saturating_mul(b.antecedent_cap, calc_size_max);
    // multisets over omega of cardinality <= slim_cap, times the succedents
    std::uint64_t multisets = binom_saturating(b.slim_cap, omega_size);
    b.n_slim = saturating_mul(multisets, saturating_add(omega_size, 1));
    b.premise_component_cap =
        saturating_add(calc_size_max, saturating_mul(b.n_slim, calc_size_max));
    b.premise_multiplicity_cap = b.premise_component_cap;
    return b;
}

// ── Initial set ─────────────────────────────────────────────────────────────

namespace {

void collect_form_vars(const RuleForm& form, std::vector<std::string>& msets,
                       std::vector<std::string>& svars, std::vector<std::string>& fvars) {
    auto scan = [&](const SchematicHypersequent& sh) {
        for (const SchematicComponent& c : sh.comps) {
            for (const std::string& v : c.mset_vars) msets.push_back(v);
            for (const SchemaFormula& t : c.terms) t.collect_fvars(fvars);
            if (c.succ_kind == SchematicComponent::Succ::Var) svars.push_back(c.succ_var);
            if (c.succ_kind == SchematicComponent::Succ::Term) c.succ_term->collect_fvars(fvars);
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

}  // namespace

std::vector<Hypersequent> initial_set(const OmegaSet& omega, const Calculus& calc) {
    std::set<Hypersequent> out;
    for (const RuleSchema& r : calc.schemas()) {
        if (r.kind != RuleKind::Initial) continue;
        for (std::size_t fi = 0; fi < r.forms.size(); fi++) {
            std::vector<std::string> msets, svars, fvars;
            collect_form_vars(r.forms[fi], msets, svars, fvars);

            // Formula-variables range over omega, succedent-variables over
            // omega or empty, multiset- and hypersequent-variables are empty.
            std::vector<std::size_t> fpick(fvars.size(), 0);
            while (true) {
                if (!fvars.empty() && omega.size() == 0) break;
                std::vector<std::size_t> spick(svars.size(), 0);  // 0 = empty, i+1 = formula i
                while (true) {
                    Instantiation inst;
                    inst.form_index = fi;
                    for (const std::string& v : msets) inst.msets[v] = FormulaMultiset{};
                    for (std::size_t i = 0; i < fvars.size(); i++)
                        inst.fvars.insert_or_assign(fvars[i], omega.formula(fpick[i]));
                    for (std::size_t i = 0; i < svars.size(); i++)
                        inst.succs[svars[i]] = spick[i] == 0
                                                   ? std::optional<Formula>{}
                                                   : std::optional<Formula>{omega.formula(spick[i] - 1)};
                    out.insert(instantiate(r, inst).conclusion);
                    // advance succedent counter
                    std::size_t i = 0;
                    for (; i < svars.size(); i++) {
                        if (++spick[i] <= omega.size()) break;
                        spick[i] = 0;
                    }
                    if (i == svars.size()) break;
                }
                // advance formula counter
                std::size_t i = 0;
                for (; i < fvars.size(); i++) {
                    if (++fpick[i] < omega.size()) break;
                    fpick[i] = 0;
                }
                if (i == fvars.size()) break;
            }
        }
    }
    return {out.begin(), out.end()};
}

// ── wi_cover: variable-minimal one-step candidates ──────────────────────────

namespace {

// Minimal vectors x with sum_i w_i * x_i >= need (no坐标 reducible).
void minimal_covers(const std::vector<std::uint32_t>& w, std::uint32_t need, std::size_t i,
                    std::vector<std::uint32_t>& cur, std::vector<std::vector<std::uint32_t>>& out) {
    if (i == w.size()) {
        std::uint32_t sum = 0;
        for (std::size_t j = 0; j < w.size(); j++) sum += w[j] * cur[j];
        if (sum < need) return;
        for (std::size_t j = 0; j < w.size(); j++)
            if (cur[j] > 0 && sum - w[j] >= need) return;  // not minimal
        out.push_back(cur);
        return;
    }
    std::uint32_t limit = w[i] == 0 ? 0 : (need + w[i] - 1) / w[i];
    for (std::uint32_t v = 0; v <= limit; v++) {
        cur[i] = v;
        minimal_covers(w, need, i + 1, cur, out);
    }
    cur[i] = 0;
}

struct SlotVars {
    std::vector<std::string> vars;
    std::vector<std::uint32_t> weights;
};

SlotVars slot_vars(const SchematicComponent& sc) {
    SlotVars sv;
    for (const std::string& v : sc.mset_vars) {
        auto it = std::find(sv.vars.begin(), sv.vars.end(), v);
        if (it == sv.vars.end()) {
            sv.vars.push_back(v);
            sv.weights.push_back(1);
        } else {
            sv.weights[static_cast<std::size_t>(it - sv.vars.begin())]++;
        }
    }
    return sv;
}

struct WiGenerator {
    const std::vector<SaturationElement>& elements;
    std::size_t new_begin;
    const OmegaSet& omega;
    const Calculus& calc;

    std::vector<WiCandidate> out;
    std::set<std::string> seen;

    const RuleSchema* rule = nullptr;
    const RuleForm* form = nullptr;
    std::size_t form_index = 0;

    std::vector<std::size_t> witness;
    // per premise: distinct components of the witness
    std::vector<std::vector<std::pair<Sequent, std::uint32_t>>> wcomps;
    // per premise, per component: assigned slot (-1 = hosted by H)
    std::vector<std::vector<int>> slot_of;

    void run() {
        for (const RuleSchema& r : calc.schemas()) {
            if (r.kind == RuleKind::Initial) continue;
            // Weak structural conclusions are always covered by their own
            // premise witness, so they never survive the derivability filter.
            if (r.name == "lw" || r.name == "EC" || r.name == "EW") continue;
            rule = &r;
            for (form_index = 0; form_index < r.forms.size(); form_index++) {
                form = &r.forms[form_index];
                witness.assign(form->premises.size(), 0);
                pick_witness(0, false);
            }
        }
    }

    void pick_witness(std::size_t k, bool any_new) {
        if (k == form->premises.size()) {
            if (!any_new && new_begin > 0) return;
            wcomps.clear();
            slot_of.assign(form->premises.size(), {});
            for (std::size_t i = 0; i < form->premises.size(); i++) {
                wcomps.push_back(elements[witness[i]].h.distinct_components());
                slot_of[i].assign(wcomps.back().size(), -1);
            }
            assign_comp(0, 0);
            return;
        }
        for (std::size_t i = 0; i < elements.size(); i++) {
            witness[k] = i;
            pick_witness(k + 1, any_new || i >= new_begin);
        }
    }

    static bool slot_succ_feasible(const SchematicComponent& sc, const Sequent& comp) {
        switch (sc.succ_kind) {
            case SchematicComponent::Succ::Empty: return !comp.succedent.has_value();
            case SchematicComponent::Succ::Var: return true;
            case SchematicComponent::Succ::Term: {
                if (!comp.succedent) return false;
                std::map<std::string, Formula> scratch;
                return sc.succ_term->unify(*comp.succedent, scratch);
            }
        }
        return false;
    }

    void assign_comp(std::size_t k, std::size_t ci) {
        if (k == form->premises.size()) {
            solve_assignment();
            return;
        }
        const SchematicHypersequent& prem = form->premises[k];
        if (ci == wcomps[k].size()) {
            // Require at least one explicitly placed component per witness;
            // fully hosted witnesses dominate the conclusion themselves.
            bool any_explicit = wcomps[k].empty();
            for (int s : slot_of[k]) any_explicit |= (s >= 0);
            if (!any_explicit) return;
            assign_comp(k + 1, 0);
            return;
        }
        const Sequent& comp = wcomps[k][ci].first;
        for (std::size_t m = 0; m < prem.comps.size(); m++) {
            if (!slot_succ_feasible(prem.comps[m], comp)) continue;
            slot_of[k][ci] = static_cast<int>(m);
            assign_comp(k, ci + 1);
        }
        if (prem.has_hvar) {
            slot_of[k][ci] = -1;
            assign_comp(k, ci + 1);
        }
    }

    void solve_assignment() {
        // Bind succedent- and formula-variables from the placed components.
        std::map<std::string, Formula> fvars;
        std::map<std::string, std::optional<Formula>> svars;
        for (std::size_t k = 0; k < form->premises.size(); k++) {
            const SchematicHypersequent& prem = form->premises[k];
            for (std::size_t ci = 0; ci < wcomps[k].size(); ci++) {
                int m = slot_of[k][ci];
                if (m < 0) continue;
                const SchematicComponent& sc = prem.comps[static_cast<std::size_t>(m)];
                const Sequent& comp = wcomps[k][ci].first;
                switch (sc.succ_kind) {
                    case SchematicComponent::Succ::Empty:
                        break;
                    case SchematicComponent::Succ::Var: {
                        auto [it, inserted] = svars.emplace(sc.succ_var, comp.succedent);
                        if (!inserted && it->second != comp.succedent) return;
                        break;
                    }
                    case SchematicComponent::Succ::Term:
                        if (!sc.succ_term->unify(*comp.succedent, fvars)) return;
                        break;
                }
            }
        }

        std::vector<std::string> all_msets, all_svars, all_fvars;
        collect_form_vars(*form, all_msets, all_svars, all_fvars);

        std::vector<std::string> free_svars, free_fvars;
        for (const std::string& v : all_svars)
            if (!svars.count(v)) free_svars.push_back(v);
        for (const std::string& v : all_fvars)
            if (!fvars.count(v)) free_fvars.push_back(v);

        enumerate_free(fvars, svars, all_msets, free_svars, free_fvars, 0);
    }

    void enumerate_free(std::map<std::string, Formula>& fvars,
                        std::map<std::string, std::optional<Formula>>& svars,
                        const std::vector<std::string>& all_msets,
                        const std::vector<std::string>& free_svars,
                        const std::vector<std::string>& free_fvars, std::size_t idx) {
        if (idx < free_fvars.size()) {
            for (std::size_t i = 0; i < omega.size(); i++) {
                fvars.insert_or_assign(free_fvars[idx], omega.formula(i));
                enumerate_free(fvars, svars, all_msets, free_svars, free_fvars, idx + 1);
            }
            fvars.erase(free_fvars[idx]);
            return;
        }
        std::size_t sidx = idx - free_fvars.size();
        if (sidx < free_svars.size()) {
            svars[free_svars[sidx]] = std::nullopt;
            enumerate_free(fvars, svars, all_msets, free_svars, free_fvars, idx + 1);
            for (std::size_t i = 0; i < omega.size(); i++) {
                svars[free_svars[sidx]] = omega.formula(i);
                enumerate_free(fvars, svars, all_msets, free_svars, free_fvars, idx + 1);
            }
            svars.erase(free_svars[sidx]);
            return;
        }
        finish_bindings(fvars, svars, all_msets);
    }

    void finish_bindings(const std::map<std::string, Formula>& fvars,
                         const std::map<std::string, std::optional<Formula>>& svars,
                         const std::vector<std::string>& all_msets) {
        // Vocabulary filter: variable images and every term instance in omega.
        for (const auto& [v, f] : fvars)
            if (!omega.contains(f)) return;
        for (const auto& [v, f] : svars)
            if (f && !omega.contains(*f)) return;

        auto term_ok = [&](const SchematicHypersequent& sh) {
            for (const SchematicComponent& c : sh.comps) {
                for (const SchemaFormula& t : c.terms)
                    if (!omega.contains(t.instantiate(fvars))) return false;
                if (c.succ_kind == SchematicComponent::Succ::Term &&
                    !omega.contains(c.succ_term->instantiate(fvars)))
                    return false;
            }
            return true;
        };
        for (const SchematicHypersequent& p : form->premises)
            if (!term_ok(p)) return;
        if (!term_ok(form->conclusion)) return;

        // Per-slot demands.
        struct Slot {
            std::size_t prem, comp;
            SlotVars sv;
            FormulaMultiset fixed;
            FormulaMultiset demand;
        };
        std::vector<Slot> slots;
        for (std::size_t k = 0; k < form->premises.size(); k++)
            for (std::size_t m = 0; m < form->premises[k].comps.size(); m++) {
                Slot s;
                s.prem = k;
                s.comp = m;
                const SchematicComponent& sc = form->premises[k].comps[m];
                s.sv = slot_vars(sc);
                for (const SchemaFormula& t : sc.terms) s.fixed.add(t.instantiate(fvars));
                slots.push_back(std::move(s));
            }
        for (std::size_t k = 0; k < form->premises.size(); k++)
            for (std::size_t ci = 0; ci < wcomps[k].size(); ci++) {
                int m = slot_of[k][ci];
                if (m < 0) continue;
                for (Slot& s : slots)
                    if (s.prem == k && s.comp == static_cast<std::size_t>(m)) {
                        FormulaMultiset d =
                            wcomps[k][ci].first.antecedent.minus_truncated(s.fixed);
                        s.demand = s.demand.pointwise_max(d);
                    }
            }
        for (const Slot& s : slots)
            if (s.sv.vars.empty() && !s.demand.empty()) return;

        // Enumerate minimal covers per slot and combine shared variables by
        // pointwise max.
        std::map<std::string, FormulaMultiset> assignment;
        cover_slots(slots, 0, assignment, fvars, svars, all_msets);
    }

    template <typename SlotT>
    void cover_slots(const std::vector<SlotT>& slots, std::size_t si,
                     std::map<std::string, FormulaMultiset>& assignment,
                     const std::map<std::string, Formula>& fvars,
                     const std::map<std::string, std::optional<Formula>>& svars,
                     const std::vector<std::string>& all_msets) {
        if (si == slots.size()) {
            emit(assignment, fvars, svars, all_msets);
            return;
        }
        const SlotT& s = slots[si];
        std::vector<Formula> support = s.demand.support();
        if (support.empty() || s.sv.vars.empty()) {
            cover_slots(slots, si + 1, assignment, fvars, svars, all_msets);
            return;
        }
        // choices per formula
        std::vector<std::vector<std::vector<std::uint32_t>>> choices;
        for (const Formula& f : support) {
            std::vector<std::vector<std::uint32_t>> opts;
            std::vector<std::uint32_t> cur(s.sv.vars.size(), 0);
            minimal_covers(s.sv.weights, s.demand.count(f), 0, cur, opts);
            if (opts.empty()) return;
            choices.push_back(std::move(opts));
        }
        std::vector<std::size_t> pick(support.size(), 0);
        while (true) {
            std::map<std::string, FormulaMultiset> saved = assignment;
            for (std::size_t fi = 0; fi < support.size(); fi++)
                for (std::size_t vi = 0; vi < s.sv.vars.size(); vi++) {
                    std::uint32_t cnt = choices[fi][pick[fi]][vi];
                    if (cnt == 0) continue;
                    FormulaMultiset add;
                    add.add(support[fi], cnt);
                    auto& slotvar = assignment[s.sv.vars[vi]];
                    slotvar = slotvar.pointwise_max(add);
                }
            cover_slots(slots, si + 1, assignment, fvars, svars, all_msets);
            assignment = std::move(saved);
            std::size_t fi = 0;
            for (; fi < support.size(); fi++) {
                if (++pick[fi] < choices[fi].size()) break;
                pick[fi] = 0;
            }
            if (fi == support.size()) break;
        }
    }

    void emit(const std::map<std::string, FormulaMultiset>& assignment,
              const std::map<std::string, Formula>& fvars,
              const std::map<std::string, std::optional<Formula>>& svars,
              const std::vector<std::string>& all_msets) {
        Instantiation inst;
        inst.form_index = form_index;
        inst.fvars = fvars;
        inst.succs = svars;
        for (const std::string& v : all_msets) {
            auto it = assignment.find(v);
            inst.msets[v] = it == assignment.end() ? FormulaMultiset{} : it->second;
        }
        // H hosts the unplaced witness components.
        std::vector<Sequent> hosted;
        for (std::size_t k = 0; k < form->premises.size(); k++)
            for (std::size_t ci = 0; ci < wcomps[k].size(); ci++)
                if (slot_of[k][ci] < 0) hosted.push_back(wcomps[k][ci].first);
        inst.hyper = Hypersequent(std::move(hosted)).support();

        RuleInstance ri = instantiate(*rule, inst);
        for (std::size_t k = 0; k < ri.premises.size(); k++) {
            assert(weak_reach_unchecked(elements[witness[k]].h, ri.premises[k]));
            (void)k;
        }
        if (!ri.conclusion.is_omega_hypersequent(omega)) return;

        Hypersequent canonical = ri.conclusion.support();
        if (!seen.insert(canonical.text()).second) return;

        Provenance prov;
        prov.initial = false;
        prov.rule = rule->name;
        prov.inst = inst;
        prov.premise_sources.assign(witness.begin(), witness.end());
        prov.raw_conclusion = ri.conclusion;
        out.push_back({std::move(canonical), std::move(prov)});
    }
};

}  // namespace

std::vector<WiCandidate> wi_cover(const std::vector<SaturationElement>& elements,
                                  std::size_t new_begin, const OmegaSet& omega,
                                  const Calculus& calc) {
    WiGenerator gen{elements, new_begin, omega, calc, {}, {}, nullptr, nullptr, 0, {}, {}, {}};
    gen.run();
    return std::move(gen.out);
}

// ── Universe enumeration and literal WI ─────────────────────────────────────

std::vector<Hypersequent> enumerate_universe(const OmegaSet& omega, std::uint64_t antecedent_cap,
                                             std::uint64_t multiplicity_cap,
                                             std::uint64_t component_cap, std::uint64_t guard) {
    // all antecedent multisets of cardinality <= antecedent_cap
    std::vector<FormulaMultiset> antecedents;
    FormulaMultiset cur;
    auto rec_ante = [&](auto&& self, std::size_t idx, std::uint64_t left) -> void {
        antecedents.push_back(cur);
        if (left == 0) return;
        for (std::size_t i = idx; i < omega.size(); i++) {
            cur.add(omega.formula(i));
            self(self, i, left - 1);
            cur.remove(omega.formula(i));
        }
    };
    rec_ante(rec_ante, 0, antecedent_cap);
    std::sort(antecedents.begin(), antecedents.end());
    antecedents.erase(std::unique(antecedents.begin(), antecedents.end()), antecedents.end());

    std::vector<Sequent> sequents;
    for (const FormulaMultiset& a : antecedents) {
        sequents.push_back({a, std::nullopt});
        for (std::size_t i = 0; i < omega.size(); i++) sequents.push_back({a, omega.formula(i)});
    }
    std::sort(sequents.begin(), sequents.end());

    std::vector<Hypersequent> out;
    std::vector<Sequent> comps;
    auto rec_hyp = [&](auto&& self, std::size_t idx, std::uint64_t left) -> void {
        out.push_back(Hypersequent(comps));
        if (out.size() > guard)
            throw std::runtime_error("universe enumeration exceeds guard of " +
                                     std::to_string(guard) + " hypersequents");
        if (left == 0) return;
        for (std::size_t i = idx; i < sequents.size(); i++) {
            for (std::uint64_t m = 1; m <= std::min<std::uint64_t>(multiplicity_cap, left); m++) {
                for (std::uint64_t j = 0; j < m; j++) comps.push_back(sequents[i]);
                self(self, i + 1, left - m);
                for (std::uint64_t j = 0; j < m; j++) comps.pop_back();
            }
        }
    };
    rec_hyp(rec_hyp, 0, component_cap);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

WiBounds WiBounds::from(const Bounds& b) {
    WiBounds wb;
    wb.conclusion_antecedent_cap = b.antecedent_cap;
    wb.conclusion_multiplicity_cap = b.multiplicity_cap;
    wb.conclusion_component_cap = kSat;
    wb.premise_antecedent_cap = b.slim_cap;
    wb.premise_multiplicity_cap = b.premise_multiplicity_cap;
    wb.premise_component_cap = b.premise_component_cap;
    return wb;
}

namespace {

bool within_premise_caps(const Hypersequent& p, const WiBounds& wb) {
    std::uint64_t total = 0;
    for (const auto& [s, mult] : p.distinct_components()) {
        total += mult;
        if (mult > wb.premise_multiplicity_cap) return false;
        if (s.antecedent.cardinality() > wb.premise_antecedent_cap) return false;
    }
    return total <= wb.premise_component_cap;
}

}  // namespace

std::vector<Hypersequent> compute_wi(const std::vector<Hypersequent>& set, const OmegaSet& omega,
                                     const Calculus& calc, const WiBounds& wb) {
    std::vector<Hypersequent> universe =
        enumerate_universe(omega, wb.conclusion_antecedent_cap, wb.conclusion_multiplicity_cap,
                           wb.conclusion_component_cap, wb.universe_guard);
    std::vector<Hypersequent> out;
    for (const Hypersequent& h : universe) {
        if (h.empty()) continue;
        bool in_wi = false;
        for (const RuleSchema& r : calc.schemas()) {
            for (const Instantiation& inst : match_conclusion(r, h, omega)) {
                RuleInstance ri = instantiate(r, inst);
                bool ok = true;
                for (const Hypersequent& p : ri.premises) {
                    if (!p.is_omega_hypersequent(omega) || !within_premise_caps(p, wb)) {
                        ok = false;
                        break;
                    }
                    bool covered = false;
                    for (const Hypersequent& s : set)
                        if (weak_reach_unchecked(s, p)) {
                            covered = true;
                            break;
                        }
                    if (!covered) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    in_wi = true;
                    break;
                }
            }
            if (in_wi) break;
        }
        if (in_wi) out.push_back(h);
    }
    return out;
}

// ── Saturation ──────────────────────────────────────────────────────────────

namespace {

OmegaSet omega_with_constants(const OmegaSet& omega) {
    std::vector<Formula> seeds = omega.formulas();
    seeds.push_back(Formula::top());
    seeds.push_back(Formula::bot());
    seeds.push_back(Formula::one());
    seeds.push_back(Formula::zero());
    return OmegaSet::closure(seeds);
}

nlohmann::json bounds_json(const Bounds& b) {
    return {{"antecedent_cap", b.antecedent_cap},
            {"multiplicity_cap", b.multiplicity_cap},
            {"slim_cap", b.slim_cap},
            {"n_slim", b.n_slim},
            {"premise_component_cap", b.premise_component_cap},
            {"premise_multiplicity_cap", b.premise_multiplicity_cap}};
}

}  // namespace

std::vector<Hypersequent> SaturationState::member_set() const {
    std::vector<Hypersequent> out;
    out.reserve(elements.size());
    for (const SaturationElement& e : elements) out.push_back(e.h);
    return out;
}

SaturationState saturate(const OmegaSet& omega, const Calculus& calc,
                         const SaturateOptions& opts) {
    if (!calc.contains("lw"))
        throw std::invalid_argument("forward saturation requires a calculus containing (lw)");

    SaturationState state;
    state.omega = omega;
    state.calculus = calc;

    OmegaSet record_vocab = omega_with_constants(omega);
    state.record.tuple_len = record_vocab.size();
    state.record.group_count = record_vocab.size() + 1;
    state.record.control = ControlFunction::exp_pow(2);

    auto covered = [&](const Hypersequent& target, std::size_t from) -> std::optional<std::size_t> {
        for (std::size_t i = from; i < state.elements.size(); i++)
            if (weak_reach_unchecked(state.elements[i].h, target)) return i;
        return std::nullopt;
    };

    const std::uint64_t calc_max = static_cast<std::uint64_t>(schema_size_max(calc));
    auto start_time = std::chrono::steady_clock::now();

    // Round 0: the initial set.
    for (Hypersequent& h : initial_set(omega, calc)) {
        Provenance prov;
        prov.initial = true;
        prov.rule = "initial";
        prov.raw_conclusion = h;
        state.elements.push_back({std::move(h), std::move(prov), 0});
    }
    std::uint64_t set_max = 1;
    std::uint64_t record_start = 1;
    for (const SaturationElement& e : state.elements) {
        set_max = std::max<std::uint64_t>(set_max, static_cast<std::uint64_t>(e.h.symbol_size()));
        PowVector enc = encode_sharp(e.h, record_vocab);
        record_start = std::max(record_start, norm(std::span<const PowSet>(enc.groups)));
        state.record.push(std::move(enc.groups));
    }
    state.record.start = record_start;

    {
        RoundStats rs;
        rs.round = 0;
        rs.set_size = state.elements.size();
        rs.added = state.elements.size();
        rs.set_size_max = set_max;
        rs.bounds = Bounds::compute(set_max, calc_max, omega.size());
        rs.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                               start_time)
                         .count();
        if (opts.stats_stream) {
            nlohmann::json j{{"round", rs.round},
                             {"set_size", rs.set_size},
                             {"set_size_max", rs.set_size_max},
                             {"added", rs.added},
                             {"bounds", bounds_json(rs.bounds)},
                             {"wall_ms", rs.wall_ms}};
            (*opts.stats_stream) << j.dump() << "\n";
        }
        state.rounds.push_back(rs);
    }

    if (opts.target) {
        state.witness = covered(*opts.target, 0);
        if (state.witness && !opts.full_fixpoint) return state;
    }

    std::size_t new_begin = 0;
    for (std::size_t round = 1; round <= opts.max_rounds; round++) {
        if (opts.deadline && std::chrono::steady_clock::now() > *opts.deadline) {
            state.fixpoint = false;
            return state;
        }
        auto round_start = std::chrono::steady_clock::now();
        Bounds bounds = Bounds::compute(set_max, calc_max, omega.size());

        std::vector<WiCandidate> cands = wi_cover(state.elements, new_begin, omega, calc);
        new_begin = state.elements.size();

        // The derivability-set filter: drop candidates already covered by the
        // current set.
        std::vector<WiCandidate> fresh;
        for (WiCandidate& c : cands) {
            bool dominated = false;
            for (const SaturationElement& e : state.elements)
                if (weak_reach_unchecked(e.h, c.h)) {
                    dominated = true;
                    break;
                }
            if (!dominated) fresh.push_back(std::move(c));
        }
        std::sort(fresh.begin(), fresh.end(),
                  [](const WiCandidate& a, const WiCandidate& b) { return a.h < b.h; });

        // Keep only a covering antichain of this round's additions.
        std::vector<WiCandidate> kept;
        for (std::size_t i = 0; i < fresh.size(); i++) {
            bool drop = false;
            for (std::size_t j = 0; j < fresh.size() && !drop; j++) {
                if (i == j) continue;
                bool ji = weak_reach_unchecked(fresh[j].h, fresh[i].h);
                if (!ji) continue;
                bool ij = weak_reach_unchecked(fresh[i].h, fresh[j].h);
                if (!ij || j < i) drop = true;  // strictly covered, or an equivalent earlier twin
            }
            if (!drop) kept.push_back(fresh[i]);
        }

        for (WiCandidate& c : kept) {
            // Emitted WI members must be S-thin for the current bounds.
            for (const auto& [s, mult] : c.h.distinct_components()) {
                if (s.antecedent.cardinality() > bounds.antecedent_cap ||
                    mult > bounds.multiplicity_cap)
                    state.thin_violations++;
            }
            set_max =
                std::max<std::uint64_t>(set_max, static_cast<std::uint64_t>(c.h.symbol_size()));
            PowVector enc = encode_sharp(c.h, record_vocab);
            state.record.push(std::move(enc.groups));
            state.elements.push_back({std::move(c.h), std::move(c.prov), round});
        }

        RoundStats rs;
        rs.round = round;
        rs.set_size = state.elements.size();
        rs.set_size_max = set_max;
        rs.added = kept.size();
        rs.bounds = bounds;
        rs.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                               round_start)
                         .count();
        state.rounds.push_back(rs);
        if (opts.stats_stream) {
            nlohmann::json j{{"round", rs.round},
                             {"set_size", rs.set_size},
                             {"set_size_max", rs.set_size_max},
                             {"added", rs.added},
                             {"bounds", bounds_json(rs.bounds)},
                             {"wall_ms", rs.wall_ms}};
            (*opts.stats_stream) << j.dump() << "\n";
        }

        if (opts.target && !state.witness) {
            state.witness = covered(*opts.target, new_begin);
            if (state.witness && !opts.full_fixpoint) return state;
        }
        if (kept.empty()) {
            state.fixpoint = true;
            return state;
        }
    }
    return state;
}

ForwardResult decide_forward(const Hypersequent& h, const Calculus& calc,
                             const SaturateOptions& opts) {
    std::vector<Formula> seeds = h.all_formulas();
    OmegaSet omega = OmegaSet::closure(seeds);
    SaturateOptions o = opts;
    o.target = &h;
    ForwardResult result;
    result.state = saturate(omega, calc, o);
    if (result.state.witness)
        result.verdict = Verdict::Derivable;
    else if (result.state.fixpoint)
        result.verdict = Verdict::NotDerivable;
    else
        result.verdict = Verdict::Indeterminate;
    return result;
}

// ── Derivation extraction ───────────────────────────────────────────────────

namespace {

// Name of an initial schema instantiating exactly this hypersequent.
std::string initial_rule_name(const Calculus& calc, const Hypersequent& h) {
    OmegaSet local = OmegaSet::closure(h.all_formulas());
    for (const RuleSchema& r : calc.schemas()) {
        if (r.kind != RuleKind::Initial) continue;
        if (!match_conclusion(r, h, local).empty()) return r.name;
    }
    return "initial";
}

// Extend a derivation of `from` into one of `target` (from >=_Omega target)
// with explicit (lw), (EW), (EC) steps.
DerivationTree weak_extend(DerivationTree tree, const Hypersequent& target) {
    Hypersequent cur = tree->conclusion;
    if (cur == target) return tree;

    // Map each current component onto an embedding target component.
    std::vector<Sequent> comps = cur.components();
    std::vector<Sequent> goals;
    for (const Sequent& c : comps) {
        const Sequent* found = nullptr;
        for (const Sequent& t : target.components())
            if (t.succedent == c.succedent && c.antecedent.submultiset_of(t.antecedent)) {
                found = &t;
                break;
            }
        if (!found) throw std::logic_error("weak_extend: source does not cover target");
        goals.push_back(*found);
    }

    auto step = [&](const Hypersequent& next, const char* rule) {
        tree = make_derivation(next, rule, {tree});
        cur = next;
    };

    // (lw): grow each component to its embedding target.
    for (std::size_t i = 0; i < comps.size(); i++) {
        if (comps[i] == goals[i]) continue;
        std::vector<Sequent> cs = cur.components();
        auto it = std::find(cs.begin(), cs.end(), comps[i]);
        assert(it != cs.end());
        *it = goals[i];
        step(Hypersequent(std::move(cs)), "lw");
        comps[i] = goals[i];
    }
    // (EW): insert missing occurrences.
    for (const auto& [s, mult] : target.distinct_components()) {
        std::uint32_t have = cur.multiplicity(s);
        for (std::uint32_t i = have; i < mult; i++) step(cur.with_component(s), "EW");
    }
    // (EC): remove surplus occurrences.
    bool changed = true;
    while (!(cur == target) && changed) {
        changed = false;
        for (const auto& [s, mult] : cur.distinct_components()) {
            if (mult > target.multiplicity(s)) {
                std::vector<Sequent> cs = cur.components();
                cs.erase(std::find(cs.begin(), cs.end(), s));
                step(Hypersequent(std::move(cs)), "EC");
                changed = true;
                break;
            }
        }
    }
    if (!(cur == target)) throw std::logic_error("weak_extend: failed to reach target");
    return tree;
}

}  // namespace

DerivationTree extract_derivation(const SaturationState& state, const Hypersequent& target) {
    std::optional<std::size_t> witness = state.witness;
    if (!witness || !weak_reach_unchecked(state.elements[*witness].h, target)) {
        witness.reset();
        for (std::size_t i = 0; i < state.elements.size(); i++)
            if (weak_reach_unchecked(state.elements[i].h, target)) {
                witness = i;
                break;
            }
    }
    if (!witness) throw std::invalid_argument("extract_derivation: target is not covered");

    std::map<std::size_t, DerivationTree> memo;
    auto build = [&](auto&& self, std::size_t idx) -> DerivationTree {
        auto it = memo.find(idx);
        if (it != memo.end()) return it->second;
        const SaturationElement& e = state.elements[idx];
        DerivationTree tree;
        if (e.prov.initial) {
            tree = make_derivation(e.h, initial_rule_name(state.calculus, e.h), {});
        } else {
            const RuleSchema* rule = state.calculus.find(e.prov.rule);
            assert(rule);
            RuleInstance ri = instantiate(*rule, e.prov.inst);
            std::vector<DerivationTree> premises;
            for (std::size_t k = 0; k < ri.premises.size(); k++) {
                DerivationTree sub = self(self, e.prov.premise_sources[k]);
                premises.push_back(weak_extend(sub, ri.premises[k]));
            }
            tree = make_derivation(ri.conclusion, e.prov.rule, std::move(premises),
                                   e.prov.inst.digest());
            // Support reduction recorded at insertion time: contract duplicates.
            while (!(tree->conclusion == e.h)) {
                Hypersequent cur = tree->conclusion;
                bool merged = false;
                for (const auto& [s, mult] : cur.distinct_components()) {
                    if (mult > e.h.multiplicity(s)) {
                        std::vector<Sequent> cs = cur.components();
                        cs.erase(std::find(cs.begin(), cs.end(), s));
                        tree = make_derivation(Hypersequent(std::move(cs)), "EC", {tree});
                        merged = true;
                        break;
                    }
                }
                if (!merged) throw std::logic_error("extract: support reduction stuck");
            }
        }
        memo.emplace(idx, tree);
        return tree;
    };
    return weak_extend(build(build, *witness), target);
}

}  // namespace hyperprover
