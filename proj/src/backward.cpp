#include "hyperprover/backward.hpp"

#include <algorithm>
#include <cassert>
#include <unordered_map>
#include <unordered_set>

namespace hyperprover {

namespace {

struct TimeoutSignal {};

enum class Outcome { Proven, Failed, Capped };

constexpr std::size_t kNoDependence = static_cast<std::size_t>(-1);

struct Alternative {
    std::string rule;
    Instantiation inst;
    Hypersequent instance_conclusion;
    std::vector<Hypersequent> premises;
    std::vector<std::uint64_t> premise_succ_masks;
    std::vector<std::pair<std::string, Hypersequent>> chain;
    std::uint64_t total_premise_size = 0;
};

struct SearchEngine {
    const Calculus& calc;
    OmegaSet omega;
    BackwardOptions opts;
    BackwardStats stats;
    ControlFunction growth;

    std::unordered_map<Hypersequent, DerivationTree, HypersequentHash> proven;
    std::unordered_set<Hypersequent, HypersequentHash> failed;
    std::unordered_map<Hypersequent, std::shared_ptr<std::vector<Alternative>>, HypersequentHash>
        expansions;

    std::vector<Hypersequent> path;
    std::vector<std::uint64_t> path_masks;
    std::vector<PowVector> path_enc;
    std::vector<Hypersequent> deepest_goals;

    bool with_lw = false;
    bool with_rw = false;

    SearchEngine(const Calculus& c, OmegaSet om, BackwardOptions o)
        : calc(c),
          omega(std::move(om)),
          opts(std::move(o)),
          growth(premise_growth_bound(c)),
          with_lw(c.contains("lw")),
          with_rw(c.contains("rw")) {}

    // The engine's redundancy order: ancestor g is reachable from p by the
    // weak rules present in the calculus.  The base case (c), (EC), (EW) is
    // contract_reach; when the calculus also has (lw) or (rw), those are
    // height-preserving admissible and extend the order (antecedent supports
    // may grow, a succedent may be introduced on an empty one).
    bool reducible_to(const Hypersequent& g, const Hypersequent& p) const {
        if (!with_lw && !with_rw) return contract_reach(g, p);
        const auto& gc = g.components();
        const auto& pc = p.components();
        for (std::size_t j = 0; j < pc.size();) {
            bool found = false;
            for (std::size_t i = 0; i < gc.size() && !found;) {
                const Sequent& gs = gc[i];
                const Sequent& ps = pc[j];
                bool succ_ok = gs.succedent == ps.succedent ||
                               (with_rw && !ps.succedent.has_value());
                if (succ_ok) {
                    bool ante_ok;
                    if (with_lw) {
                        // supp(ps) subseteq supp(gs)
                        ante_ok = true;
                        for (const Formula& f : ps.antecedent.occurrences())
                            if (gs.antecedent.count(f) == 0) {
                                ante_ok = false;
                                break;
                            }
                    } else {
                        ante_ok = gs.antecedent.submultiset_of(ps.antecedent) &&
                                  gs.antecedent.same_support(ps.antecedent);
                    }
                    found = ante_ok;
                }
                std::size_t i2 = i + 1;
                while (i2 < gc.size() && gc[i2] == gc[i]) i2++;
                i = i2;
            }
            if (!found) return false;
            std::size_t j2 = j + 1;
            while (j2 < pc.size() && pc[j2] == pc[j]) j2++;
            j = j2;
        }
        return true;
    }

    // Bit per succedent value (omega index + 1, bit 0 for the empty
    // succedent); a necessary condition for contract_reach(g, h) is
    // mask(h) <= mask(g).
    std::uint64_t succ_mask(const Hypersequent& h) const {
        std::uint64_t mask = 0;
        for (const Sequent& s : h.components()) {
            std::size_t bit = 0;
            if (s.succedent) bit = 1 + *omega.index_of(*s.succedent);
            mask |= bit < 64 ? (std::uint64_t{1} << bit) : 0;
        }
        return mask;
    }

    const std::vector<Alternative>& expand(const Hypersequent& goal) {
        auto it = expansions.find(goal);
        if (it != expansions.end()) return *it->second;
        auto alts = std::make_shared<std::vector<Alternative>>();
        AbsorbMode weak;
        weak.weaken_left = with_lw;
        weak.weaken_right = with_rw;
        for (const RuleSchema& r : calc.schemas()) {
            for (AbsorbedMatch& m : match_conclusion_absorbed(r, goal, omega, weak)) {
                Alternative alt;
                alt.rule = r.name;
                alt.inst = std::move(m.inst);
                alt.instance_conclusion = std::move(m.instance_conclusion);
                alt.premises = std::move(m.premises);
                alt.chain = std::move(m.chain);
                for (const Hypersequent& p : alt.premises) {
                    alt.total_premise_size += static_cast<std::uint64_t>(p.symbol_size());
                    alt.premise_succ_masks.push_back(succ_mask(p));
                }
                alts->push_back(std::move(alt));
            }
        }
        std::sort(alts->begin(), alts->end(), [](const Alternative& a, const Alternative& b) {
            if (a.premises.size() != b.premises.size())
                return a.premises.size() < b.premises.size();
            if (a.total_premise_size != b.total_premise_size)
                return a.total_premise_size < b.total_premise_size;
            if (a.chain.size() != b.chain.size()) return a.chain.size() < b.chain.size();
            auto key = [](const Alternative& x) {
                std::string k = x.rule + "\x01" + x.instance_conclusion.text();
                for (const Hypersequent& p : x.premises) k += "\x01" + p.text();
                return k;
            };
            return key(a) < key(b);
        });
        expansions.emplace(goal, alts);
        return *alts;
    }

    // `dependence` reports the smallest path index whose presence influenced
    // a failure; failures that only depended on the goal's own subtree are
    // path-independent and globally cacheable.
    Outcome prove(const Hypersequent& goal, DerivationTree* out, std::size_t& dependence) {
        dependence = kNoDependence;
        if (opts.deadline && std::chrono::steady_clock::now() > *opts.deadline)
            throw TimeoutSignal{};
        if (auto it = proven.find(goal); it != proven.end()) {
            if (out) *out = it->second;
            return Outcome::Proven;
        }
        if (failed.count(goal)) return Outcome::Failed;

        const std::size_t entry_depth = path.size();
        stats.nodes_expanded++;
        stats.max_branch = std::max<std::uint64_t>(stats.max_branch, entry_depth + 1);
        stats.max_goal_size = std::max<std::uint64_t>(stats.max_goal_size, goal.symbol_size());

        // Instrumentation: along an irredundant branch no ancestor may be
        // contraction-reachable (the support-refined minoring order), and the
        // coarse minoring comparabilities are counted for diagnostics.
        PowVector enc = encode_sharp(goal, omega);
        for (std::size_t ai = 0; ai < path.size(); ai++) {
            if (reducible_to(path[ai], goal)) stats.badness_violations++;
            if (leq_minoring_vector(path_enc[ai], enc)) stats.coarse_minoring_pairs++;
        }
        path_enc.push_back(enc);
        if (path_enc.size() > deepest_goals.size()) {
            deepest_goals = path;
            deepest_goals.push_back(goal);
        }

        Outcome result = Outcome::Failed;
        if (entry_depth >= opts.depth_cap) {
            result = Outcome::Capped;
        } else {
            const std::uint64_t goal_mask = succ_mask(goal);
            const std::uint64_t bound =
                growth.apply(static_cast<std::uint64_t>(goal.symbol_size()));
            for (const Alternative& alt : expand(goal)) {
                for (const Hypersequent& p : alt.premises)
                    if (static_cast<std::uint64_t>(p.symbol_size()) > bound)
                        stats.growth_violations++;
                if (opts.prune_irredundant) {
                    bool violates = false;
                    for (std::size_t pi = 0; pi < alt.premises.size() && !violates; pi++) {
                        const Hypersequent& p = alt.premises[pi];
                        // empty-succedent components are wildcards under (rw)
                        const std::uint64_t pmask =
                            with_rw ? (alt.premise_succ_masks[pi] & ~std::uint64_t{1})
                                    : alt.premise_succ_masks[pi];
                        if ((pmask & ~goal_mask) == 0 && reducible_to(goal, p)) {
                            violates = true;  // the goal itself: subtree-internal
                            break;
                        }
                        for (std::size_t ai = path.size(); ai-- > 0;) {
                            if ((pmask & ~path_masks[ai]) != 0) continue;
                            if (reducible_to(path[ai], p)) {
                                violates = true;
                                dependence = std::min(dependence, ai);
                                break;
                            }
                        }
                    }
                    if (violates) {
                        stats.prunings++;
                        continue;
                    }
                }

                path.push_back(goal);
                path_masks.push_back(goal_mask);
                bool alt_failed = false, alt_capped = false;
                std::vector<DerivationTree> subtrees;
                for (const Hypersequent& p : alt.premises) {
                    DerivationTree sub;
                    std::size_t child_dep = kNoDependence;
                    Outcome o = prove(p, &sub, child_dep);
                    dependence = std::min(dependence, child_dep);
                    if (o == Outcome::Failed) {
                        alt_failed = true;
                        break;
                    }
                    if (o == Outcome::Capped) {
                        alt_capped = true;
                        break;
                    }
                    subtrees.push_back(std::move(sub));
                }
                path.pop_back();
                path_masks.pop_back();

                if (alt_failed) continue;
                if (alt_capped) {
                    result = Outcome::Capped;
                    continue;
                }

                DerivationTree t = make_derivation(alt.instance_conclusion, alt.rule,
                                                   std::move(subtrees), alt.inst.digest());
                for (const auto& [rule, node] : alt.chain)
                    t = make_derivation(node, rule, {t});
                assert(t->conclusion == goal);
                proven.emplace(goal, t);
                if (out) *out = t;
                path_enc.pop_back();
                return Outcome::Proven;
            }
        }
        path_enc.pop_back();
        if (result == Outcome::Failed && dependence >= entry_depth) {
            failed.insert(goal);
            dependence = kNoDependence;
        }
        return result;
    }
};

}  // namespace

BackwardResult decide_backward(const Hypersequent& h, const Calculus& calc,
                               const BackwardOptions& opts) {
    if (!calc.contains("c"))
        throw std::invalid_argument("backward search requires a calculus containing (c)");

    OmegaSet omega = OmegaSet::closure(h.all_formulas());
    SearchEngine engine(calc, omega, opts);

    // Iterative deepening over the branch length.  A Failed outcome is only
    // produced by exhausting the irredundant tree without touching the cap,
    // so it is already definitive; Capped outcomes retry with a deeper cap.
    // Proven goals and cap-free failures carry over between rounds.
    const bool user_capped = opts.depth_cap != static_cast<std::size_t>(-1);

    BackwardResult result;
    try {
        DerivationTree tree;
        Outcome o = Outcome::Capped;
        std::size_t cap = user_capped ? opts.depth_cap : 2;
        while (true) {
            engine.opts.depth_cap = cap;
            std::size_t dep = kNoDependence;
            o = engine.prove(h, &tree, dep);
            if (o != Outcome::Capped || user_capped) break;
            cap += 1;
        }
        switch (o) {
            case Outcome::Proven:
                result.verdict = Verdict::Derivable;
                result.tree = tree;
                break;
            case Outcome::Failed: result.verdict = Verdict::NotDerivable; break;
            case Outcome::Capped: result.verdict = Verdict::Indeterminate; break;
        }
    } catch (const TimeoutSignal&) {
        result.verdict = Verdict::Indeterminate;
    }
    result.stats = engine.stats;

    // Record the deepest AND-path under the support-refined # encoding:
    // components are grouped by (succedent, antecedent support), the grouping
    // under which irredundant branches genuinely are bad sequences for the
    // minoring vector order.  The plain succedent grouping forgets supports,
    // which (c) preserves, and can relate goals no weak rule connects.
    std::map<std::pair<std::size_t, std::vector<std::size_t>>, std::size_t> key_index;
    auto comp_key = [&](const Sequent& s) {
        std::pair<std::size_t, std::vector<std::size_t>> key;
        key.first = s.succedent ? 1 + *omega.index_of(*s.succedent) : 0;
        for (const Formula& f : s.antecedent.support()) key.second.push_back(*omega.index_of(f));
        return key;
    };
    for (const Hypersequent& g : engine.deepest_goals)
        for (const auto& [s, mult] : g.distinct_components())
            key_index.emplace(comp_key(s), 0);
    std::size_t next = 0;
    for (auto& [key, idx] : key_index) idx = next++;

    result.deepest_path.tuple_len = omega.size();
    result.deepest_path.group_count = key_index.size();
    result.deepest_path.control = engine.growth;
    result.deepest_path.start = std::max<std::uint64_t>(1, h.symbol_size());
    for (const Hypersequent& g : engine.deepest_goals) {
        std::vector<PowSet> entry(key_index.size());
        for (const auto& [s, mult] : g.distinct_components()) {
            NatTuple tuple(omega.size(), 0);
            for (const Formula& f : s.antecedent.support())
                tuple[*omega.index_of(f)] = s.antecedent.count(f);
            entry[key_index.at(comp_key(s))].insert(std::move(tuple));
        }
        result.deepest_path.push(std::move(entry));
    }
    return result;
}

}  // namespace hyperprover
