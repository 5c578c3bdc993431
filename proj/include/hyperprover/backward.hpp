#ifndef HYPERPROVER_BACKWARD_HPP
#define HYPERPROVER_BACKWARD_HPP

#include <chrono>
#include <cstdint>
#include <optional>

#include "hyperprover/calculus.hpp"
#include "hyperprover/derivation.hpp"
#include "hyperprover/forward.hpp"

namespace hyperprover {

// Irredundant backward proof search for HFL_ec extensions: memoizing
// depth-first AND-OR search over rule instances matched modulo (c)/(EC), with
// alternatives pruned when a premise is contraction-reachable from a branch
// ancestor.

struct BackwardStats {
    std::uint64_t nodes_expanded = 0;
    std::uint64_t prunings = 0;          // alternatives omitted by irredundancy
    std::uint64_t max_branch = 0;        // longest AND-path
    std::uint64_t max_goal_size = 0;
    std::uint64_t growth_violations = 0; // premises exceeding the affine bound
    // Ancestor pairs on explored branches that are comparable under the
    // support-refined minoring order (equivalently contraction-reachable);
    // irredundancy makes this impossible, so nonzero means an engine bug.
    std::uint64_t badness_violations = 0;
    // Ancestor pairs comparable under the coarse minoring order of the plain
    // # encoding.  The coarse order forgets antecedent supports, which (c)
    // preserves, so such pairs can legitimately appear on irredundant
    // branches; counted for diagnostics.
    std::uint64_t coarse_minoring_pairs = 0;
};

struct BackwardOptions {
    std::optional<std::chrono::steady_clock::time_point> deadline;
    bool prune_irredundant = true;   // disabled only by the pruning-safety test
    std::size_t depth_cap = static_cast<std::size_t>(-1);
};

struct BackwardResult {
    Verdict verdict = Verdict::Indeterminate;
    std::optional<DerivationTree> tree;
    BackwardStats stats;
    // # encodings along the deepest explored AND-path, controlled by the
    // premise growth bound.
    ControlledSequence deepest_path;
};

// The calculus must contain (c).
BackwardResult decide_backward(const Hypersequent& h, const Calculus& calc,
                               const BackwardOptions& opts = {});

}  // namespace hyperprover

#endif
