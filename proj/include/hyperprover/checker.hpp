#ifndef HYPERPROVER_CHECKER_HPP
#define HYPERPROVER_CHECKER_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hyperprover/calculus.hpp"
#include "hyperprover/derivation.hpp"

namespace hyperprover {

// ── Derivation checking ─────────────────────────────────────────────────────

struct CheckResult {
    bool accepted = true;
    const DerivationNode* offender = nullptr;
    std::string reason;
};

// Accepts iff every node is a rule instance of the named schema with the
// children as premises, and leaves are instances of initial schemas.
CheckResult check_derivation(const DerivationTree& t, const Calculus& calc);

// ── Bounded brute-force closure ─────────────────────────────────────────────
// Naive forward closure over all rule instances inside a size-capped universe
// of omega-hypersequents: everything derivable by trees of height <= depth_cap
// whose hypersequents all have symbol size <= size_cap.  Oracle for the
// engines at tiny scale; independent of the matching machinery.

std::vector<Hypersequent> brute_closure(const OmegaSet& omega, const Calculus& calc,
                                        std::uint64_t size_cap, std::uint64_t depth_cap,
                                        std::uint64_t universe_guard = 500000);

// ── Finite-chain evaluation ─────────────────────────────────────────────────
// Semantic refutation on desk-scale residuated chains: the carrier is
// {0, 1/(n-1), ..., 1} stored as integers 0..n-1 over denominator n-1.

struct ChainModel {
    enum class Kind { Lukasiewicz, Godel };
    Kind kind = Kind::Lukasiewicz;
    int size = 3;  // n >= 2
};

struct ChainEval {
    int value = 0;  // minimum value over all assignments, numerator over denom
    int denom = 1;
    bool valid = false;                     // value == denom, i.e. designated 1
    std::map<std::string, int> assignment;  // attains the minimum
};

ChainEval eval_chain(const Formula& f, const ChainModel& m);

}  // namespace hyperprover

#endif
