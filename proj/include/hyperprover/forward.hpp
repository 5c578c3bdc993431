#ifndef HYPERPROVER_FORWARD_HPP
#define HYPERPROVER_FORWARD_HPP

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "hyperprover/calculus.hpp"
#include "hyperprover/derivation.hpp"
#include "hyperprover/hyperseq.hpp"

namespace hyperprover {

enum class Verdict { Derivable, NotDerivable, Indeterminate };
const char* verdict_name(Verdict v) noexcept;

// ── Saturation bounds ───────────────────────────────────────────────────────
// The caps from the WI computability lemma; recomputed whenever the maximum
// element size grows.  All values saturate at uint64 max.

struct Bounds {
    std::uint64_t antecedent_cap = 0;           // ceil(S) * ceil(C) * |Omega|
    std::uint64_t multiplicity_cap = 0;         // ceil(C)
    std::uint64_t slim_cap = 0;                 // ceil(S) * ceil(C)^2 * |Omega|
    std::uint64_t n_slim = 0;                   // distinct slim sequents over Omega
    std::uint64_t premise_component_cap = 0;    // ceil(C) + n_slim * ceil(C)
    std::uint64_t premise_multiplicity_cap = 0; // ceil(C) + n_slim * ceil(C)

    static Bounds compute(std::uint64_t set_size_max, std::uint64_t calc_size_max,
                          std::uint64_t omega_size);
};

// ── Saturation state ────────────────────────────────────────────────────────

struct Provenance {
    bool initial = false;
    std::string rule;
    Instantiation inst;
    std::vector<std::size_t> premise_sources;  // element indices, one per premise
    Hypersequent raw_conclusion;               // instance conclusion before support reduction
};

struct SaturationElement {
    Hypersequent h;
    Provenance prov;
    std::size_t round = 0;
};

struct RoundStats {
    std::size_t round = 0;
    std::size_t set_size = 0;
    std::uint64_t set_size_max = 0;  // ceil(S_i)
    std::size_t added = 0;
    Bounds bounds;
    double wall_ms = 0.0;
};

struct SaturationState {
    OmegaSet omega;
    Calculus calculus;
    std::vector<SaturationElement> elements;
    std::vector<RoundStats> rounds;
    bool fixpoint = false;
    std::optional<std::size_t> witness;  // element covering the query target
    // # encodings of the initial set followed by each round's new elements,
    // over the vocabulary omega + the four constants.
    ControlledSequence record;
    std::uint64_t thin_violations = 0;

    std::vector<Hypersequent> member_set() const;
};

struct SaturateOptions {
    const Hypersequent* target = nullptr;  // stop as soon as some element covers it
    bool full_fixpoint = false;            // keep going to the fixpoint anyway
    std::size_t max_rounds = static_cast<std::size_t>(-1);
    std::ostream* stats_stream = nullptr;  // one JSON record per round
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

// ── Operations ──────────────────────────────────────────────────────────────

// All instances of the initial schemas with formula-variables from omega,
// succedent-variables from omega or empty, multiset- and hypersequent-
// variables empty.
std::vector<Hypersequent> initial_set(const OmegaSet& omega, const Calculus& calc);

// One-step candidates: conclusions of rule instances whose premises are
// weak-structurally covered by elements of the current set, built from
// variable-minimal instantiations.  Every member of WI(S, omega, C) is
// covered (>=_Omega) by some emitted candidate or by S itself.
struct WiCandidate {
    Hypersequent h;
    Provenance prov;
};
std::vector<WiCandidate> wi_cover(const std::vector<SaturationElement>& elements,
                                  std::size_t new_begin, const OmegaSet& omega,
                                  const Calculus& calc);

// Literal WI(S, omega, C) restricted to explicit caps, via backward matching
// over a bounded conclusion universe.  Only feasible for tiny caps; the
// default production caps are astronomically large, which is why saturation
// works with wi_cover instead.
struct WiBounds {
    std::uint64_t conclusion_antecedent_cap = 0;
    std::uint64_t conclusion_multiplicity_cap = 0;
    std::uint64_t conclusion_component_cap = 0;
    std::uint64_t premise_antecedent_cap = 0;   // slim cap
    std::uint64_t premise_multiplicity_cap = 0;
    std::uint64_t premise_component_cap = 0;
    std::uint64_t universe_guard = 2'000'000;   // abort above this many conclusions

    static WiBounds from(const Bounds& b);
};
std::vector<Hypersequent> compute_wi(const std::vector<Hypersequent>& set, const OmegaSet& omega,
                                     const Calculus& calc, const WiBounds& bounds);

// Enumerate all omega-hypersequents within the given caps (shared by
// compute_wi and the test oracles).
std::vector<Hypersequent> enumerate_universe(const OmegaSet& omega, std::uint64_t antecedent_cap,
                                             std::uint64_t multiplicity_cap,
                                             std::uint64_t component_cap,
                                             std::uint64_t guard = 2'000'000);

// Saturate the derivability sets to a fixpoint (or until the target is
// covered).  The calculus must contain (lw).
SaturationState saturate(const OmegaSet& omega, const Calculus& calc,
                         const SaturateOptions& opts = {});

struct ForwardResult {
    Verdict verdict = Verdict::Indeterminate;
    SaturationState state;
};

// Decide derivability of h in calc: omega is the subformula closure of h and
// the verdict is DERIVABLE iff some saturation element weak-reaches h.
ForwardResult decide_forward(const Hypersequent& h, const Calculus& calc,
                             const SaturateOptions& opts = {});

// Replays provenance into a checkable derivation of `target`, which must be
// covered by the state (decide_forward returned Derivable).
DerivationTree extract_derivation(const SaturationState& state, const Hypersequent& target);

}  // namespace hyperprover

#endif
