#ifndef HYPERPROVER_HYPERSEQ_HPP
#define HYPERPROVER_HYPERSEQ_HPP

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hyperprover/formula.hpp"
#include "hyperprover/wqo.hpp"

namespace hyperprover {

// ── FormulaMultiset ─────────────────────────────────────────────────────────
// Sorted occurrence list; equality and ordering are multiset equality and a
// deterministic lexicographic order.

class FormulaMultiset {
public:
    FormulaMultiset() = default;
    explicit FormulaMultiset(std::vector<Formula> occurrences);

    void add(const Formula& f, std::uint32_t count = 1);
    // Removes up to count copies.
    void remove(const Formula& f, std::uint32_t count = 1);

    std::uint32_t count(const Formula& f) const noexcept;
    std::size_t cardinality() const noexcept { return occ_.size(); }
    bool empty() const noexcept { return occ_.empty(); }
    const std::vector<Formula>& occurrences() const noexcept { return occ_; }
    // Distinct formulas in order.
    std::vector<Formula> support() const;

    bool submultiset_of(const FormulaMultiset& o) const noexcept;
    bool same_support(const FormulaMultiset& o) const noexcept;

    FormulaMultiset sum(const FormulaMultiset& o) const;
    // Pointwise max / truncated difference.
    FormulaMultiset pointwise_max(const FormulaMultiset& o) const;
    FormulaMultiset minus_truncated(const FormulaMultiset& o) const;

    bool operator==(const FormulaMultiset& o) const noexcept { return occ_ == o.occ_; }
    std::strong_ordering operator<=>(const FormulaMultiset& o) const noexcept;

private:
    std::vector<Formula> occ_;  // sorted
};

// ── Sequent ─────────────────────────────────────────────────────────────────

struct Sequent {
    FormulaMultiset antecedent;
    std::optional<Formula> succedent;

    int symbol_size() const;
    std::string text() const;
    bool operator==(const Sequent& o) const noexcept = default;
    std::strong_ordering operator<=>(const Sequent& o) const noexcept;
};

// ── Hypersequent ────────────────────────────────────────────────────────────
// Finite multiset of sequents in canonical sorted form.

class Hypersequent {
public:
    Hypersequent() = default;
    explicit Hypersequent(std::vector<Sequent> components);

    static Hypersequent single(Sequent s);
    // Derivation goal for a formula: "=> f".
    static Hypersequent goal(const Formula& f);

    bool empty() const noexcept { return comps_.empty(); }
    std::size_t component_count() const noexcept { return comps_.size(); }
    const std::vector<Sequent>& components() const noexcept { return comps_; }
    // (sequent, multiplicity) pairs in canonical order.
    std::vector<std::pair<Sequent, std::uint32_t>> distinct_components() const;
    std::uint32_t multiplicity(const Sequent& s) const noexcept;

    Hypersequent merged_with(const Hypersequent& o) const;
    Hypersequent with_component(const Sequent& s, std::uint32_t count = 1) const;
    Hypersequent without_component_at(std::size_t index) const;
    // Multiplicity-1 representative; same support.
    Hypersequent support() const;

    int symbol_size() const noexcept { return size_; }
    std::string text() const;
    // Every formula (antecedents and succedents) lies in omega.
    bool is_omega_hypersequent(const OmegaSet& omega) const;
    std::vector<Formula> all_formulas() const;

    bool operator==(const Hypersequent& o) const noexcept {
        return hash_ == o.hash_ && comps_ == o.comps_;
    }
    std::strong_ordering operator<=>(const Hypersequent& o) const noexcept {
        return comps_ <=> o.comps_;
    }
    std::size_t hash() const noexcept { return hash_; }

private:
    void rehash();
    std::vector<Sequent> comps_;  // sorted occurrences
    std::size_t hash_ = 0;
    int size_ = 0;  // cached symbol count
};

struct HypersequentHash {
    std::size_t operator()(const Hypersequent& h) const noexcept { return h.hash(); }
};

// Text format: components '|'-separated, each "f1, f2 => g" / "f1 =>" / "=> g";
// the empty hypersequent is the empty string.
Hypersequent parse_hypersequent(std::string_view text);
Sequent parse_sequent(std::string_view text);

// ── Reachability quasi-orders ───────────────────────────────────────────────

// g >=_Omega h: h is derivable from g using (lw), (EC), (EW) restricted to
// omega.  Decided by the component-mapping criterion: every component
// G => P of g has a component G' => P in h with G a submultiset of G'.
// Throws std::invalid_argument when either side is not an omega-hypersequent.
bool weak_reach(const Hypersequent& g, const Hypersequent& h, const OmegaSet& omega);
// Criterion only, no vocabulary validation; used by the engines.
bool weak_reach_unchecked(const Hypersequent& g, const Hypersequent& h) noexcept;

// Componentwise multiplicity capped at 2.
Hypersequent two_reduct(const Hypersequent& h);

// g <=_hyp h: g obtainable from h by (c), (EC), (EW).  Criterion: every
// component G => P of h has a component G' => P in g with G' <= G pointwise
// and the same support; extra components of g are unconstrained.
bool contract_reach(const Hypersequent& g, const Hypersequent& h) noexcept;

// ── # encoding ──────────────────────────────────────────────────────────────
// Image of an omega-hypersequent in P_f(N^d)^(d+1): components grouped by
// succedent (group 0 = empty succedent, group i = F_i), each component
// contributing its antecedent multiplicity vector over F_1..F_d.

struct PowVector {
    std::size_t dim = 0;          // d
    std::vector<PowSet> groups;   // d+1 entries

    bool operator==(const PowVector&) const = default;
};

PowVector encode_sharp(const Hypersequent& h, const OmegaSet& omega);

bool leq_majoring_vector(const PowVector& x, const PowVector& y);
bool leq_minoring_vector(const PowVector& x, const PowVector& y);

}  // namespace hyperprover

#endif
