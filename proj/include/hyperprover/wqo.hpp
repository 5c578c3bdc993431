#ifndef HYPERPROVER_WQO_HPP
#define HYPERPROVER_WQO_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hyperprover {

// Tuples over N and finite sets of them, with the majoring and minoring
// quasi-orders and the norms used to control bad sequences.  All arithmetic
// on bounds saturates at uint64 max instead of overflowing.

using NatTuple = std::vector<std::uint64_t>;

// Finite set of equal-length tuples, kept sorted and duplicate-free.
class PowSet {
public:
    PowSet() = default;
    explicit PowSet(std::vector<NatTuple> tuples);
    PowSet(std::initializer_list<NatTuple> tuples)
        : PowSet(std::vector<NatTuple>(tuples)) {}

    void insert(NatTuple t);
    const std::vector<NatTuple>& tuples() const noexcept { return tuples_; }
    bool empty() const noexcept { return tuples_.empty(); }
    std::size_t size() const noexcept { return tuples_.size(); }
    bool operator==(const PowSet&) const = default;

private:
    std::vector<NatTuple> tuples_;
};

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// x_i <= y_i for all i; throws on length mismatch.
bool leq_pointwise(const NatTuple& x, const NatTuple& y);

// X <=maj Y  iff  forall x in X exists y in Y with x <= y.
bool leq_majoring(const PowSet& x, const PowSet& y);
// X <=min Y  iff  forall y in Y exists x in X with x <= y.
bool leq_minoring(const PowSet& x, const PowSet& y);

enum class SetOrder { Majoring, Minoring };

// Index-wise comparison of equal-length vectors of PowSets.
bool leq_vector(std::span<const PowSet> x, std::span<const PowSet> y, SetOrder order);

std::uint64_t norm(const NatTuple& x);
std::uint64_t norm(const PowSet& x);
std::uint64_t norm(std::span<const PowSet> v);

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b);
std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b);
std::uint64_t saturating_pow(std::uint64_t base, std::uint64_t exp);

// ── Control functions ───────────────────────────────────────────────────────
// Closed parametric family so recorded sequences are replayable:
//   x+c, c*x, x^c, 2^(x^c), and the affine a*x+b used as the premise growth
//   bound of a calculus.

class ControlFunction {
public:
    enum class Family { Add, Mul, Pow, ExpPow, Affine };

    static ControlFunction add(std::uint64_t c) { return {Family::Add, c, 0}; }
    static ControlFunction mul(std::uint64_t c) { return {Family::Mul, c, 0}; }
    static ControlFunction pow(std::uint64_t c) { return {Family::Pow, c, 0}; }
    static ControlFunction exp_pow(std::uint64_t c) { return {Family::ExpPow, c, 0}; }
    static ControlFunction affine(std::uint64_t a, std::uint64_t b) { return {Family::Affine, a, b}; }

    std::uint64_t apply(std::uint64_t x) const;
    // i-fold composition, saturating.
    std::uint64_t iterate(std::uint64_t n, std::uint64_t i) const;

    Family family() const noexcept { return family_; }
    std::uint64_t param_a() const noexcept { return a_; }
    std::uint64_t param_b() const noexcept { return b_; }
    std::string name() const;
    static std::optional<ControlFunction> parse(const std::string& name, std::uint64_t a,
                                                std::uint64_t b);

    bool operator==(const ControlFunction&) const = default;

private:
    ControlFunction(Family f, std::uint64_t a, std::uint64_t b) : family_(f), a_(a), b_(b) {}
    Family family_;
    std::uint64_t a_;
    std::uint64_t b_;
};

// ── Controlled sequences ────────────────────────────────────────────────────
// A sequence of PowSet vectors recorded by one of the engines: tuple length k,
// one group vector of d entries per element, control g and start value n.

struct ControlledSequence {
    std::size_t tuple_len = 0;   // k
    std::size_t group_count = 0; // entries per element
    ControlFunction control = ControlFunction::add(1);
    std::uint64_t start = 0;     // n
    std::vector<std::vector<PowSet>> entries;

    void push(std::vector<PowSet> groups) { entries.push_back(std::move(groups)); }
    std::size_t length() const noexcept { return entries.size(); }
};

struct BadSequenceReport {
    bool ok = true;
    // i < j with entry_i <= entry_j under the checked order.
    std::optional<std::pair<std::size_t, std::size_t>> comparable_pair;
    // first index whose norm exceeds g^i(n)
    std::optional<std::size_t> control_violation;
};

BadSequenceReport verify_controlled_bad(const ControlledSequence& seq, SetOrder order);

// Line-delimited serialization: header "k=.. d=.. control=<name> a=.. b=.. n=..",
// then one element per line, groups ';'-separated, tuples like (1,0)(2,3),
// empty group printed as '-'.
void write_controlled_sequence(std::ostream& out, const ControlledSequence& seq);
ControlledSequence read_controlled_sequence(std::istream& in);

}  // namespace hyperprover

#endif
