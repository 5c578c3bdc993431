#ifndef HYPERPROVER_FORMULA_HPP
#define HYPERPROVER_FORMULA_HPP

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hyperprover {

// ── Formula ─────────────────────────────────────────────────────────────────
// Propositional formulas over variables, the constants top/bot/1/0 and the
// binary connectives /\ \/ * ->.  Nodes are interned in a process-wide table,
// so equality is pointer equality and each node carries its minimal-paren
// rendering plus its symbol count.  Values are immutable and freely shareable.

enum class FormulaKind : std::uint8_t {
    Var,
    Top,
    Bot,
    One,
    Zero,
    And,
    Or,
    Fuse,
    Imp,
};

const char* formula_kind_name(FormulaKind k) noexcept;

class Formula {
public:
    struct Node;

    static Formula var(const std::string& name);
    static Formula top();
    static Formula bot();
    static Formula one();
    static Formula zero();
    static Formula make(FormulaKind k, Formula lhs, Formula rhs);

    FormulaKind kind() const noexcept;
    bool is_binary() const noexcept;
    bool is_atom() const noexcept { return !is_binary(); }
    const std::string& var_name() const;  // Var nodes only
    Formula left() const;                 // binary nodes only
    Formula right() const;

    // Number of symbols in the standard written form: one per variable,
    // constant and connective.  Parentheses do not count.
    int symbol_count() const noexcept;

    // Minimal-paren ASCII rendering; parsing it yields this same node.
    const std::string& text() const noexcept;

    bool operator==(const Formula& o) const noexcept { return node_ == o.node_; }
    // Deterministic cross-run order: (symbol count, text).
    std::strong_ordering operator<=>(const Formula& o) const noexcept;

    std::size_t hash() const noexcept;

private:
    explicit Formula(const Node* n) : node_(n) {}
    const Node* node_;
    friend struct FormulaHash;
};

struct FormulaHash {
    std::size_t operator()(const Formula& f) const noexcept { return f.hash(); }
};

// ── Parsing ─────────────────────────────────────────────────────────────────
// formula := imp
// imp     := or ("->" imp)?
// or      := and ("\/" and)*
// and     := fus ("/\" fus)*
// fus     := atom ("*" atom)*
// atom    := var | "top" | "bot" | "1" | "0" | "(" formula ")"
// Unicode aliases are accepted on input only.

struct ParseError : std::runtime_error {
    std::size_t position;
    ParseError(std::size_t pos, const std::string& what)
        : std::runtime_error(what + " at offset " + std::to_string(pos)), position(pos) {}
};

Formula parse_formula(std::string_view text);
inline std::string print_formula(const Formula& f) { return f.text(); }

// All subformulas of f, including f itself.
std::vector<Formula> subformulas(const Formula& f);

// ── OmegaSet ────────────────────────────────────────────────────────────────
// A finite subformula-closed vocabulary with a fixed enumeration F_1..F_d
// (ascending by (symbol count, text); index 0 is reserved for the empty
// succedent and is not a formula).

class OmegaSet {
public:
    OmegaSet() = default;
    static OmegaSet closure(std::span<const Formula> seeds);
    static OmegaSet closure_of(const Formula& f) { return closure({&f, 1}); }

    std::size_t size() const noexcept { return formulas_.size(); }
    const Formula& formula(std::size_t i) const { return formulas_.at(i); }  // 0-based
    const std::vector<Formula>& formulas() const noexcept { return formulas_; }
    bool contains(const Formula& f) const noexcept;
    // 0-based position in the enumeration, if present.
    std::optional<std::size_t> index_of(const Formula& f) const noexcept;

    bool same_members(const OmegaSet& o) const { return formulas_ == o.formulas_; }

private:
    std::vector<Formula> formulas_;  // sorted, distinct, subformula-closed
};

// ── Substructural hierarchy ─────────────────────────────────────────────────
// Membership in the classes P_n / N_n for n <= 3 and in P_3'.  Exact grammar
// derivability, computed bottom-up.  Acyclicity of P_3' formulas is not
// checked; callers must treat the p3_prime flag as "grammar membership only".

struct HierarchyClass {
    bool p[4] = {false, false, false, false};
    bool n[4] = {false, false, false, false};
    bool p3_prime = false;

    bool in_p(int lvl) const { return p[lvl]; }
    bool in_n(int lvl) const { return n[lvl]; }
};

HierarchyClass classify_hierarchy(const Formula& f);

}  // namespace hyperprover

#endif
