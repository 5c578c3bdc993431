#ifndef HYPERPROVER_CALCULUS_HPP
#define HYPERPROVER_CALCULUS_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hyperprover/hyperseq.hpp"
#include "hyperprover/wqo.hpp"

namespace hyperprover {

// ── Schematic formulas ──────────────────────────────────────────────────────
// Patterns over formula-variables, constants and connectives, e.g. A /\ B.

class SchemaFormula {
public:
    static SchemaFormula fvar(std::string name);
    static SchemaFormula constant(FormulaKind k);  // Top/Bot/One/Zero
    static SchemaFormula binary(FormulaKind k, SchemaFormula lhs, SchemaFormula rhs);

    bool is_fvar() const noexcept { return kind_ == FormulaKind::Var; }
    FormulaKind kind() const noexcept { return kind_; }
    const std::string& var() const { return name_; }
    const SchemaFormula& left() const { return *lhs_; }
    const SchemaFormula& right() const { return *rhs_; }

    int symbol_count() const;
    std::string text() const;
    void collect_fvars(std::vector<std::string>& out) const;

    // Substitute bound formula-variables; all variables must be bound.
    Formula instantiate(const std::map<std::string, Formula>& bindings) const;
    // Structural match against f, extending bindings; false on clash.
    bool unify(const Formula& f, std::map<std::string, Formula>& bindings) const;

private:
    FormulaKind kind_ = FormulaKind::Var;  // Var encodes a formula-variable here
    std::string name_;
    std::shared_ptr<const SchemaFormula> lhs_, rhs_;
};

// ── Schematic hypersequents ─────────────────────────────────────────────────

struct SchematicComponent {
    std::vector<std::string> mset_vars;  // occurrence list; repeats allowed
    std::vector<SchemaFormula> terms;    // antecedent formula patterns

    enum class Succ { Empty, Var, Term };
    Succ succ_kind = Succ::Empty;
    std::string succ_var;
    std::optional<SchemaFormula> succ_term;

    int symbol_size() const;
    std::string text() const;
};

struct SchematicHypersequent {
    bool has_hvar = false;
    std::vector<SchematicComponent> comps;

    int symbol_size() const;
    std::string text() const;
};

// ── Rule schemas ────────────────────────────────────────────────────────────
// A named schema holds one or more forms (premises + conclusion); schemas with
// an indexed side formula, like the two projections of (\/R), carry one form
// per projection and count as a single schema.

struct RuleForm {
    std::vector<SchematicHypersequent> premises;
    SchematicHypersequent conclusion;
};

enum class RuleKind { Initial, Logical, Structural };

struct RuleSchema {
    std::string name;
    RuleKind kind = RuleKind::Structural;
    std::vector<RuleForm> forms;

    int symbol_size() const;  // size of forms[0], premises + conclusion
    std::size_t premise_count() const { return forms.at(0).premises.size(); }
};

struct ValidationReport {
    bool linear_conclusion = true;
    bool subvariable = true;
    bool structural = true;
    std::vector<std::string> offending;  // variables breaking a flag

    bool all() const { return linear_conclusion && subvariable && structural; }
};

ValidationReport validate_schema(const RuleSchema& r);

// ── Instantiation ───────────────────────────────────────────────────────────

struct Instantiation {
    std::size_t form_index = 0;
    Hypersequent hyper;  // value of H; empty hypersequent when schema has no H
    std::map<std::string, FormulaMultiset> msets;
    std::map<std::string, std::optional<Formula>> succs;
    std::map<std::string, Formula> fvars;

    std::string digest() const;
};

struct RuleInstance {
    std::vector<Hypersequent> premises;
    Hypersequent conclusion;
};

// Substitutes I into the selected form of r.  Throws std::invalid_argument on
// a missing binding.
RuleInstance instantiate(const RuleSchema& r, const Instantiation& inst);

// ── Calculus ────────────────────────────────────────────────────────────────

class Calculus {
public:
    Calculus() = default;

    // Adding a structural schema that fails validation throws.
    Calculus& add(RuleSchema schema);
    Calculus with(RuleSchema schema) const;

    const std::vector<RuleSchema>& schemas() const noexcept { return schemas_; }
    std::size_t size() const noexcept { return schemas_.size(); }
    const RuleSchema* find(const std::string& name) const noexcept;
    bool contains(const std::string& name) const noexcept { return find(name) != nullptr; }

    const std::string& preset() const noexcept { return preset_; }
    void set_preset(std::string p) { preset_ = std::move(p); }

private:
    std::vector<RuleSchema> schemas_;
    std::string preset_;
};

// Maximum schema symbol size over the calculus.
int schema_size_max(const Calculus& c);

// Affine premise-size bound g(x) = ceil(C)*x + ceil(C); every backward
// expansion asserts premise size <= g(conclusion size).
ControlFunction premise_growth_bound(const Calculus& c);

// ── Built-ins ───────────────────────────────────────────────────────────────
// Presets: HFLe (the 17 base schemas), HFLelw, HFLew, HFLec, MTL.
// Rules: c, lw, rw, com, wem, mingle, Bw(k), Bc(k), knot(n,m).

Calculus builtin_calculus(const std::string& preset);
RuleSchema builtin_rule(const std::string& name, const std::vector<int>& params = {});

// ── Rule DSL ────────────────────────────────────────────────────────────────
// rule <name>
// premise: H | Z1, Z2 =>
// conclusion: H | Z1 => | Z2 =>
// Namespaces by leading letter: H hypersequent, X/Y/Z/M multiset, P succedent,
// A/B formula.  Only structural schemas are accepted; anything else fails
// validation fatally.

RuleSchema parse_rule_dsl(std::string_view text);
std::vector<RuleSchema> parse_rules_file(std::string_view text);

// ── Backward conclusion matching ────────────────────────────────────────────

// All instantiations I with I(conclusion of r) = h, formula-variables ranging
// over omega; instantiations with identical premise lists are emitted once.
std::vector<Instantiation> match_conclusion(const RuleSchema& r, const Hypersequent& h,
                                            const OmegaSet& omega);

// Matching modulo the weak rules below the instance: the instance conclusion
// may be any hypersequent that reduces to the goal by (c) and (EC), plus (lw)
// and (rw) when those are absorbed as well (only sound when the calculus
// contains them).  Used by the backward engine.  `chain` holds the reduction
// steps from the instance conclusion down to the goal: entry (rule, v) means
// one application with the previous hypersequent as premise and v as
// conclusion; the last entry's conclusion is the goal.  Empty when the
// instance concludes the goal directly.
struct AbsorbedMatch {
    Instantiation inst;
    Hypersequent instance_conclusion;
    std::vector<Hypersequent> premises;
    std::vector<std::pair<std::string, Hypersequent>> chain;
};

struct AbsorbMode {
    bool weaken_left = false;   // absorb (lw): instance antecedents may shrink
    bool weaken_right = false;  // absorb (rw): an empty succedent may match any
};

std::vector<AbsorbedMatch> match_conclusion_absorbed(const RuleSchema& r, const Hypersequent& h,
                                                     const OmegaSet& omega,
                                                     const AbsorbMode& mode = {});

}  // namespace hyperprover

#endif
