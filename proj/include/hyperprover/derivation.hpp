#ifndef HYPERPROVER_DERIVATION_HPP
#define HYPERPROVER_DERIVATION_HPP

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "hyperprover/hyperseq.hpp"

namespace hyperprover {

// A derivation tree: each node is a hypersequent together with the name of the
// rule whose instance concludes it from its children; leaves carry initial
// schemas.  Subtrees may be shared.

struct DerivationNode;
using DerivationTree = std::shared_ptr<const DerivationNode>;

struct DerivationNode {
    Hypersequent conclusion;
    std::string rule;
    std::string digest;  // instantiation digest, informational
    std::vector<DerivationTree> premises;
};

DerivationTree make_derivation(Hypersequent conclusion, std::string rule,
                               std::vector<DerivationTree> premises, std::string digest = "");

std::size_t derivation_height(const DerivationTree& t);
std::size_t derivation_node_count(const DerivationTree& t);

// Indented text format, root first, two spaces per level:
//   <hypersequent>  [<rule>]
// and a JSON object format {"hypersequent":.., "rule":.., "premises":[..]}.
// Readers accept either; the JSON reader is used when the input starts with '{'.
void write_derivation_text(std::ostream& out, const DerivationTree& t);
void write_derivation_json(std::ostream& out, const DerivationTree& t);
DerivationTree read_derivation(std::istream& in);

}  // namespace hyperprover

#endif
