#ifndef GKA_PRINT_HPP
#define GKA_PRINT_HPP

#include <string>
#include <vector>

#include "gka/ast.hpp"

namespace gka {

/// Shortest round-trip decimal form (to_chars).
std::string format_double(double v);

std::string unparse_pattern(const std::vector<AgentPattern>& pattern);
std::string unparse_rule(const Rule& rule);
std::string unparse_signature(const AgentSignature& sig);
std::string unparse_variant(const VariantDecl& v);

/// Canonical text of a whole model: signatures, variants, then rules and
/// directives, each on its own line, bond labels renumbered from 0 in
/// first-occurrence order. Parsing the result reproduces an equal AST.
std::string unparse(const ModelAST& ast);

/// Position-independent structural key of a rule (name excluded, sites
/// sorted within each occurrence, bonds renumbered over the sorted
/// traversal). Two rules with equal keys describe the same rewrite.
std::string canonical_rule_structure(const Rule& rule);

/// Structure plus rates; the deduplication key used by the compiler.
std::string canonical_rule_key(const Rule& rule);

}  // namespace gka

#endif
