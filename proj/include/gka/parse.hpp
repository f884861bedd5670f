#ifndef GKA_PARSE_HPP
#define GKA_PARSE_HPP

#include <string_view>

#include "gka/ast.hpp"
#include "gka/diagnostics.hpp"

namespace gka {

/// Parses model text (one declaration, rule, or directive per line; `#`
/// starts a comment). Never throws; problems are reported through
/// `diags` and parsing resumes on the next line. The returned AST is
/// complete iff `diags.has_errors()` is false.
///
/// Bond labels are renumbered to 0..n per rule side during parsing, so
/// any parsed AST is already in canonical form. Rate names are resolved
/// against `%param:` declarations anywhere in the file; names without a
/// declaration default to 1 and are listed in `unresolved_params`.
ModelAST parse_model(std::string_view text, Diagnostics& diags);

}  // namespace gka

#endif
