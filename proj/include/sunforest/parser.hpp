#pragma once

#include <stdexcept>
#include <string>

#include "sunforest/expression.hpp"

namespace sunforest {

struct SyntaxError : std::runtime_error {
  std::size_t position;
  SyntaxError(const std::string& what, std::size_t pos)
      : std::runtime_error(what + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};
struct IndexArityError : std::runtime_error {
  explicit IndexArityError(const std::string& w) : std::runtime_error(w) {}
};
struct MixedFreeIndexError : std::runtime_error {
  explicit MixedFreeIndexError(const std::string& w) : std::runtime_error(w) {}
};

/// Parses the textual expression language:
///   expression := ['-'] term (('+'|'-') term)*
///   term       := atom (['*'|'/'] atom)*
///   atom       := integer | 'I' | 'N' ['^' ['-'] integer] | '(' scalar ')'
///               | ('d'|'f') '(' idx ',' idx ',' idx ')' | 'delta(' idx ',' idx ')'
/// An index occurring twice in a term is contracted, once is free.
Expression parse_expression(const std::string& text);

/// Deterministic rendering in the same language; parsing the output
/// reproduces the expression exactly.
std::string format_expression(const Expression& e);

/// Rendering of a single term's diagram with coefficient 1 (no sign).
std::string format_diagram(const Diagram& d);

}  // namespace sunforest
