#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "sunforest/diagram.hpp"
#include "sunforest/expression.hpp"

namespace sunforest {

struct WordTooShort : std::runtime_error {
  explicit WordTooShort(const std::string& w) : std::runtime_error(w) {}
};

/// A trace of generator products: fundamental Tr(lambda_{i1}...lambda_{in})
/// or adjoint-style Tr(X_{i1}...X_{in}) with X per letter in {D, F}.
struct TraceWord {
  enum class Kind { Fundamental, AdjointD, AdjointF, Mixed };
  Kind kind = Kind::Fundamental;
  std::vector<std::string> indices;
  std::vector<VertexKind> letter_kinds;  // used when kind == Mixed
};

/// Fundamental trace expanded into a forest expression over delta/d/f with
/// Gaussian-rational Laurent coefficients. Base cases: Tr(1) = N,
/// Tr(lambda_i) = 0, Tr(lambda_i lambda_j) = 2 delta_ij.
Expression expand_trace(const TraceWord& w);

/// The n-gon loop diagram matching Tr(X_{i1}...X_{in}) with [X_i]_{ab}
/// read in stored order (i, a, b). Requires n >= 2.
Diagram adjoint_trace_diagram(const TraceWord& w);

}  // namespace sunforest
