#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sunforest/diagram.hpp"

namespace sunforest {

/// One tensor factor in index notation: d(i,j,k), f(i,j,k) or delta(i,j).
struct TensorFactor {
  enum class Type { D, F, Delta };
  Type type;
  std::vector<std::string> indices;
};

/// Builds a diagram from factors under the repeated-index convention: an
/// index occurring once is external, occurring twice is contracted. Returns
/// the diagram plus the number of closed delta loops (each worth N^2-1).
/// Throws MalformedDiagram when an index occurs more than twice.
std::pair<Diagram, int> assemble_factors(const std::vector<TensorFactor>& factors);

}  // namespace sunforest
