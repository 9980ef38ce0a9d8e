#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sunforest/diagram.hpp"
#include "sunforest/expression.hpp"

namespace sunforest {

enum class RuleId { FF_CONTRACT, FF_EXPAND, JACOBI_MOVE, ATOMIC_SIMPLIFY, CYCLE_SOLVE };
enum class Phase { Atomic, Lemma1, Lemma3, Lemma4, ForestNorm };

const char* rule_name(RuleId id);
const char* phase_name(Phase p);

struct NotAnFFEdge : std::runtime_error {
  explicit NotAnFFEdge(const std::string& w) : std::runtime_error(w) {}
};
struct NotAnFDEdge : std::runtime_error {
  explicit NotAnFDEdge(const std::string& w) : std::runtime_error(w) {}
};
struct PreconditionViolated : std::runtime_error {
  explicit PreconditionViolated(const std::string& w) : std::runtime_error(w) {}
};

/// Raw output of a local rewrite; terms are kept pre-canonical so a strategy
/// can continue rewriting a designated term without a canonical round trip.
struct RuleOutput {
  std::vector<std::pair<Coefficient, Diagram>> raw;
  Expression expr() const;
};

/// Scalars of the atomic simplifications. The bubble values are derived
/// numerically once (forest fit over several N with a holdout check, see
/// tests/test_rules.cpp) and frozen here; delta_loop is the adjoint dimension.
struct AtomicConstants {
  Coefficient dd_bubble;   // N - 4/N
  Coefficient ff_bubble;   // N
  Coefficient delta_loop;  // N^2 - 1
};
const AtomicConstants& atomic_constants();

/// Contraction of an edge joining two f vertices:
///   f(i1,i2,k) f(k,i3,i4) ->
///     (2/N)(delta(i1,i3) delta(i2,i4) - delta(i1,i4) delta(i2,i3))
///     + d(i1,i3,m) d(m,i2,i4) - d(i1,i4,m) d(m,i2,i3)
RuleOutput apply_ff_contraction(const Diagram& d, int edge_index);

/// Rearranged Jacobi identity on an f-d edge. The f keeps `keep_leg`
/// (default: the first stored non-edge leg) and hands its other leg to the d:
///   f(i1,i2,k) d(k,i3,i4) -> -f(i1,i3,m) d(m,i2,i4) - f(i1,i4,m) d(m,i2,i3)
RuleOutput apply_jacobi_move(const Diagram& d, int edge_index, int keep_leg = -1);

/// Inverse use of the ff contraction on a d-d edge; the caller picks which
/// outer legs play i1 (on one vertex) and i2 (on the other):
///   d(i1,i3,k) d(k,i2,i4) -> f(i1,i2,m) f(m,i3,i4)
///     - (2/N)(delta(i1,i3) delta(i2,i4) - delta(i1,i4) delta(i2,i3))
///     + d(i1,i4,m) d(m,i2,i3)
RuleOutput apply_ff_expansion(const Diagram& d, int edge_index, int i1_leg, int i2_leg);

struct AtomicStep {
  RuleOutput out;
  std::string site;
};

/// One atomic action (tadpole, bubble) at the first applicable site.
std::optional<AtomicStep> atomic_step(const Diagram& d);

/// Atomic simplification to a fixed point; nullopt when nothing applies.
std::optional<Expression> atomic_simplify(const Diagram& d);

}  // namespace sunforest
