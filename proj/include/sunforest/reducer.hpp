#pragma once

#include <compare>
#include <stdexcept>
#include <string>
#include <vector>

#include "sunforest/expression.hpp"
#include "sunforest/rules.hpp"

namespace sunforest {

struct StepBudgetExceeded : std::runtime_error {
  explicit StepBudgetExceeded(const std::string& w) : std::runtime_error(w) {}
};

/// Termination measure: lexicographic
/// (vertices lying on any cycle, f vertices lying on any cycle, vertex count).
struct Measure {
  int cycle_vertices = 0;
  int cycle_f = 0;
  int total_vertices = 0;
  auto operator<=>(const Measure&) const = default;
  std::string str() const {
    return "(" + std::to_string(cycle_vertices) + "," + std::to_string(cycle_f) + "," +
           std::to_string(total_vertices) + ")";
  }
};

Measure measure(const Diagram& d);

/// One recorded rewrite: the representative of `input_encoding` equals
/// `output` identically (oracle-checkable at any N).
struct RuleApplication {
  RuleId id;
  Phase phase;
  std::string site;
  std::string input_encoding;
  Diagram input_rep;
  Expression output;
};

/// Phase-level progress record: one lemma-level transformation of one term.
struct PhaseRecord {
  Phase phase;
  std::string input_encoding;
  Measure input_measure;
  std::vector<std::pair<std::string, Measure>> outputs;
};

struct ReductionTrace {
  std::vector<RuleApplication> steps;
  std::vector<PhaseRecord> phases;
};

struct ReducerOptions {
  long step_budget = 1000000;
  bool record_trace = true;
};

struct ReduceResult {
  Expression forests;
  ReductionTrace trace;
  long rule_applications = 0;
};

/// Normalizes an expression onto forests. Terms that are already forests
/// are passed through unchanged; every other term is driven through
/// atomic simplification and the loop reductions until acyclic.
ReduceResult reduce_to_forests(const Expression& e, const ReducerOptions& opt = {});

/// Leaves every cycle with at most one f vertex (d loops and 1f loops).
Expression eliminate_f_pairs(const Expression& e, const ReducerOptions& opt = {});

/// Single lemma-level steps on one diagram; the designated cycle is a vertex
/// list as produced by find_cycles.
Expression reduce_1f_loop(const Diagram& d, const std::vector<int>& cycle);
Expression reduce_d_loop(const Diagram& d, const std::vector<int>& cycle);

/// Replays a trace against an input expression by sequential substitution.
Expression replay(const ReductionTrace& trace, const Expression& input);

}  // namespace sunforest
