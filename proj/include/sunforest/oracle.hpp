#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "sunforest/diagram.hpp"
#include "sunforest/expression.hpp"

namespace sunforest {

struct IncompleteAssignment : std::runtime_error {
  explicit IncompleteAssignment(const std::string& w) : std::runtime_error(w) {}
};
struct LegMismatch : std::runtime_error {
  explicit LegMismatch(const std::string& w) : std::runtime_error(w) {}
};
struct RankDeficient : std::runtime_error {
  explicit RankDeficient(const std::string& w) : std::runtime_error(w) {}
};
struct FitFailure : std::runtime_error {
  explicit FitFailure(const std::string& w) : std::runtime_error(w) {}
};

/// Generalized Gell-Mann basis for su(N) plus the derived d/f tensors,
/// normalized so Tr(lambda_a lambda_b) = 2 delta_ab.
struct StructureTensors {
  int N = 0;
  int dim = 0;  // N^2 - 1
  std::vector<Eigen::MatrixXcd> lambdas;
  std::vector<double> d;  // dim^3, index ((a*dim)+b)*dim+c
  std::vector<double> f;

  double d_at(int a, int b, int c) const { return d[(std::size_t(a) * dim + b) * dim + c]; }
  double f_at(int a, int b, int c) const { return f[(std::size_t(a) * dim + b) * dim + c]; }
};

StructureTensors build_structure_tensors(int N);
/// Cached per-N instance (built on first use).
const StructureTensors& structure_tensors(int N);

/// Adjoint index per external name, 0-based in [0, N^2-2].
using IndexAssignment = std::map<std::string, int>;

/// Full contraction with all external legs fixed. Diagram values are real.
double eval_diagram(const Diagram& d, const StructureTensors& t, const IndexAssignment& a);
std::complex<double> eval_expression(const Expression& e, const StructureTensors& t,
                                     const IndexAssignment& a);

/// Contraction with external legs left open; axes ordered by sorted name.
struct OpenTensor {
  std::vector<std::string> names;
  int dim = 1;
  std::vector<std::complex<double>> data;  // size dim^names.size(), row-major
};
OpenTensor eval_expression_open(const Expression& e, const StructureTensors& t);

struct VerifyReport {
  bool pass = true;
  double max_abs_diff = 0.0;
  long points = 0;
  bool exhaustive = false;
  std::string detail;
};

/// Compares two expressions on random assignments per N (exhaustive when
/// (N^2-1)^legs stays small). An empty expression compares as zero against
/// any leg set; otherwise the leg sets must agree.
VerifyReport verify_equal(const Expression& a, const Expression& b, const std::vector<int>& ns,
                          long samples = 200, double tol = 1e-9, unsigned seed = 12345);

/// All forest diagrams (products of delta factors and trivalent d/f trees)
/// on the given external names, up to the vertex bound; canonically deduped.
std::vector<Diagram> enumerate_forests(const std::set<std::string>& names, int max_vertices);

struct FitOptions {
  std::vector<int> ns = {3, 4, 5, 6};
  int holdout = 7;
  int max_power = 3;            // Laurent powers fitted in [-max_power, max_power]
  int max_vertices = -1;        // default: the input diagram's vertex count
  double tol_fit = 1e-6;
  double tol_holdout = 1e-6;
  long max_denominator = 1000000;
  unsigned seed = 777;
};

/// Independent forest decomposition: solves for exact Laurent coefficients
/// from numeric evaluations across several N, validated on a holdout N.
Expression fit_forest_coefficients(const Diagram& d, const FitOptions& opt = {});

}  // namespace sunforest
