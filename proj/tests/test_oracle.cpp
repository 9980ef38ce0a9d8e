#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "sunforest/oracle.hpp"
#include "sunforest/parser.hpp"

using namespace sunforest;
using namespace sunforest::testing;

TEST_CASE("structure tensor invariants hold for N = 2..8") {
  for (int n = 2; n <= 8; ++n) {
    const StructureTensors& t = structure_tensors(n);
    REQUIRE(t.dim == n * n - 1);
    REQUIRE(int(t.lambdas.size()) == t.dim);
    for (int a = 0; a < t.dim; ++a) {
      CHECK(std::abs(t.lambdas[a].trace()) < 1e-12);
      CHECK((t.lambdas[a] - t.lambdas[a].adjoint()).norm() < 1e-12);
      for (int b = 0; b < t.dim; ++b) {
        std::complex<double> tr = (t.lambdas[a] * t.lambdas[b]).trace();
        CHECK(std::abs(tr - (a == b ? 2.0 : 0.0)) < 1e-12);
      }
    }
    // total symmetry / antisymmetry on sampled triples
    std::mt19937_64 rng(n);
    std::uniform_int_distribution<int> dist(0, t.dim - 1);
    for (int it = 0; it < 200; ++it) {
      int a = dist(rng), b = dist(rng), c = dist(rng);
      CHECK(std::abs(t.d_at(a, b, c) - t.d_at(b, a, c)) < 1e-12);
      CHECK(std::abs(t.d_at(a, b, c) - t.d_at(c, b, a)) < 1e-12);
      CHECK(std::abs(t.f_at(a, b, c) + t.f_at(b, a, c)) < 1e-12);
      CHECK(std::abs(t.f_at(a, b, c) + t.f_at(c, b, a)) < 1e-12);
    }
  }
}

TEST_CASE("su(2) degenerates to the epsilon tensor") {
  const StructureTensors& t = structure_tensors(2);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) CHECK(std::abs(t.d_at(a, b, c)) < 1e-12);
  CHECK(t.f_at(0, 1, 2) == doctest::Approx(1.0));
  CHECK(t.f_at(1, 0, 2) == doctest::Approx(-1.0));
}

TEST_CASE("standard Gell-Mann values at N=3") {
  const StructureTensors& t = structure_tensors(3);
  CHECK(t.f_at(0, 1, 2) == doctest::Approx(1.0));
  CHECK(t.d_at(0, 0, 7) == doctest::Approx(1.0 / std::sqrt(3.0)));
}

TEST_CASE("generator product law as a matrix identity") {
  for (int n = 2; n <= 5; ++n) {
    const StructureTensors& t = structure_tensors(n);
    std::complex<double> I{0, 1};
    double worst = 0;
    for (int a = 0; a < t.dim; ++a)
      for (int b = 0; b < t.dim; ++b) {
        Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(n, n);
        for (int i = 0; i < n; ++i) rhs(i, i) = 2.0 / n * (a == b ? 1.0 : 0.0);
        for (int k = 0; k < t.dim; ++k)
          rhs += (t.d_at(a, b, k) + I * t.f_at(a, b, k)) * t.lambdas[k];
        worst = std::max(worst, (t.lambdas[a] * t.lambdas[b] - rhs).cwiseAbs().maxCoeff());
      }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("diagram evaluation basics") {
  const StructureTensors& t3 = structure_tensors(3);
  Expression delta = parse_expression("delta(i,j)");
  const Diagram& dd = delta.terms().begin()->second.rep;
  CHECK(eval_diagram(dd, t3, {{"i", 2}, {"j", 2}}) == doctest::Approx(1.0));
  CHECK(eval_diagram(dd, t3, {{"i", 2}, {"j", 3}}) == doctest::Approx(0.0));

  Expression dv = parse_expression("d(i,j,k)");
  CHECK(eval_diagram(dv.terms().begin()->second.rep, t3, {{"i", 0}, {"j", 0}, {"k", 7}}) ==
        doctest::Approx(1.0 / std::sqrt(3.0)));

  // fully closed ff bubble
  Expression closed = parse_expression("f(a,b,c) f(a,b,c)");
  for (int n : {2, 3, 4}) {
    const StructureTensors& t = structure_tensors(n);
    CHECK(eval_expression(closed, t, {}).real() ==
          doctest::Approx(double(n) * (n * n - 1)).epsilon(1e-10));
  }

  CHECK_THROWS_AS(eval_diagram(dd, t3, {{"i", 1}}), IncompleteAssignment);
}

TEST_CASE("expression evaluation") {
  const StructureTensors& t3 = structure_tensors(3);
  CHECK(std::abs(eval_expression(Expression::zero(), t3, {})) == 0.0);
  Expression lhs = parse_expression(
      "f(i1,i2,k) d(k,i3,i4) + f(i1,i3,k) d(k,i2,i4) + f(i1,i4,k) d(k,i2,i3)");
  std::mt19937_64 rng(17);
  for (int it = 0; it < 50; ++it) {
    auto asg = random_assignment({"i1", "i2", "i3", "i4"}, t3.dim, rng);
    CHECK(std::abs(eval_expression(lhs, t3, asg)) < 1e-10);
  }
}

TEST_CASE("verify_equal") {
  Expression x = parse_expression("d(i,j,k)");
  VerifyReport same = verify_equal(x, x, {3, 4});
  CHECK(same.pass);
  CHECK(same.max_abs_diff == 0.0);

  // the ff contraction identity, exhaustive at N=2
  Expression l = parse_expression("f(a,b,k) f(k,c,d)");
  Expression r = parse_expression(
      "(2/N)*delta(a,c) delta(b,d) - (2/N)*delta(a,d) delta(b,c) + d(a,c,m) d(m,b,d) - "
      "d(a,d,m) d(m,b,c)");
  VerifyReport rep = verify_equal(l, r, {2});
  CHECK(rep.pass);
  CHECK(rep.exhaustive);

  VerifyReport bub = verify_equal(parse_expression("d(i,p,q) d(j,p,q)"),
                                  parse_expression("(N - 4/N)*delta(i,j)"), {3, 4, 5, 6}, 200,
                                  1e-10);
  CHECK(bub.pass);

  CHECK_THROWS_AS(verify_equal(parse_expression("d(i,j,k)"), parse_expression("delta(i,j)"), {3}),
                  LegMismatch);
}

TEST_CASE("forest enumeration") {
  CHECK(enumerate_forests({"i", "j"}, 2).size() == 1);   // just the delta
  CHECK(enumerate_forests({"i", "j", "k"}, 2).size() == 2);  // d and f
  // four legs, up to two vertices: 3 delta pairings plus 3 tree pairings
  // with kinds dd, df, fd, ff each
  auto f4 = enumerate_forests({"a", "b", "c", "d"}, 2);
  CHECK(f4.size() == 15);
  CHECK(enumerate_forests({"a", "b", "c", "d"}, 0).size() == 3);  // delta pairings only
}

TEST_CASE("forest fit reproduces known contractions") {
  Expression bubble = parse_expression("d(i,p,q) d(j,p,q)");
  Expression fit = fit_forest_coefficients(bubble.terms().begin()->second.rep);
  CHECK(fit == parse_expression("(N - 4/N)*delta(i,j)"));

  Expression fbub = parse_expression("f(i,p,q) f(j,p,q)");
  CHECK(fit_forest_coefficients(fbub.terms().begin()->second.rep) ==
        parse_expression("N*delta(i,j)"));

  // a forest input fits as itself
  Expression tree = parse_expression("d(i,j,k)");
  CHECK(fit_forest_coefficients(tree.terms().begin()->second.rep) == tree);

  // tadpole fits to zero
  Expression tad = parse_expression("d(i,p,p)");
  CHECK(fit_forest_coefficients(tad.terms().begin()->second.rep).is_zero());
}
