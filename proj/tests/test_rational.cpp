#include <doctest.h>

#include <random>

#include "sunforest/rational.hpp"

using namespace sunforest;

namespace {

Coefficient random_coefficient(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nterms(0, 3), power(-3, 3), num(-6, 6), den(1, 4);
  Coefficient c;
  int k = nterms(rng);
  for (int i = 0; i < k; ++i) {
    GaussianRational g{Rational(num(rng), den(rng)), Rational(num(rng), den(rng))};
    c = c + Coefficient::monomial(power(rng), g);
  }
  return c;
}

}  // namespace

TEST_CASE("coefficient evaluation") {
  Coefficient two_over_n = Coefficient::monomial(-1, GaussianRational(2));
  CHECK(two_over_n.eval(4).real() == doctest::Approx(0.5));

  Coefficient c = Coefficient::of(1, 2) + Coefficient::monomial(-1, GaussianRational(-6));
  CHECK(c.eval(3).real() == doctest::Approx(-1.5));

  CHECK(Coefficient::zero().eval(5) == std::complex<double>(0.0, 0.0));
  CHECK(Coefficient::imaginary().eval(3).imag() == doctest::Approx(1.0));
}

TEST_CASE("ring axioms on random coefficients") {
  std::mt19937_64 rng(42);
  for (int it = 0; it < 200; ++it) {
    Coefficient a = random_coefficient(rng);
    Coefficient b = random_coefficient(rng);
    Coefficient c = random_coefficient(rng);
    CHECK((a + b) + c == a + (b + c));
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK((a + b) - b == a);
    CHECK(a + (-a) == Coefficient::zero());
  }
}

TEST_CASE("evaluation is a ring homomorphism") {
  std::mt19937_64 rng(7);
  for (int it = 0; it < 100; ++it) {
    Coefficient a = random_coefficient(rng);
    Coefficient b = random_coefficient(rng);
    for (int n : {2, 3, 5}) {
      auto lhs = (a * b).eval(n);
      auto rhs = a.eval(n) * b.eval(n);
      CHECK(std::abs(lhs - rhs) < 1e-9 * (1.0 + std::abs(rhs)));
      CHECK(std::abs((a + b).eval(n) - (a.eval(n) + b.eval(n))) < 1e-9);
    }
  }
}

TEST_CASE("exact division") {
  Coefficient n2m1 = Coefficient::monomial(2, GaussianRational(1)) - Coefficient::one();
  Coefficient np1 = Coefficient::monomial(1, GaussianRational(1)) + Coefficient::one();
  Coefficient nm1 = Coefficient::monomial(1, GaussianRational(1)) - Coefficient::one();
  auto q = n2m1.divided_by(np1);
  REQUIRE(q.has_value());
  CHECK(*q == nm1);

  // division by a monomial is always exact in the Laurent ring
  Coefficient c = Coefficient::monomial(1, GaussianRational(1)) +
                  Coefficient::monomial(-1, GaussianRational(-4));
  auto q2 = c.divided_by(Coefficient::monomial(-1, GaussianRational(2)));
  REQUIRE(q2.has_value());
  CHECK(*q2 == Coefficient::monomial(2, GaussianRational(Rational(1, 2))) + Coefficient::of(-2));

  CHECK(!Coefficient::one().divided_by(np1).has_value());
  CHECK(Coefficient::zero().divided_by(np1).has_value());

  std::mt19937_64 rng(11);
  for (int it = 0; it < 100; ++it) {
    Coefficient a = random_coefficient(rng);
    Coefficient b = random_coefficient(rng);
    if (b.is_zero()) continue;
    auto d = (a * b).divided_by(b);
    REQUIRE(d.has_value());
    CHECK(*d == a);
  }
}
