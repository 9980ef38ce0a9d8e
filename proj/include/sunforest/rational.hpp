#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <complex>
#include <map>
#include <optional>
#include <string>

namespace sunforest {

using Rational = boost::multiprecision::cpp_rational;

/// Exact element of Q(i): re + im*i.
struct GaussianRational {
  Rational re;
  Rational im;

  GaussianRational() = default;
  GaussianRational(Rational r) : re(std::move(r)) {}
  GaussianRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
  GaussianRational(long r) : re(r) {}

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }

  GaussianRational operator-() const { return {-re, -im}; }
  GaussianRational operator+(const GaussianRational& o) const { return {re + o.re, im + o.im}; }
  GaussianRational operator-(const GaussianRational& o) const { return {re - o.re, im - o.im}; }
  GaussianRational operator*(const GaussianRational& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  GaussianRational operator/(const GaussianRational& o) const {
    Rational n = o.re * o.re + o.im * o.im;
    return {(re * o.re + im * o.im) / n, (im * o.re - re * o.im) / n};
  }
  bool operator==(const GaussianRational& o) const { return re == o.re && im == o.im; }
  bool operator!=(const GaussianRational& o) const { return !(*this == o); }

  std::complex<double> to_complex() const {
    return {re.convert_to<double>(), im.convert_to<double>()};
  }
};

/// Sparse Laurent polynomial in N over GaussianRational.
/// Invariant: no zero entries stored; the zero polynomial is the empty map.
class Coefficient {
 public:
  Coefficient() = default;

  static Coefficient zero() { return {}; }
  static Coefficient one() { return monomial(0, GaussianRational(1)); }
  static Coefficient imaginary() { return monomial(0, {Rational(0), Rational(1)}); }
  static Coefficient of(Rational r) { return monomial(0, GaussianRational(std::move(r))); }
  static Coefficient of(long n) { return of(Rational(n)); }
  static Coefficient of(long num, long den) { return of(Rational(num, den)); }
  static Coefficient monomial(int power, GaussianRational g) {
    Coefficient c;
    if (!g.is_zero()) c.terms_[power] = std::move(g);
    return c;
  }

  bool is_zero() const { return terms_.empty(); }
  bool is_one() const {
    return terms_.size() == 1 && terms_.begin()->first == 0 &&
           terms_.begin()->second == GaussianRational(1);
  }
  const std::map<int, GaussianRational>& terms() const { return terms_; }

  Coefficient operator-() const {
    Coefficient r;
    for (auto& [p, g] : terms_) r.terms_[p] = -g;
    return r;
  }
  Coefficient operator+(const Coefficient& o) const {
    Coefficient r = *this;
    for (auto& [p, g] : o.terms_) {
      auto it = r.terms_.find(p);
      if (it == r.terms_.end()) {
        r.terms_[p] = g;
      } else {
        it->second = it->second + g;
        if (it->second.is_zero()) r.terms_.erase(it);
      }
    }
    return r;
  }
  Coefficient operator-(const Coefficient& o) const { return *this + (-o); }
  Coefficient operator*(const Coefficient& o) const {
    Coefficient r;
    for (auto& [p, g] : terms_)
      for (auto& [q, h] : o.terms_) {
        GaussianRational prod = g * h;
        if (prod.is_zero()) continue;
        auto it = r.terms_.find(p + q);
        if (it == r.terms_.end()) {
          r.terms_[p + q] = prod;
        } else {
          it->second = it->second + prod;
          if (it->second.is_zero()) r.terms_.erase(it);
        }
      }
    return r;
  }
  bool operator==(const Coefficient& o) const { return terms_ == o.terms_; }
  bool operator!=(const Coefficient& o) const { return !(*this == o); }

  /// Deterministic total order (for stable printing of traces etc).
  bool operator<(const Coefficient& o) const;

  std::complex<double> eval(int n_value) const;

  /// Exact division in the Laurent ring; nullopt when the quotient does not
  /// stay a Laurent polynomial.
  std::optional<Coefficient> divided_by(const Coefficient& divisor) const;

  /// Reparseable rendering, e.g. "1/2 - 6/N", "2*I/N", "N^2 - 4".
  std::string str() const;

 private:
  std::map<int, GaussianRational> terms_;
};

std::string rational_str(const Rational& r);

}  // namespace sunforest
