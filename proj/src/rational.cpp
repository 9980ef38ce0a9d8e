#include "sunforest/rational.hpp"

#include <cmath>
#include <sstream>

namespace sunforest {

std::string rational_str(const Rational& r) {
  std::ostringstream os;
  os << numerator(r);
  if (denominator(r) != 1) os << "/" << denominator(r);
  return os.str();
}

bool Coefficient::operator<(const Coefficient& o) const {
  auto a = terms_.begin(), b = o.terms_.begin();
  for (; a != terms_.end() && b != o.terms_.end(); ++a, ++b) {
    if (a->first != b->first) return a->first < b->first;
    if (a->second.re != b->second.re) return a->second.re < b->second.re;
    if (a->second.im != b->second.im) return a->second.im < b->second.im;
  }
  return a == terms_.end() && b != o.terms_.end();
}

std::complex<double> Coefficient::eval(int n_value) const {
  std::complex<double> acc{0.0, 0.0};
  for (auto& [p, g] : terms_) acc += g.to_complex() * std::pow(double(n_value), p);
  return acc;
}

std::optional<Coefficient> Coefficient::divided_by(const Coefficient& divisor) const {
  if (divisor.is_zero()) return std::nullopt;
  if (is_zero()) return Coefficient::zero();
  // Long division from the top power down; Laurent shifts are free.
  Coefficient rem = *this;
  Coefficient quot;
  const auto lead = divisor.terms_.rbegin();  // highest power of the divisor
  int guard = int(terms_.size() + divisor.terms_.size()) * 4 + 64;
  while (!rem.is_zero()) {
    if (--guard < 0) return std::nullopt;
    auto top = rem.terms_.rbegin();
    int p = top->first - lead->first;
    GaussianRational c = top->second / lead->second;
    Coefficient mono = Coefficient::monomial(p, c);
    quot = quot + mono;
    rem = rem - mono * divisor;
  }
  return quot;
}

namespace {

// One printable monomial: coeff "r" (already known nonzero), optional *I,
// times N^power. Produces forms like "3", "1/2*I", "N", "2*N^3", "4/N^2".
std::string monomial_str(const Rational& r, bool imag, int power) {
  std::string mag = rational_str(r < 0 ? Rational(-r) : r);
  std::string out;
  bool unit_mag = (mag == "1");
  if (power == 0) {
    out = mag;
    if (imag) out = unit_mag ? "I" : out + "*I";
    return out;
  }
  std::string npart = "N";
  if (power > 1 || power < -1) npart += "^" + std::to_string(power > 0 ? power : -power);
  if (power > 0) {
    if (unit_mag && !imag)
      out = npart;
    else if (unit_mag)
      out = "I*" + npart;
    else
      out = imag ? mag + "*I*" + npart : mag + "*" + npart;
  } else {
    out = mag;
    if (imag) out = unit_mag ? "I" : out + "*I";
    out += "/" + npart;
  }
  return out;
}

}  // namespace

std::string Coefficient::str() const {
  if (terms_.empty()) return "0";
  // Highest powers first; real part before imaginary part at each power.
  std::string out;
  bool first = true;
  auto emit = [&](const Rational& r, bool imag, int power) {
    if (r == 0) return;
    bool neg = r < 0;
    if (first) {
      if (neg) out += "-";
      first = false;
    } else {
      out += neg ? " - " : " + ";
    }
    out += monomial_str(r, imag, power);
  };
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    emit(it->second.re, false, it->first);
    emit(it->second.im, true, it->first);
  }
  return out;
}

}  // namespace sunforest
