#include "sunforest/expression.hpp"

namespace sunforest {

Expression Expression::scalar(Coefficient c) {
  Expression e;
  e.add(Diagram{}, c);
  return e;
}

Expression Expression::term(const Diagram& d, Coefficient c) {
  Expression e;
  e.add(d, c);
  return e;
}

void Expression::add(const Diagram& d, const Coefficient& c) {
  if (c.is_zero()) return;
  CanonicalDiagram cd = canonicalize(d);
  if (cd.zero) return;
  Coefficient signed_c = cd.sign > 0 ? c : -c;
  auto it = terms_.find(cd.encoding);
  if (it == terms_.end()) {
    terms_.emplace(cd.encoding, Term{std::move(cd.representative), std::move(signed_c)});
  } else {
    it->second.coeff = it->second.coeff + signed_c;
    if (it->second.coeff.is_zero()) terms_.erase(it);
  }
}

void Expression::add_all(const Expression& other) {
  for (auto& [enc, t] : other.terms_) {
    auto it = terms_.find(enc);
    if (it == terms_.end()) {
      terms_.emplace(enc, t);
    } else {
      it->second.coeff = it->second.coeff + t.coeff;
      if (it->second.coeff.is_zero()) terms_.erase(it);
    }
  }
}

const Coefficient* Expression::coefficient(const std::string& encoding) const {
  auto it = terms_.find(encoding);
  return it == terms_.end() ? nullptr : &it->second.coeff;
}

Expression Expression::operator+(const Expression& o) const {
  Expression r = *this;
  r.add_all(o);
  return r;
}

Expression Expression::operator-() const {
  Expression r = *this;
  for (auto& [enc, t] : r.terms_) t.coeff = -t.coeff;
  return r;
}

Expression Expression::operator-(const Expression& o) const { return *this + (-o); }

Expression Expression::scaled(const Coefficient& c) const {
  Expression r;
  if (c.is_zero()) return r;
  for (auto& [enc, t] : terms_) {
    Coefficient nc = t.coeff * c;
    if (!nc.is_zero()) r.terms_.emplace(enc, Term{t.rep, std::move(nc)});
  }
  return r;
}

Expression Expression::substituted(const std::string& target_encoding,
                                   const Expression& replacement) const {
  Expression r = *this;
  r.substitute_inplace(target_encoding, replacement);
  return r;
}

void Expression::substitute_inplace(const std::string& target_encoding,
                                    const Expression& replacement) {
  auto it = terms_.find(target_encoding);
  if (it == terms_.end()) throw TargetAbsent("substitute: target not present");
  Coefficient c = it->second.coeff;
  terms_.erase(it);
  add_all(replacement.scaled(c));
}

bool Expression::operator==(const Expression& o) const {
  if (terms_.size() != o.terms_.size()) return false;
  auto a = terms_.begin();
  auto b = o.terms_.begin();
  for (; a != terms_.end(); ++a, ++b) {
    if (a->first != b->first) return false;
    if (!(a->second.coeff == b->second.coeff)) return false;
  }
  return true;
}

std::set<std::string> Expression::external_names() const {
  std::set<std::string> names;
  for (auto& [enc, t] : terms_) {
    auto n = t.rep.external_names();
    names.insert(n.begin(), n.end());
  }
  return names;
}

}  // namespace sunforest
