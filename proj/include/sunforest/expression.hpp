#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include "sunforest/diagram.hpp"
#include "sunforest/rational.hpp"

namespace sunforest {

struct TargetAbsent : std::runtime_error {
  explicit TargetAbsent(const std::string& what) : std::runtime_error(what) {}
};

/// Exact linear combination of canonical diagrams. Keys are canonical
/// encodings; canonical signs are folded into the coefficients on insertion
/// and identically-zero diagrams are dropped. No zero coefficients stored.
class Expression {
 public:
  struct Term {
    Diagram rep;
    Coefficient coeff;
  };

  Expression() = default;

  static Expression zero() { return {}; }
  static Expression scalar(Coefficient c);
  static Expression term(const Diagram& d, Coefficient c = Coefficient::one());

  void add(const Diagram& d, const Coefficient& c);
  void add_term(const Term& t) { add(t.rep, t.coeff); }
  void add_all(const Expression& other);

  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const std::map<std::string, Term>& terms() const { return terms_; }
  const Coefficient* coefficient(const std::string& encoding) const;

  Expression operator+(const Expression& o) const;
  Expression operator-(const Expression& o) const;
  Expression operator-() const;
  Expression scaled(const Coefficient& c) const;

  /// Replaces the target term, distributing its coefficient over the
  /// replacement. Throws TargetAbsent when the key is missing.
  Expression substituted(const std::string& target_encoding, const Expression& replacement) const;
  void substitute_inplace(const std::string& target_encoding, const Expression& replacement);

  bool operator==(const Expression& o) const;
  bool operator!=(const Expression& o) const { return !(*this == o); }

  /// Union of the free index names of all terms.
  std::set<std::string> external_names() const;

 private:
  std::map<std::string, Term> terms_;
};

}  // namespace sunforest
