#include "sunforest/parser.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <sstream>

#include "sunforest/factors.hpp"
#include "sunforest/rules.hpp"

namespace sunforest {

namespace {

struct Lexer {
  const std::string& text;
  std::size_t pos = 0;

  explicit Lexer(const std::string& t) : text(t) {}

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }
  bool eat(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) throw SyntaxError(std::string("expected '") + c + "'", pos);
  }
  std::optional<std::string> ident() {
    skip_ws();
    if (pos >= text.size()) return std::nullopt;
    char c = text[pos];
    if (!std::isalpha(static_cast<unsigned char>(c)) && c != '_') return std::nullopt;
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    return text.substr(start, pos - start);
  }
  std::optional<Rational> integer() {
    skip_ws();
    if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
      return std::nullopt;
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    return Rational(boost::multiprecision::cpp_int(text.substr(start, pos - start)));
  }
  bool done() {
    skip_ws();
    return pos >= text.size();
  }
};

struct TermValue {
  Coefficient scalar = Coefficient::one();
  std::vector<TensorFactor> factors;
  std::size_t start = 0;
};

struct Parser {
  Lexer lex;
  explicit Parser(const std::string& t) : lex(t) {}

  Expression parse() {
    std::vector<TermValue> terms = parse_sum();
    if (!lex.done()) throw SyntaxError("trailing input", lex.pos);
    Expression e;
    std::optional<std::set<std::string>> free_set;
    for (auto& t : terms) {
      Diagram diag;
      int loops = 0;
      try {
        auto built = assemble_factors(t.factors);
        diag = std::move(built.first);
        loops = built.second;
      } catch (const MalformedDiagram& ex) {
        std::string w = ex.what();
        if (w.find("occurs") != std::string::npos) throw IndexArityError(w);
        throw;
      }
      std::set<std::string> frees = diag.external_names();
      if (t.scalar.is_zero() && frees.empty()) continue;  // a literal 0 matches any leg set
      if (!free_set)
        free_set = frees;
      else if (*free_set != frees)
        throw MixedFreeIndexError("terms with differing free-index sets");
      Coefficient c = t.scalar;
      for (int i = 0; i < loops; ++i) c = c * atomic_constants().delta_loop;
      e.add(diag, c);
    }
    return e;
  }

  std::vector<TermValue> parse_sum() {
    std::vector<TermValue> terms;
    bool neg = false;
    if (lex.eat('-'))
      neg = true;
    else
      lex.eat('+');
    for (;;) {
      TermValue t = parse_term();
      if (neg) t.scalar = -t.scalar;
      terms.push_back(std::move(t));
      char c = lex.peek();
      if (c == '+') {
        lex.eat('+');
        neg = false;
      } else if (c == '-') {
        lex.eat('-');
        neg = true;
      } else {
        break;
      }
    }
    return terms;
  }

  TermValue parse_term() {
    TermValue t;
    t.start = lex.pos;
    bool expect_atom = true;
    for (;;) {
      if (expect_atom) {
        parse_atom(t, false);
        expect_atom = false;
        continue;
      }
      char c = lex.peek();
      if (c == '*') {
        lex.eat('*');
        parse_atom(t, false);
      } else if (c == '/') {
        lex.eat('/');
        parse_atom(t, true);
      } else if (c == '(' || std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
        parse_atom(t, false);  // juxtaposition
      } else {
        break;
      }
    }
    return t;
  }

  void parse_atom(TermValue& t, bool divide) {
    std::size_t at = lex.pos;
    char c = lex.peek();
    if (std::isdigit(static_cast<unsigned char>(c))) {
      Rational r = *lex.integer();
      apply_scalar(t, Coefficient::of(r), divide, at);
      return;
    }
    if (c == '(') {
      lex.expect('(');
      std::vector<TermValue> sub = parse_sum();
      lex.expect(')');
      Coefficient acc;
      for (auto& s : sub) {
        if (!s.factors.empty())
          throw SyntaxError("parenthesized subexpression must be scalar", at);
        acc = acc + s.scalar;
      }
      apply_scalar(t, acc, divide, at);
      return;
    }
    auto id = lex.ident();
    if (!id) throw SyntaxError("expected a factor or scalar", at);
    if (*id == "I" && lex.peek() != '(') {
      apply_scalar(t, Coefficient::imaginary(), divide, at);
      return;
    }
    if (*id == "N" && lex.peek() != '(') {
      int power = 1;
      if (lex.eat('^')) {
        bool neg = lex.eat('-');
        auto p = lex.integer();
        if (!p) throw SyntaxError("expected an exponent", lex.pos);
        power = int(p->convert_to<long>());
        if (neg) power = -power;
      }
      apply_scalar(t, Coefficient::monomial(power, GaussianRational(1)), divide, at);
      return;
    }
    if (*id == "d" || *id == "f" || *id == "delta") {
      if (divide) throw SyntaxError("cannot divide by a tensor factor", at);
      lex.expect('(');
      std::vector<std::string> idx;
      for (;;) {
        auto name = lex.ident();
        if (!name) throw SyntaxError("expected an index name", lex.pos);
        idx.push_back(*name);
        if (!lex.eat(',')) break;
      }
      lex.expect(')');
      TensorFactor f;
      if (*id == "delta") {
        if (idx.size() != 2) throw SyntaxError("delta takes two indices", at);
        f.type = TensorFactor::Type::Delta;
      } else {
        if (idx.size() != 3) throw SyntaxError(*id + " takes three indices", at);
        f.type = *id == "d" ? TensorFactor::Type::D : TensorFactor::Type::F;
      }
      f.indices = idx;
      t.factors.push_back(std::move(f));
      return;
    }
    throw SyntaxError("unknown symbol '" + *id + "'", at);
  }

  void apply_scalar(TermValue& t, const Coefficient& c, bool divide, std::size_t at) {
    if (!divide) {
      t.scalar = t.scalar * c;
      return;
    }
    auto q = t.scalar.divided_by(c);
    if (!q) throw SyntaxError("division does not stay a Laurent polynomial in N", at);
    t.scalar = *q;
  }
};

std::string fresh_dummy_base(const std::set<std::string>& taken) {
  std::string base = "k";
  for (;;) {
    bool clash = false;
    for (auto& n : taken)
      if (n.rfind(base, 0) == 0 && n.size() > base.size() &&
          std::isdigit(static_cast<unsigned char>(n[base.size()])))
        clash = true;
    if (!clash) return base;
    base += "k";
  }
}

}  // namespace

Expression parse_expression(const std::string& text) { return Parser(text).parse(); }

std::string format_diagram(const Diagram& d) {
  std::set<std::string> taken = d.external_names();
  std::string base = fresh_dummy_base(taken);
  std::map<int, std::string> leg_dummy;
  int counter = 0;
  auto leg_name = [&](int leg) -> std::string {
    if (auto n = d.external_name_of(leg)) return *n;
    auto it = leg_dummy.find(leg);
    if (it != leg_dummy.end()) return it->second;
    std::string nm = base + std::to_string(counter++);
    int peer = *d.edge_peer(leg);
    leg_dummy[leg] = nm;
    leg_dummy[peer] = nm;
    return nm;
  };
  std::ostringstream os;
  bool first = true;
  for (auto& v : d.vertices()) {
    if (!first) os << " ";
    first = false;
    os << kind_char(v.kind) << "(" << leg_name(v.legs[0]) << "," << leg_name(v.legs[1]) << ","
       << leg_name(v.legs[2]) << ")";
  }
  for (auto& [a, b] : d.delta_edges()) {
    if (!first) os << " ";
    first = false;
    os << "delta(" << a << "," << b << ")";
  }
  return os.str();
}

std::string format_expression(const Expression& e) {
  if (e.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& [enc, term] : e.terms()) {
    Coefficient c = term.coeff;
    std::string cs = c.str();
    bool negative_lead = !cs.empty() && cs[0] == '-';
    if (negative_lead) {
      c = -c;
      cs = c.str();
    }
    if (first) {
      if (negative_lead) os << "-";
      first = false;
    } else {
      os << (negative_lead ? " - " : " + ");
    }
    std::string body = format_diagram(term.rep);
    if (body.empty()) {
      // pure scalar term
      os << (c.terms().size() > 1 ? "(" + cs + ")" : cs);
      continue;
    }
    if (c.is_one()) {
      os << body;
    } else if (c.terms().size() > 1) {
      os << "(" << cs << ")*" << body;
    } else {
      os << cs << "*" << body;
    }
  }
  return os.str();
}

}  // namespace sunforest
