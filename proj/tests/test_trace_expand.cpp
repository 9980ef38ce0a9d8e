#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "sunforest/oracle.hpp"
#include "sunforest/parser.hpp"
#include "sunforest/reducer.hpp"
#include "sunforest/trace_expand.hpp"

using namespace sunforest;
using namespace sunforest::testing;

namespace {

TraceWord fundamental(std::vector<std::string> idx) {
  TraceWord w;
  w.kind = TraceWord::Kind::Fundamental;
  w.indices = std::move(idx);
  return w;
}

}  // namespace

TEST_CASE("fundamental trace base cases") {
  CHECK(expand_trace(fundamental({})) ==
        Expression::scalar(Coefficient::monomial(1, GaussianRational(1))));
  CHECK(expand_trace(fundamental({"i"})).is_zero());
  CHECK(expand_trace(fundamental({"i", "j"})) == parse_expression("2*delta(i,j)"));
  CHECK(expand_trace(fundamental({"i", "j", "k"})) ==
        parse_expression("2*d(i,j,k) + 2*I*f(i,j,k)"));
}

TEST_CASE("fundamental trace expansion equals the matrix trace") {
  std::mt19937_64 rng(77);
  for (int len = 3; len <= 6; ++len) {
    std::vector<std::string> names;
    for (int i = 0; i < len; ++i) names.push_back("i" + std::to_string(i));
    Expression e = expand_trace(fundamental(names));
    for (int n : {2, 3, 4}) {
      const StructureTensors& t = structure_tensors(n);
      std::uniform_int_distribution<int> dist(0, t.dim - 1);
      for (int it = 0; it < 40; ++it) {
        std::vector<int> idx(len);
        IndexAssignment asg;
        for (int i = 0; i < len; ++i) {
          idx[i] = dist(rng);
          asg[names[i]] = idx[i];
        }
        std::complex<double> direct = fundamental_trace(t, idx);
        std::complex<double> expanded = eval_expression(e, t, asg);
        CHECK(std::abs(direct - expanded) < 1e-9);
      }
    }
  }
}

TEST_CASE("cyclic rotations expand to the identical expression") {
  std::vector<std::string> w = {"a", "b", "c", "e", "g"};
  Expression base = expand_trace(fundamental(w));
  for (int r = 1; r < int(w.size()); ++r) {
    std::vector<std::string> rot(w.begin() + r, w.end());
    rot.insert(rot.end(), w.begin(), w.begin() + r);
    CHECK(expand_trace(fundamental(rot)) == base);
  }
}

TEST_CASE("symmetrized words keep only the d branch") {
  // (T(i1 i2 X) + T(i2 i1 X))/2 = (2/N) delta Tr(X) + d-glued Tr(k X),
  // checked numerically against matrix traces
  std::vector<std::string> w = {"i1", "i2", "a", "b"};
  std::vector<std::string> ws = {"i2", "i1", "a", "b"};
  Expression sym =
      (expand_trace(fundamental(w)) + expand_trace(fundamental(ws))).scaled(Coefficient::of(1, 2));
  const StructureTensors& t = structure_tensors(3);
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> dist(0, t.dim - 1);
  for (int it = 0; it < 60; ++it) {
    int a1 = dist(rng), a2 = dist(rng), a3 = dist(rng), a4 = dist(rng);
    IndexAssignment asg{{"i1", a1}, {"i2", a2}, {"a", a3}, {"b", a4}};
    // direct: (2/N) delta tr(X) + sum_k d_{i1 i2 k} tr(lambda_k X)
    std::complex<double> direct =
        2.0 / t.N * (a1 == a2 ? 1.0 : 0.0) * fundamental_trace(t, {a3, a4});
    for (int k = 0; k < t.dim; ++k)
      direct += t.d_at(a1, a2, k) * fundamental_trace(t, {k, a3, a4});
    CHECK(std::abs(direct - eval_expression(sym, t, asg)) < 1e-9);
  }
}

TEST_CASE("adjoint trace diagrams equal matrix traces") {
  std::mt19937_64 rng(88);
  for (int len = 2; len <= 5; ++len) {
    for (auto kind : {TraceWord::Kind::AdjointD, TraceWord::Kind::AdjointF}) {
      TraceWord w;
      w.kind = kind;
      for (int i = 0; i < len; ++i) w.indices.push_back("i" + std::to_string(i));
      Diagram loop = adjoint_trace_diagram(w);
      std::vector<VertexKind> kinds(
          len, kind == TraceWord::Kind::AdjointD ? VertexKind::D : VertexKind::F);
      for (int n : {3, 4}) {
        const StructureTensors& t = structure_tensors(n);
        std::uniform_int_distribution<int> dist(0, t.dim - 1);
        for (int it = 0; it < 25; ++it) {
          std::vector<int> idx(len);
          IndexAssignment asg;
          for (int i = 0; i < len; ++i) {
            idx[i] = dist(rng);
            asg[w.indices[i]] = idx[i];
          }
          std::complex<double> direct = adjoint_trace(t, kinds, idx);
          double via = eval_diagram(loop, t, asg);
          CHECK(std::abs(direct - via) < 1e-9);
        }
      }
    }
  }
}

TEST_CASE("mixed adjoint words carry per-letter kinds") {
  TraceWord w;
  w.kind = TraceWord::Kind::Mixed;
  w.indices = {"a", "b", "c", "e"};
  w.letter_kinds = {VertexKind::D, VertexKind::D, VertexKind::F, VertexKind::F};
  Diagram loop = adjoint_trace_diagram(w);
  const StructureTensors& t = structure_tensors(3);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> dist(0, t.dim - 1);
  for (int it = 0; it < 40; ++it) {
    std::vector<int> idx(4);
    IndexAssignment asg;
    for (int i = 0; i < 4; ++i) {
      idx[i] = dist(rng);
      asg[w.indices[i]] = idx[i];
    }
    CHECK(std::abs(adjoint_trace(t, w.letter_kinds, idx) - eval_diagram(loop, t, asg)) < 1e-9);
  }
}

TEST_CASE("short adjoint words are rejected") {
  TraceWord w;
  w.kind = TraceWord::Kind::AdjointD;
  w.indices = {"i"};
  CHECK_THROWS_AS(adjoint_trace_diagram(w), WordTooShort);
}

TEST_CASE("the dd bubble diagram reduces to its known value") {
  TraceWord w;
  w.kind = TraceWord::Kind::AdjointD;
  w.indices = {"i", "j"};
  Expression red = reduce_to_forests(Expression::term(adjoint_trace_diagram(w))).forests;
  CHECK(red == parse_expression("(N - 4/N)*delta(i,j)"));
}
