#pragma once

#include <algorithm>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include "sunforest/diagram.hpp"
#include "sunforest/oracle.hpp"

namespace sunforest::testing {

inline int perm_parity(std::vector<int> p) {
  int sign = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    while (p[i] != int(i)) {
      std::swap(p[i], p[p[i]]);
      sign = -sign;
    }
  return sign;
}

/// Random trivalent diagram with a prescribed vertex/f/external budget.
/// Legs not made external are paired uniformly (self-edges allowed).
inline Diagram random_diagram(std::mt19937_64& rng, int min_v = 3, int max_v = 8, int max_f = 4,
                              int max_ext = 6) {
  std::uniform_int_distribution<int> vcount(min_v, max_v);
  int n = vcount(rng);
  int nf = std::uniform_int_distribution<int>(0, std::min(max_f, n))(rng);
  std::vector<VertexKind> kinds(n, VertexKind::D);
  for (int i = 0; i < nf; ++i) kinds[i] = VertexKind::F;
  std::shuffle(kinds.begin(), kinds.end(), rng);

  int legs = 3 * n;
  int e = std::uniform_int_distribution<int>(0, std::min(max_ext, legs))(rng);
  if ((legs - e) % 2 != 0) e = e > 0 ? e - 1 : e + 1;

  std::vector<int> order(legs);
  for (int i = 0; i < legs; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);

  std::map<std::string, int> externals;
  for (int i = 0; i < e; ++i) externals["x" + std::to_string(i)] = order[i];
  std::vector<std::pair<int, int>> edges;
  for (int i = e; i + 1 < legs; i += 2) edges.push_back({order[i], order[i + 1]});

  std::vector<Vertex> verts(n);
  for (int v = 0; v < n; ++v) verts[v] = {kinds[v], {3 * v, 3 * v + 1, 3 * v + 2}};
  return Diagram::build(std::move(verts), std::move(edges), std::move(externals));
}

/// Random diagram that actually contains a cycle and is not identically zero.
inline Diagram random_loop_diagram(std::mt19937_64& rng, int min_v = 3, int max_v = 8,
                                   int max_f = 4, int max_ext = 6) {
  for (;;) {
    Diagram d = random_diagram(rng, min_v, max_v, max_f, max_ext);
    if (classify(d).forest) continue;
    if (canonicalize(d).zero) continue;
    return d;
  }
}

/// Isomorphic re-encoding: shuffled vertex order, relabelled legs, permuted
/// d legs and permuted f legs. Returns the product of the f-leg permutation
/// parities in *parity.
inline Diagram shuffled_iso(const Diagram& d, std::mt19937_64& rng, int* parity) {
  int n = d.vertex_count();
  std::vector<int> vperm(n);
  for (int i = 0; i < n; ++i) vperm[i] = i;
  std::shuffle(vperm.begin(), vperm.end(), rng);  // new position of old vertex i

  // random leg relabelling: new leg id of old leg
  std::map<int, int> legmap;
  {
    std::vector<int> ids;
    for (auto& v : d.vertices())
      for (int leg : v.legs) ids.push_back(leg);
    std::vector<int> shuffled = ids;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    for (std::size_t i = 0; i < ids.size(); ++i) legmap[ids[i]] = shuffled[i] + 1000;
  }

  *parity = 1;
  std::vector<Vertex> verts(n);
  for (int v = 0; v < n; ++v) {
    const Vertex& src = d.vertices()[v];
    std::vector<int> p = {0, 1, 2};
    std::shuffle(p.begin(), p.end(), rng);
    if (src.kind == VertexKind::F) *parity *= perm_parity(p);
    Vertex out;
    out.kind = src.kind;
    for (int s = 0; s < 3; ++s) out.legs[p[s]] = legmap.at(src.legs[s]);
    verts[vperm[v]] = out;
  }
  std::vector<std::pair<int, int>> edges;
  for (auto& [a, b] : d.internal_edges()) edges.push_back({legmap.at(a), legmap.at(b)});
  std::map<std::string, int> exts;
  for (auto& [name, leg] : d.externals()) exts[name] = legmap.at(leg);
  return Diagram::build(std::move(verts), std::move(edges), std::move(exts), d.delta_edges());
}

/// Direct matrix product trace of fundamental generators.
inline std::complex<double> fundamental_trace(const StructureTensors& t,
                                              const std::vector<int>& indices) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(t.N, t.N);
  for (int i : indices) m = m * t.lambdas[i];
  return m.trace();
}

/// Direct matrix product trace of adjoint-style D/F matrices,
/// [D_i]_{ab} = d_iab and [F_i]_{ab} = f_iab.
inline std::complex<double> adjoint_trace(const StructureTensors& t,
                                          const std::vector<VertexKind>& kinds,
                                          const std::vector<int>& indices) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(t.dim, t.dim);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    Eigen::MatrixXcd x(t.dim, t.dim);
    for (int a = 0; a < t.dim; ++a)
      for (int b = 0; b < t.dim; ++b)
        x(a, b) = kinds[k] == VertexKind::D ? t.d_at(indices[k], a, b) : t.f_at(indices[k], a, b);
    m = m * x;
  }
  return m.trace();
}

inline IndexAssignment random_assignment(const std::set<std::string>& names, int dim,
                                         std::mt19937_64& rng) {
  IndexAssignment a;
  std::uniform_int_distribution<int> dist(0, dim - 1);
  for (auto& n : names) a[n] = dist(rng);
  return a;
}

}  // namespace sunforest::testing
