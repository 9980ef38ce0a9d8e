#include "sunforest/rules.hpp"

#include <algorithm>
#include <map>

#include "sunforest/assembler.hpp"

namespace sunforest {

const char* rule_name(RuleId id) {
  switch (id) {
    case RuleId::FF_CONTRACT: return "FF_CONTRACT";
    case RuleId::FF_EXPAND: return "FF_EXPAND";
    case RuleId::JACOBI_MOVE: return "JACOBI_MOVE";
    case RuleId::ATOMIC_SIMPLIFY: return "ATOMIC_SIMPLIFY";
    case RuleId::CYCLE_SOLVE: return "CYCLE_SOLVE";
  }
  return "?";
}

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::Atomic: return "Atomic";
    case Phase::Lemma1: return "Lemma1";
    case Phase::Lemma3: return "Lemma3";
    case Phase::Lemma4: return "Lemma4";
    case Phase::ForestNorm: return "ForestNorm";
  }
  return "?";
}

Expression RuleOutput::expr() const {
  Expression e;
  for (auto& [c, d] : raw) e.add(d, c);
  return e;
}

const AtomicConstants& atomic_constants() {
  static const AtomicConstants table = [] {
    AtomicConstants t;
    t.dd_bubble = Coefficient::monomial(1, GaussianRational(1)) +
                  Coefficient::monomial(-1, GaussianRational(-4));
    t.ff_bubble = Coefficient::monomial(1, GaussianRational(1));
    t.delta_loop = Coefficient::monomial(2, GaussianRational(1)) +
                   Coefficient::monomial(0, GaussianRational(-1));
    return t;
  }();
  return table;
}

namespace {

Coefficient two_over_n() { return Coefficient::monomial(-1, GaussianRational(2)); }

/// Copies a diagram minus two removed vertices into a reusable assembler
/// base. Outer legs of the removed pair become junction ports awaiting one
/// more link from the rule; the contracted edge is dropped entirely.
struct RewriteBase {
  DiagramAssembler base;
  std::map<int, DiagramAssembler::Port> outer;  // old outer leg -> junction
  std::map<int, int> vmap;                      // old kept vertex -> new index

  RewriteBase(const Diagram& d, int va, int vb, const std::vector<int>& consumed_edges) {
    for (int v = 0; v < d.vertex_count(); ++v) {
      if (v == va || v == vb) continue;
      vmap[v] = base.add_vertex(d.vertices()[v].kind);
    }
    auto port_of = [&](int leg) -> DiagramAssembler::Port {
      LegRef lr = d.owner(leg);
      if (lr.vertex == va || lr.vertex == vb) {
        auto it = outer.find(leg);
        if (it != outer.end()) return it->second;
        auto p = base.junction();
        outer[leg] = p;
        return p;
      }
      return base.slot(vmap.at(lr.vertex), lr.slot);
    };
    for (int e = 0; e < int(d.internal_edges().size()); ++e) {
      if (std::find(consumed_edges.begin(), consumed_edges.end(), e) != consumed_edges.end()) {
        continue;
      }
      auto [a, b] = d.internal_edges()[e];
      base.link(port_of(a), port_of(b));
    }
    for (auto& [name, leg] : d.externals()) base.link(port_of(leg), base.external(name));
    for (auto& [na, nb] : d.delta_edges()) base.link(base.external(na), base.external(nb));
  }
};

std::pair<Coefficient, Diagram> finish(DiagramAssembler a, Coefficient c) {
  auto r = a.finalize();
  for (int i = 0; i < r.closed_delta_loops; ++i) c = c * atomic_constants().delta_loop;
  return {std::move(c), std::move(r.diagram)};
}

int edge_end_at(const Diagram& d, int edge_index, int vertex) {
  auto [a, b] = d.internal_edges()[edge_index];
  if (d.owner(a).vertex == vertex) return a;
  if (d.owner(b).vertex == vertex) return b;
  throw PreconditionViolated("edge does not touch vertex");
}

}  // namespace

RuleOutput apply_ff_contraction(const Diagram& d, int edge_index) {
  if (edge_index < 0 || edge_index >= int(d.internal_edges().size()))
    throw NotAnFFEdge("no such edge");
  auto [la, lb] = d.internal_edges()[edge_index];
  int va = d.owner(la).vertex, vb = d.owner(lb).vertex;
  if (va == vb) throw NotAnFFEdge("edge is a self-edge");
  if (d.vertices()[va].kind != VertexKind::F || d.vertices()[vb].kind != VertexKind::F)
    throw NotAnFFEdge("edge does not join two f vertices");

  auto t1 = rotate_legs(d.vertices()[va], la, 2);  // (i1, i2, edge)
  auto t2 = rotate_legs(d.vertices()[vb], lb, 0);  // (edge, i3, i4)
  int i1 = t1[0], i2 = t1[1], i3 = t2[1], i4 = t2[2];

  RewriteBase rb(d, va, vb, {edge_index});
  RuleOutput out;
  {
    DiagramAssembler a = rb.base;
    a.link(rb.outer.at(i1), rb.outer.at(i3));
    a.link(rb.outer.at(i2), rb.outer.at(i4));
    out.raw.push_back(finish(std::move(a), two_over_n()));
  }
  {
    DiagramAssembler a = rb.base;
    a.link(rb.outer.at(i1), rb.outer.at(i4));
    a.link(rb.outer.at(i2), rb.outer.at(i3));
    out.raw.push_back(finish(std::move(a), -two_over_n()));
  }
  {
    DiagramAssembler a = rb.base;
    int d1 = a.add_vertex(VertexKind::D);
    int d2 = a.add_vertex(VertexKind::D);
    a.link(a.slot(d1, 0), rb.outer.at(i1));
    a.link(a.slot(d1, 1), rb.outer.at(i3));
    a.link(a.slot(d1, 2), a.slot(d2, 0));
    a.link(a.slot(d2, 1), rb.outer.at(i2));
    a.link(a.slot(d2, 2), rb.outer.at(i4));
    out.raw.push_back(finish(std::move(a), Coefficient::one()));
  }
  {
    DiagramAssembler a = rb.base;
    int d1 = a.add_vertex(VertexKind::D);
    int d2 = a.add_vertex(VertexKind::D);
    a.link(a.slot(d1, 0), rb.outer.at(i1));
    a.link(a.slot(d1, 1), rb.outer.at(i4));
    a.link(a.slot(d1, 2), a.slot(d2, 0));
    a.link(a.slot(d2, 1), rb.outer.at(i2));
    a.link(a.slot(d2, 2), rb.outer.at(i3));
    out.raw.push_back(finish(std::move(a), -Coefficient::one()));
  }
  return out;
}

RuleOutput apply_jacobi_move(const Diagram& d, int edge_index, int keep_leg) {
  if (edge_index < 0 || edge_index >= int(d.internal_edges().size()))
    throw NotAnFDEdge("no such edge");
  auto [la, lb] = d.internal_edges()[edge_index];
  int va = d.owner(la).vertex, vb = d.owner(lb).vertex;
  if (va == vb) throw NotAnFDEdge("edge is a self-edge");
  VertexKind ka = d.vertices()[va].kind, kb = d.vertices()[vb].kind;
  int vf, vd;
  if (ka == VertexKind::F && kb == VertexKind::D) {
    vf = va;
    vd = vb;
  } else if (ka == VertexKind::D && kb == VertexKind::F) {
    vf = vb;
    vd = va;
  } else {
    throw NotAnFDEdge("edge does not join an f vertex and a d vertex");
  }
  int lf = edge_end_at(d, edge_index, vf);
  int ld = edge_end_at(d, edge_index, vd);

  auto tf = rotate_legs(d.vertices()[vf], lf, 2);  // (i1, i2, edge)
  int i1 = tf[0], i2 = tf[1];
  int sign = 1;
  if (keep_leg >= 0) {
    if (keep_leg == i2) {
      std::swap(i1, i2);
      sign = -1;  // one f-leg transposition to put the kept leg first
    } else if (keep_leg != i1) {
      throw NotAnFDEdge("keep_leg is not a free leg of the f vertex");
    }
  }
  auto td = rotate_legs(d.vertices()[vd], ld, 0);  // (edge, i3, i4)
  int i3 = td[1], i4 = td[2];

  RewriteBase rb(d, vf, vd, {edge_index});
  RuleOutput out;
  auto emit = [&](int fa, int fb, int da, int db, Coefficient c) {
    DiagramAssembler a = rb.base;
    int nf = a.add_vertex(VertexKind::F);
    int nd = a.add_vertex(VertexKind::D);
    a.link(a.slot(nf, 0), rb.outer.at(fa));
    a.link(a.slot(nf, 1), rb.outer.at(fb));
    a.link(a.slot(nf, 2), a.slot(nd, 0));
    a.link(a.slot(nd, 1), rb.outer.at(da));
    a.link(a.slot(nd, 2), rb.outer.at(db));
    out.raw.push_back(finish(std::move(a), std::move(c)));
  };
  Coefficient c = sign > 0 ? -Coefficient::one() : Coefficient::one();
  emit(i1, i3, i2, i4, c);  // -f(i1,i3,m) d(m,i2,i4)
  emit(i1, i4, i2, i3, c);  // -f(i1,i4,m) d(m,i2,i3)
  return out;
}

RuleOutput apply_ff_expansion(const Diagram& d, int edge_index, int i1_leg, int i2_leg) {
  if (edge_index < 0 || edge_index >= int(d.internal_edges().size()))
    throw PreconditionViolated("no such edge");
  auto [la, lb] = d.internal_edges()[edge_index];
  int va = d.owner(la).vertex, vb = d.owner(lb).vertex;
  if (va == vb) throw PreconditionViolated("edge is a self-edge");
  if (d.vertices()[va].kind != VertexKind::D || d.vertices()[vb].kind != VertexKind::D)
    throw PreconditionViolated("ff expansion needs a d-d edge");
  int v1 = d.owner(i1_leg).vertex;
  if (v1 != va && v1 != vb) throw PreconditionViolated("i1 leg not on the edge pair");
  int v2 = v1 == va ? vb : va;
  if (d.owner(i2_leg).vertex != v2) throw PreconditionViolated("i2 leg not on the opposite vertex");
  int l1 = edge_end_at(d, edge_index, v1);
  int l2 = edge_end_at(d, edge_index, v2);
  if (i1_leg == l1 || i2_leg == l2) throw PreconditionViolated("picked the contracted leg");
  int i3 = -1, i4 = -1;
  for (int leg : d.vertices()[v1].legs)
    if (leg != l1 && leg != i1_leg) i3 = leg;
  for (int leg : d.vertices()[v2].legs)
    if (leg != l2 && leg != i2_leg) i4 = leg;

  RewriteBase rb(d, v1, v2, {edge_index});
  RuleOutput out;
  {
    DiagramAssembler a = rb.base;
    int f1 = a.add_vertex(VertexKind::F);
    int f2 = a.add_vertex(VertexKind::F);
    a.link(a.slot(f1, 0), rb.outer.at(i1_leg));
    a.link(a.slot(f1, 1), rb.outer.at(i2_leg));
    a.link(a.slot(f1, 2), a.slot(f2, 0));
    a.link(a.slot(f2, 1), rb.outer.at(i3));
    a.link(a.slot(f2, 2), rb.outer.at(i4));
    out.raw.push_back(finish(std::move(a), Coefficient::one()));
  }
  {
    DiagramAssembler a = rb.base;
    a.link(rb.outer.at(i1_leg), rb.outer.at(i3));
    a.link(rb.outer.at(i2_leg), rb.outer.at(i4));
    out.raw.push_back(finish(std::move(a), -two_over_n()));
  }
  {
    DiagramAssembler a = rb.base;
    a.link(rb.outer.at(i1_leg), rb.outer.at(i4));
    a.link(rb.outer.at(i2_leg), rb.outer.at(i3));
    out.raw.push_back(finish(std::move(a), two_over_n()));
  }
  {
    DiagramAssembler a = rb.base;
    int d1 = a.add_vertex(VertexKind::D);
    int d2 = a.add_vertex(VertexKind::D);
    a.link(a.slot(d1, 0), rb.outer.at(i1_leg));
    a.link(a.slot(d1, 1), rb.outer.at(i4));
    a.link(a.slot(d1, 2), a.slot(d2, 0));
    a.link(a.slot(d2, 1), rb.outer.at(i2_leg));
    a.link(a.slot(d2, 2), rb.outer.at(i3));
    out.raw.push_back(finish(std::move(a), Coefficient::one()));
  }
  return out;
}

std::optional<AtomicStep> atomic_step(const Diagram& d) {
  // tadpole: an edge joining two legs of one vertex kills the term
  for (int e = 0; e < int(d.internal_edges().size()); ++e) {
    auto [a, b] = d.internal_edges()[e];
    if (d.owner(a).vertex == d.owner(b).vertex) {
      AtomicStep st;
      st.site = "tadpole v" + std::to_string(d.owner(a).vertex);
      return st;  // empty output: the term is zero
    }
  }
  // bubble: two vertices sharing two (or more) edges
  std::map<std::pair<int, int>, std::vector<int>> shared;
  for (int e = 0; e < int(d.internal_edges().size()); ++e) {
    auto [a, b] = d.internal_edges()[e];
    int u = d.owner(a).vertex, v = d.owner(b).vertex;
    if (u > v) std::swap(u, v);
    shared[{u, v}].push_back(e);
  }
  for (auto& [uv, edges] : shared) {
    if (edges.size() < 2) continue;
    auto [u, v] = uv;
    VertexKind ku = d.vertices()[u].kind, kv = d.vertices()[v].kind;
    AtomicStep st;
    st.site = std::string(1, kind_char(ku)) + std::string(1, kind_char(kv)) + "-bubble v" +
              std::to_string(u) + ",v" + std::to_string(v);
    if (ku != kv) return st;  // d-f bubble vanishes
    int e1 = edges[0], e2 = edges[1];
    int outer_u = -1, outer_v = -1;
    for (int leg : d.vertices()[u].legs) {
      int eu1 = edge_end_at(d, e1, u), eu2 = edge_end_at(d, e2, u);
      if (leg != eu1 && leg != eu2) outer_u = leg;
    }
    for (int leg : d.vertices()[v].legs) {
      int ev1 = edge_end_at(d, e1, v), ev2 = edge_end_at(d, e2, v);
      if (leg != ev1 && leg != ev2) outer_v = leg;
    }
    Coefficient c;
    if (ku == VertexKind::D) {
      c = atomic_constants().dd_bubble;
    } else {
      // aligned when both cyclic orders (outer, e1 leg, e2 leg) pair the
      // shared edges in the same order
      auto tu = rotate_legs(d.vertices()[u], outer_u, 0);
      auto tv = rotate_legs(d.vertices()[v], outer_v, 0);
      bool u_first_on_e1 = tu[1] == edge_end_at(d, e1, u);
      bool v_first_on_e1 = tv[1] == edge_end_at(d, e1, v);
      c = u_first_on_e1 == v_first_on_e1 ? atomic_constants().ff_bubble
                                         : -atomic_constants().ff_bubble;
    }
    RewriteBase rb(d, u, v, {e1, e2});
    DiagramAssembler a = rb.base;
    a.link(rb.outer.at(outer_u), rb.outer.at(outer_v));
    st.out.raw.push_back(finish(std::move(a), std::move(c)));
    return st;
  }
  return std::nullopt;
}

std::optional<Expression> atomic_simplify(const Diagram& d) {
  auto first = atomic_step(d);
  if (!first) return std::nullopt;
  Expression result;
  // worklist of terms still to scan
  std::vector<std::pair<Coefficient, Diagram>> work;
  for (auto& [c, dd] : first->out.raw) work.push_back({c, dd});
  int guard = d.vertex_count() * 8 + 64;
  while (!work.empty()) {
    if (--guard < 0) throw PreconditionViolated("atomic_simplify failed to reach a fixed point");
    auto [c, cur] = work.back();
    work.pop_back();
    auto st = atomic_step(cur);
    if (!st) {
      result.add(cur, c);
      continue;
    }
    for (auto& [c2, d2] : st->out.raw) work.push_back({c * c2, d2});
  }
  return result;
}

}  // namespace sunforest
