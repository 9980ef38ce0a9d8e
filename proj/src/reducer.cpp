#include "sunforest/reducer.hpp"
#include <cstdlib>
#include <cstdio>

#include <algorithm>
#include <set>

namespace sunforest {

Measure measure(const Diagram& d) {
  Measure m;
  m.total_vertices = d.vertex_count();
  CycleReport r = find_cycles(d);
  std::set<int> on_cycle;
  for (auto& c : r.cycles) on_cycle.insert(c.vertices.begin(), c.vertices.end());
  m.cycle_vertices = int(on_cycle.size());
  for (int v : on_cycle)
    if (d.vertices()[v].kind == VertexKind::F) ++m.cycle_f;
  return m;
}

namespace {

int edge_between(const Diagram& d, int u, int v) {
  int found = -1;
  for (int e = 0; e < int(d.internal_edges().size()); ++e) {
    auto [a, b] = d.internal_edges()[e];
    int x = d.owner(a).vertex, y = d.owner(b).vertex;
    if ((x == u && y == v) || (x == v && y == u)) {
      if (found >= 0) return -2;  // parallel edges: caller must atomic-clean first
      found = e;
    }
  }
  return found;
}

int leg_on_edge(const Diagram& d, int edge, int vertex) {
  auto [a, b] = d.internal_edges()[edge];
  if (d.owner(a).vertex == vertex) return a;
  if (d.owner(b).vertex == vertex) return b;
  return -1;
}

int third_leg(const Diagram& d, int vertex, int l1, int l2) {
  for (int leg : d.vertices()[vertex].legs)
    if (leg != l1 && leg != l2) return leg;
  return -1;
}

int first_ff_edge(const Diagram& d) {
  for (int e = 0; e < int(d.internal_edges().size()); ++e) {
    auto [a, b] = d.internal_edges()[e];
    int u = d.owner(a).vertex, v = d.owner(b).vertex;
    if (u != v && d.vertices()[u].kind == VertexKind::F && d.vertices()[v].kind == VertexKind::F)
      return e;
  }
  return -1;
}

std::optional<Expression> divided(const Expression& e, const Coefficient& q) {
  Expression out;
  for (auto& [enc, t] : e.terms()) {
    auto d = t.coeff.divided_by(q);
    if (!d) return std::nullopt;
    out.add(t.rep, *d);
  }
  return out;
}

struct RecipeResult {
  bool ok = false;
  Expression output;
  std::vector<RuleApplication> entries;
};

struct Executor {
  Expression local;
  std::vector<RuleApplication> entries;
  std::string enc0;
  Diagram rep0;
  Phase phase;
  long* budget = nullptr;

  Executor(const Diagram& rep, const std::string& enc, Phase ph, long* b)
      : enc0(enc), rep0(rep), phase(ph), budget(b) {
    local.add(rep, Coefficient::one());
  }

  // Applies `out`, an identity for the concrete diagram P, at canon(P).
  // Returns false when the chain target is no longer present.
  bool step(const Diagram& P, RuleId id, const std::string& site, const RuleOutput& out) {
    if (*budget <= 0) throw StepBudgetExceeded("rule application budget exhausted");
    --*budget;
    CanonicalDiagram cp = canonicalize(P);
    if (cp.zero) return false;
    if (!local.coefficient(cp.encoding)) return false;
    Expression repl = out.expr();
    if (cp.sign < 0) repl = repl.scaled(-Coefficient::one());
    entries.push_back({id, phase, site, cp.encoding, cp.representative, repl});
    local.substitute_inplace(cp.encoding, repl);
    return true;
  }

  RecipeResult finish() {
    RecipeResult r;
    const Coefficient* c0 = local.coefficient(enc0);
    if (std::getenv("SUNFOREST_DEBUG")) {
      fprintf(stderr, "[finish] phase=%s c0=%s terms=%zu\n", phase_name(phase),
              c0 ? c0->str().c_str() : "absent", local.size());
    }
    if (!c0) {
      r.ok = true;
      r.output = local;
      r.entries = entries;
      return r;
    }
    Coefficient c = *c0;
    Coefficient div = Coefficient::one() - c;
    if (div.is_zero()) return r;  // 0 = 0, no information
    Expression rest = local;
    rest.substitute_inplace(enc0, Expression::zero());
    auto out = divided(rest, div);
    if (!out) return r;
    r.ok = true;
    r.output = *out;
    r.entries = entries;
    r.entries.push_back({RuleId::CYCLE_SOLVE, phase, "close cycle", enc0, rep0, r.output});
    return r;
  }
};

struct LoopState {
  Diagram P;
  std::vector<int> cycle;
};

std::vector<int> remap_cycle(const std::vector<int>& cycle, int n, int rem_a, int rem_b,
                             int pos_a, int new_a, int pos_b, int new_b) {
  std::vector<int> shift(n, 0);
  for (int v = 0; v < n; ++v)
    shift[v] = (v > rem_a ? 1 : 0) + (v > rem_b ? 1 : 0);
  std::vector<int> out(cycle.size());
  for (int i = 0; i < int(cycle.size()); ++i) {
    if (i == pos_a)
      out[i] = new_a;
    else if (i == pos_b)
      out[i] = new_b;
    else
      out[i] = cycle[i] - shift[cycle[i]];
  }
  return out;
}

// Moves the f at cycle position fp forward past the next (d) vertex.
bool transport_move(Executor& ex, LoopState& st, int fp) {
  int len = int(st.cycle.size());
  int vf = st.cycle[fp];
  int vd = st.cycle[(fp + 1) % len];
  int vn = st.cycle[(fp + 2) % len];
  int vp = st.cycle[(fp - 1 + len) % len];
  int e_fwd = edge_between(st.P, vf, vd);
  int e_back = edge_between(st.P, vp, vf);
  int e_next = edge_between(st.P, vd, vn);
  if (e_fwd < 0 || e_back < 0 || e_next < 0) return false;
  int pend = third_leg(st.P, vf, leg_on_edge(st.P, e_fwd, vf), leg_on_edge(st.P, e_back, vf));
  RuleOutput out = apply_jacobi_move(st.P, e_fwd, pend);
  int fwd_leg = leg_on_edge(st.P, e_next, vd);
  auto td = rotate_legs(st.P.vertices()[vd], leg_on_edge(st.P, e_fwd, vd), 0);
  int pidx = td[1] == fwd_leg ? 0 : 1;
  int n = st.P.vertex_count();
  Diagram next = out.raw[pidx].second;
  if (!ex.step(st.P, RuleId::JACOBI_MOVE, "transport f past v" + std::to_string(vd), out))
    return false;
  // rule builds the f first (n-2) and the d it moved past second (n-1)
  st.cycle = remap_cycle(st.cycle, n, std::min(vf, vd), std::max(vf, vd), fp, n - 1,
                         (fp + 1) % len, n - 2);
  st.P = std::move(next);
  return true;
}

// Exchanges the pendant attachments of the d vertices at cycle positions
// (c, c+1) via the rearranged ff identity; side terms are strictly smaller.
bool swap_move(Executor& ex, LoopState& st, int c) {
  int len = int(st.cycle.size());
  int v1 = st.cycle[c];
  int v2 = st.cycle[(c + 1) % len];
  int vp = st.cycle[(c - 1 + len) % len];
  int vn = st.cycle[(c + 2) % len];
  int e = edge_between(st.P, v1, v2);
  int e_back = edge_between(st.P, vp, v1);
  int e_fwd = edge_between(st.P, v2, vn);
  if (e < 0 || e_back < 0 || e_fwd < 0) return false;
  int i1 = leg_on_edge(st.P, e_back, v1);
  int i2 = leg_on_edge(st.P, e_fwd, v2);
  RuleOutput out = apply_ff_expansion(st.P, e, i1, i2);
  int n = st.P.vertex_count();
  Diagram next = out.raw[3].second;
  if (!ex.step(st.P, RuleId::FF_EXPAND,
               "swap pendants at v" + std::to_string(v1) + ",v" + std::to_string(v2), out))
    return false;
  st.cycle = remap_cycle(st.cycle, n, std::min(v1, v2), std::max(v1, v2), c, n - 2,
                         (c + 1) % len, n - 1);
  st.P = std::move(next);
  return true;
}

// Exchanges the pendant of the f at cycle position fp with the pendant of
// the d at fp+1, keeping the f's backward edge. This is the Jacobi move with
// the opposite keep choice; the principal enters with coefficient -1, which
// is what eventually pins the attacked loop.
bool exchange_move(Executor& ex, LoopState& st, int fp) {
  int len = int(st.cycle.size());
  int vf = st.cycle[fp];
  int vd = st.cycle[(fp + 1) % len];
  int vn = st.cycle[(fp + 2) % len];
  int vp = st.cycle[(fp - 1 + len) % len];
  int e_fwd = edge_between(st.P, vf, vd);
  int e_back = edge_between(st.P, vp, vf);
  int e_next = edge_between(st.P, vd, vn);
  if (e_fwd < 0 || e_back < 0 || e_next < 0) return false;
  int keep = leg_on_edge(st.P, e_back, vf);
  RuleOutput out = apply_jacobi_move(st.P, e_fwd, keep);
  int pend_d =
      third_leg(st.P, vd, leg_on_edge(st.P, e_fwd, vd), leg_on_edge(st.P, e_next, vd));
  auto td = rotate_legs(st.P.vertices()[vd], leg_on_edge(st.P, e_fwd, vd), 0);
  int pidx = td[1] == pend_d ? 0 : 1;
  int n = st.P.vertex_count();
  Diagram next = out.raw[pidx].second;
  if (!ex.step(st.P, RuleId::JACOBI_MOVE,
               "exchange pendants of v" + std::to_string(vf) + ",v" + std::to_string(vd), out))
    return false;
  st.cycle = remap_cycle(st.cycle, n, std::min(vf, vd), std::max(vf, vd), fp, n - 2,
                         (fp + 1) % len, n - 1);
  st.P = std::move(next);
  return true;
}

// Recouples the d pair at cycle positions (0, 1) into two adjacent on-cycle
// f vertices (the principal term of the ff expansion).
bool create_ff(Executor& ex, LoopState& st) {
  int len = int(st.cycle.size());
  int v0 = st.cycle[0];
  int v1 = st.cycle[1];
  int vlast = st.cycle[len - 1];
  int v2 = st.cycle[2 % len];
  int e = edge_between(st.P, v0, v1);
  int e_back = edge_between(st.P, vlast, v0);
  int e_fwd = edge_between(st.P, v1, v2);
  if (e < 0 || e_back < 0 || e_fwd < 0) return false;
  int i1 = leg_on_edge(st.P, e_back, v0);
  int i2 = third_leg(st.P, v1, leg_on_edge(st.P, e, v1), leg_on_edge(st.P, e_fwd, v1));
  RuleOutput out = apply_ff_expansion(st.P, e, i1, i2);
  int n = st.P.vertex_count();
  Diagram next = out.raw[0].second;
  if (!ex.step(st.P, RuleId::FF_EXPAND, "recouple d pair into f pair", out)) return false;
  st.cycle = remap_cycle(st.cycle, n, std::min(v0, v1), std::max(v0, v1), 0, n - 2, 1, n - 1);
  st.P = std::move(next);
  return true;
}

std::vector<int> rotated(const std::vector<int>& c, int by) {
  std::vector<int> out(c.size());
  for (int i = 0; i < int(c.size()); ++i) out[i] = c[(i + by) % c.size()];
  return out;
}

// Lemma 1 step: transport an f along the designated cycle until it meets
// another f, then contract the pair. All outputs are strictly smaller.
RecipeResult run_lemma1(const Diagram& rep, const std::string& enc,
                        const std::vector<int>& cycle_in, int variant, long* budget) {
  std::vector<int> cycle = cycle_in;
  if (variant & 1) std::reverse(cycle.begin(), cycle.end());
  int len = int(cycle.size());
  std::vector<int> fpos;
  for (int i = 0; i < len; ++i)
    if (rep.vertices()[cycle[i]].kind == VertexKind::F) fpos.push_back(i);
  if (fpos.size() < 2) return {};
  // pick the f whose forward gap to the next f is smallest
  std::vector<std::pair<int, int>> order;  // (gap, start index into fpos)
  for (int k = 0; k < int(fpos.size()); ++k) {
    int a = fpos[k], b = fpos[(k + 1) % fpos.size()];
    int gap = (b - a + len) % len;
    order.push_back({gap, k});
  }
  std::sort(order.begin(), order.end());
  int pick = (variant / 2) % int(order.size());
  auto [gap, k] = order[pick];
  Executor ex(rep, enc, Phase::Lemma1, budget);
  LoopState st{rep, cycle};
  int fp = fpos[k];
  for (int m = 0; m < gap - 1; ++m) {
    if (!transport_move(ex, st, fp)) return ex.finish();
    fp = (fp + 1) % len;
  }
  int vf1 = st.cycle[fp], vf2 = st.cycle[(fp + 1) % len];
  int e = edge_between(st.P, vf1, vf2);
  if (e < 0) return ex.finish();
  RuleOutput out = apply_ff_contraction(st.P, e);
  ex.step(st.P, RuleId::FF_CONTRACT, "annihilate adjacent f pair", out);
  return ex.finish();
}

// Lemma 3: a 1f loop equals minus its own reflection, while the reflection
// is reachable by pendant swaps whose side terms are strictly smaller; the
// closing identity is solved for the input term.
RecipeResult run_lemma3(const Diagram& rep, const std::string& enc,
                        const std::vector<int>& cycle_in, int variant, long* budget) {
  std::vector<int> cycle = cycle_in;
  if (variant & 1) std::reverse(cycle.begin(), cycle.end());
  int len = int(cycle.size());
  int fpos = -1;
  for (int i = 0; i < len; ++i)
    if (rep.vertices()[cycle[i]].kind == VertexKind::F) fpos = i;
  if (fpos < 0) return {};
  cycle = rotated(cycle, fpos);  // f at position 0
  Executor ex(rep, enc, Phase::Lemma3, budget);
  LoopState st{rep, cycle};
  int k = len - 1;  // number of d pendants to reverse
  for (int pass = k - 1; pass >= 1; --pass)
    for (int j = 0; j < pass; ++j)
      if (!swap_move(ex, st, 1 + j)) return ex.finish();
  return ex.finish();
}

// Lemma 4: recouple a d pair into two adjacent f's, exchange a pendant
// across the trailing f-d edge (entering with coefficient -1), annihilate
// the f pair, and walk the surviving full-size d loop back onto the input
// arrangement by pendant swaps; the closing identity then reads
// input = -input + smaller and is solved for the input term.
RecipeResult run_lemma4(const Diagram& rep, const std::string& enc,
                        const std::vector<int>& cycle_in, int variant, long* budget) {
  int len = int(cycle_in.size());
  std::vector<int> cycle = rotated(cycle_in, (variant / 2) % len);
  if (variant & 1) std::reverse(cycle.begin(), cycle.end());
  Executor ex(rep, enc, Phase::Lemma4, budget);
  LoopState st{rep, cycle};
  if (!create_ff(ex, st)) return ex.finish();
  if (!exchange_move(ex, st, 1)) return ex.finish();
  int vf1 = st.cycle[0], vf2 = st.cycle[1];
  int e = edge_between(st.P, vf1, vf2);
  if (e < 0) return ex.finish();
  RuleOutput out = apply_ff_contraction(st.P, e);
  int n = st.P.vertex_count();
  if (!ex.step(st.P, RuleId::FF_CONTRACT, "annihilate recoupled f pair", out))
    return ex.finish();
  // locate the full-length survivor among the two dd terms and reverse the
  // three permuted pendants back into the input arrangement
  for (int raw_idx : {2, 3}) {
    const Diagram& cand = out.raw[raw_idx].second;
    CycleReport cr = find_cycles(cand);
    for (auto& c : cr.cycles) {
      if (c.length != len) continue;
      auto it1 = std::find(c.vertices.begin(), c.vertices.end(), n - 2);
      auto it2 = std::find(c.vertices.begin(), c.vertices.end(), n - 1);
      if (it1 == c.vertices.end() || it2 == c.vertices.end()) continue;
      std::vector<int> cyc = c.vertices;
      int p1 = int(it1 - c.vertices.begin());
      if (cyc[(p1 + 1) % len] != n - 1) {
        std::reverse(cyc.begin(), cyc.end());
        p1 = len - 1 - p1;
      }
      if (cyc[(p1 + 1) % len] != n - 1) continue;
      LoopState st2{cand, rotated(cyc, p1)};
      if (!swap_move(ex, st2, 0)) return ex.finish();
      if (!swap_move(ex, st2, 1)) return ex.finish();
      swap_move(ex, st2, 0);
      return ex.finish();
    }
  }
  return ex.finish();
}

bool outputs_strictly_smaller(const RecipeResult& rr, const Measure& in) {
  for (auto& [enc, t] : rr.output.terms())
    if (!(measure(t.rep) < in)) return false;
  return true;
}

RecipeResult run_phase(const Diagram& rep, const std::string& enc,
                       const CycleReport::Cycle& cyc, long* budget, Phase* phase_out) {
  int variants = 2 * std::max(2, cyc.length);
  Measure in = measure(rep);
  RecipeResult first_ok;
  for (int v = 0; v < variants; ++v) {
    RecipeResult rr;
    if (cyc.f_count >= 2) {
      *phase_out = Phase::Lemma1;
      rr = run_lemma1(rep, enc, cyc.vertices, v, budget);
    } else if (cyc.f_count == 1) {
      *phase_out = Phase::Lemma3;
      rr = run_lemma3(rep, enc, cyc.vertices, v, budget);
    } else {
      *phase_out = Phase::Lemma4;
      rr = run_lemma4(rep, enc, cyc.vertices, v, budget);
    }
    if (!rr.ok) continue;
    if (outputs_strictly_smaller(rr, in)) return rr;
    if (first_ok.entries.empty() && !rr.output.is_zero()) first_ok = rr;
    if (first_ok.entries.empty() && rr.ok) first_ok = rr;
  }
  if (first_ok.ok) return first_ok;  // sound but progress not certified
  return {};
}

struct Driver {
  Expression G;
  ReductionTrace trace;
  long budget;
  long used = 0;
  bool record;
  std::set<std::string> done;
  std::set<std::string> pending;

  void apply_entries(const std::vector<RuleApplication>& entries) {
    for (auto& e : entries) {
      if (G.coefficient(e.input_encoding)) {
        G.substitute_inplace(e.input_encoding, e.output);
        for (auto& [enc2, t2] : e.output.terms()) pending.insert(enc2);
      }
      if (record) trace.steps.push_back(e);
      ++used;
    }
  }

  void add_phase(Phase ph, const std::string& enc, const Diagram& rep, const Expression& out) {
    if (!record) return;
    PhaseRecord pr;
    pr.phase = ph;
    pr.input_encoding = enc;
    pr.input_measure = measure(rep);
    for (auto& [enc2, t2] : out.terms()) pr.outputs.push_back({enc2, measure(t2.rep)});
    trace.phases.push_back(pr);
  }
};

}  // namespace

ReduceResult reduce_to_forests(const Expression& input, const ReducerOptions& opt) {
  Driver drv;
  drv.G = input;
  drv.budget = opt.step_budget;
  drv.record = opt.record_trace;
  for (auto& [enc, t] : input.terms()) {
    if (classify(t.rep).forest)
      drv.done.insert(enc);  // pristine forest inputs pass through untouched
    else
      drv.pending.insert(enc);
  }
  while (!drv.pending.empty()) {
    std::string enc = *drv.pending.begin();
    drv.pending.erase(drv.pending.begin());
    if (drv.done.count(enc)) continue;
    auto it = drv.G.terms().find(enc);
    if (it == drv.G.terms().end()) continue;
    Diagram d = it->second.rep;
    Classification cls = classify(d);
    if (cls.forest) {
      int ffe = first_ff_edge(d);
      if (ffe < 0) {
        drv.done.insert(enc);
        continue;
      }
      if (drv.budget <= 0) throw StepBudgetExceeded("rule application budget exhausted");
      --drv.budget;
      RuleApplication ra{RuleId::FF_CONTRACT, Phase::ForestNorm, "tree ff edge", enc, d,
                         apply_ff_contraction(d, ffe).expr()};
      drv.apply_entries({ra});
      drv.pending.insert(enc);  // in case the substitution reintroduced it
      continue;
    }
    if (auto st = atomic_step(d)) {
      if (drv.budget <= 0) throw StepBudgetExceeded("rule application budget exhausted");
      --drv.budget;
      Expression repl = st->out.expr();
      RuleApplication ra{RuleId::ATOMIC_SIMPLIFY, Phase::Atomic, st->site, enc, d, repl};
      drv.add_phase(Phase::Atomic, enc, d, repl);
      drv.apply_entries({ra});
      continue;
    }
    CycleReport cr = find_cycles(d);
    if (cr.cycles.empty()) throw StepBudgetExceeded("cycle detection failed on " + enc);
    Phase ph = Phase::Lemma1;
    RecipeResult rr = run_phase(d, enc, cr.cycles.front(), &drv.budget, &ph);
    if (!rr.ok) throw StepBudgetExceeded("no reducing strategy applies to " + enc);
    drv.add_phase(ph, enc, d, rr.output);
    drv.apply_entries(rr.entries);
  }
  ReduceResult res;
  res.forests = std::move(drv.G);
  res.trace = std::move(drv.trace);
  res.rule_applications = drv.used;
  return res;
}

Expression eliminate_f_pairs(const Expression& input, const ReducerOptions& opt) {
  Driver drv;
  drv.G = input;
  drv.budget = opt.step_budget;
  drv.record = false;
  auto wants_work = [](const Diagram& d) {
    if (atomic_step(d)) return true;
    CycleReport cr = find_cycles(d);
    for (auto& c : cr.cycles)
      if (c.f_count >= 2) return true;
    return false;
  };
  for (auto& [enc, t] : input.terms())
    if (wants_work(t.rep)) drv.pending.insert(enc);
  while (!drv.pending.empty()) {
    std::string enc = *drv.pending.begin();
    drv.pending.erase(drv.pending.begin());
    auto it = drv.G.terms().find(enc);
    if (it == drv.G.terms().end()) continue;
    Diagram d = it->second.rep;
    if (!wants_work(d)) continue;
    if (auto st = atomic_step(d)) {
      if (drv.budget <= 0) throw StepBudgetExceeded("rule application budget exhausted");
      --drv.budget;
      RuleApplication ra{RuleId::ATOMIC_SIMPLIFY, Phase::Atomic, st->site, enc, d,
                         st->out.expr()};
      drv.apply_entries({ra});
      continue;
    }
    CycleReport cr = find_cycles(d);
    const CycleReport::Cycle* pick = nullptr;
    for (auto& c : cr.cycles)
      if (c.f_count >= 2) {
        pick = &c;
        break;
      }
    if (!pick) continue;
    Measure in = measure(d);
    RecipeResult rr;
    for (int v = 0; v < 2 * std::max(2, pick->length); ++v) {
      rr = run_lemma1(d, enc, pick->vertices, v, &drv.budget);
      if (rr.ok && outputs_strictly_smaller(rr, in)) break;
      if (rr.ok) break;
    }
    if (!rr.ok) throw StepBudgetExceeded("f-pair elimination failed on " + enc);
    drv.apply_entries(rr.entries);
  }
  return drv.G;
}

Expression reduce_1f_loop(const Diagram& d, const std::vector<int>& cycle) {
  CanonicalDiagram cd = canonicalize(d);
  if (cd.zero) return Expression::zero();
  int fc = 0;
  for (int v : cycle)
    if (d.vertices()[v].kind == VertexKind::F) ++fc;
  if (fc != 1 || cycle.size() < 3)
    throw PreconditionViolated("reduce_1f_loop: designated cycle must hold exactly one f");
  // work on the canonical representative, then map back through the sign
  std::vector<int> cyc;
  {
    // cycle indices refer to `d`; rebuild the corresponding cycle on the rep
    // by matching the (unique up to automorphism) cycle of equal length/f.
    CycleReport cr = find_cycles(cd.representative);
    for (auto& c : cr.cycles)
      if (c.length == int(cycle.size()) && c.f_count == 1) {
        cyc = c.vertices;
        break;
      }
  }
  if (cyc.empty()) throw PreconditionViolated("reduce_1f_loop: cycle not found on representative");
  long budget = 100000;
  for (int v = 0; v < 2; ++v) {
    RecipeResult rr = run_lemma3(cd.representative, cd.encoding, cyc, v, &budget);
    if (rr.ok) return rr.output.scaled(Coefficient::of(cd.sign));
  }
  throw StepBudgetExceeded("reduce_1f_loop: strategy failed");
}

Expression reduce_d_loop(const Diagram& d, const std::vector<int>& cycle) {
  CanonicalDiagram cd = canonicalize(d);
  if (cd.zero) return Expression::zero();
  for (int v : cycle)
    if (d.vertices()[v].kind != VertexKind::D)
      throw PreconditionViolated("reduce_d_loop: designated cycle must be all d");
  if (cycle.size() < 3) throw PreconditionViolated("reduce_d_loop: cycle too short");
  std::vector<int> cyc;
  {
    CycleReport cr = find_cycles(cd.representative);
    for (auto& c : cr.cycles)
      if (c.length == int(cycle.size()) && c.f_count == 0) {
        cyc = c.vertices;
        break;
      }
  }
  if (cyc.empty()) throw PreconditionViolated("reduce_d_loop: cycle not found on representative");
  long budget = 100000;
  for (int v = 0; v < 2 * std::max(2, int(cyc.size())); ++v) {
    RecipeResult rr = run_lemma4(cd.representative, cd.encoding, cyc, v, &budget);
    if (rr.ok) return rr.output.scaled(Coefficient::of(cd.sign));
  }
  throw StepBudgetExceeded("reduce_d_loop: strategy failed");
}

Expression replay(const ReductionTrace& trace, const Expression& input) {
  Expression g = input;
  for (auto& step : trace.steps)
    if (g.coefficient(step.input_encoding)) g.substitute_inplace(step.input_encoding, step.output);
  return g;
}

}  // namespace sunforest
