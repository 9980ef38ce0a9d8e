#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "sunforest/assembler.hpp"
#include "sunforest/oracle.hpp"

namespace sunforest {

namespace {

// trivalent trees on L >= 3 labelled leaves, built by leaf insertion;
// nodes 0..L-1 are leaves, L.. are internal
struct TreeShape {
  std::vector<std::pair<int, int>> edges;
};

std::vector<TreeShape> leaf_trees(int leaves) {
  std::vector<TreeShape> cur(1);
  cur[0].edges = {{leaves, 0}, {leaves, 1}, {leaves, 2}};
  for (int j = 3; j < leaves; ++j) {
    std::vector<TreeShape> next;
    int w = leaves + (j - 2);
    for (auto& t : cur)
      for (std::size_t e = 0; e < t.edges.size(); ++e) {
        TreeShape s = t;
        auto [a, b] = s.edges[e];
        s.edges.erase(s.edges.begin() + e);
        s.edges.push_back({a, w});
        s.edges.push_back({w, b});
        s.edges.push_back({w, j});
        next.push_back(std::move(s));
      }
    cur = std::move(next);
  }
  return cur;
}

void partitions_rec(std::vector<std::string> rest, std::vector<std::vector<std::string>> acc,
                    std::vector<std::vector<std::vector<std::string>>>& out) {
  if (rest.empty()) {
    out.push_back(acc);
    return;
  }
  std::string head = rest.front();
  std::vector<std::string> tail(rest.begin() + 1, rest.end());
  int m = int(tail.size());
  for (int mask = 0; mask < (1 << m); ++mask) {
    std::vector<std::string> block{head};
    std::vector<std::string> remaining;
    for (int i = 0; i < m; ++i)
      if (mask & (1 << i))
        block.push_back(tail[i]);
      else
        remaining.push_back(tail[i]);
    if (block.size() < 2) continue;
    auto acc2 = acc;
    acc2.push_back(block);
    partitions_rec(remaining, std::move(acc2), out);
  }
}

std::optional<Rational> rationalize(double x, long max_den, double tol) {
  if (std::abs(x) < tol) return Rational(0);
  bool neg = x < 0;
  double v = std::abs(x);
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double frac = v;
  for (int it = 0; it < 64; ++it) {
    long long a = (long long)std::floor(frac);
    long long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    double approx = double(p1) / double(q1);
    if (std::abs(v - approx) <= tol * std::max(1.0, v)) {
      Rational r(p1, q1);
      return neg ? Rational(-r) : r;
    }
    double rem = frac - double(a);
    if (rem < 1e-15) break;
    frac = 1.0 / rem;
  }
  return std::nullopt;
}

}  // namespace

std::vector<Diagram> enumerate_forests(const std::set<std::string>& names, int max_vertices) {
  std::vector<std::string> list(names.begin(), names.end());
  std::vector<std::vector<std::vector<std::string>>> parts;
  partitions_rec(list, {}, parts);

  std::map<std::string, Diagram> dedup;
  if (names.empty()) {
    dedup.emplace(canonicalize(Diagram{}).encoding, Diagram{});
  }
  for (auto& part : parts) {
    // options per block: (edges over local node ids, kind mask) or delta
    struct BlockOption {
      bool delta = false;
      TreeShape shape;
      int kinds = 0;
      int internal = 0;
    };
    std::vector<std::vector<BlockOption>> options;
    int base_vertices = 0;
    bool feasible = true;
    for (auto& block : part) {
      std::vector<BlockOption> opts;
      if (block.size() == 2) {
        BlockOption o;
        o.delta = true;
        opts.push_back(o);
      } else {
        int internal = int(block.size()) - 2;
        base_vertices += internal;
        for (auto& shape : leaf_trees(int(block.size())))
          for (int kinds = 0; kinds < (1 << internal); ++kinds) {
            BlockOption o;
            o.shape = shape;
            o.kinds = kinds;
            o.internal = internal;
            opts.push_back(o);
          }
      }
      if (opts.empty()) feasible = false;
      options.push_back(std::move(opts));
    }
    if (!feasible || base_vertices > max_vertices) continue;
    // cartesian product over blocks
    std::vector<std::size_t> pick(part.size(), 0);
    for (;;) {
      DiagramAssembler a;
      for (std::size_t b = 0; b < part.size(); ++b) {
        auto& block = part[b];
        auto& opt = options[b][pick[b]];
        if (opt.delta) {
          auto j = a.junction();
          a.link(j, a.external(block[0]));
          a.link(j, a.external(block[1]));
          continue;
        }
        int leaves = int(block.size());
        std::map<int, int> vert;  // local internal node -> assembler vertex
        std::map<int, int> used;  // slots used per vertex
        for (int k = 0; k < opt.internal; ++k)
          vert[leaves + k] = a.add_vertex((opt.kinds >> k) & 1 ? VertexKind::F : VertexKind::D);
        auto port = [&](int node) -> DiagramAssembler::Port {
          if (node < leaves) return a.external(block[node]);
          int v = vert.at(node);
          return a.slot(v, used[v]++);
        };
        for (auto& [x, y] : opt.shape.edges) a.link(port(x), port(y));
      }
      Diagram d = a.finalize().diagram;
      CanonicalDiagram cd = canonicalize(d);
      if (!cd.zero) dedup.emplace(cd.encoding, cd.representative);
      // advance
      std::size_t b = 0;
      for (; b < part.size(); ++b) {
        if (++pick[b] < options[b].size()) break;
        pick[b] = 0;
      }
      if (b == part.size()) break;
    }
  }
  std::vector<Diagram> out;
  out.reserve(dedup.size());
  for (auto& [enc, d] : dedup) out.push_back(d);
  return out;
}

Expression fit_forest_coefficients(const Diagram& input, const FitOptions& opt) {
  std::set<std::string> names = input.external_names();
  if (names.size() > 6) throw FitFailure("fit supports at most 6 external legs");
  int vmax = opt.max_vertices >= 0 ? opt.max_vertices : std::max(input.vertex_count(), 1);
  std::vector<Diagram> cands = enumerate_forests(names, vmax);
  // deterministic order: simplest structures first
  std::sort(cands.begin(), cands.end(), [](const Diagram& a, const Diagram& b) {
    auto ka = std::tuple(a.vertex_count(), a.f_count(), canonicalize(a).encoding);
    auto kb = std::tuple(b.vertex_count(), b.f_count(), canonicalize(b).encoding);
    return ka < kb;
  });

  int npow = 2 * opt.max_power + 1;
  long rows_wanted = std::max<long>(60, 2 * long(cands.size()) * npow / std::max<std::size_t>(
                                             1, opt.ns.size()));
  long samples = std::min<long>(2000, rows_wanted);
  std::vector<std::string> name_list(names.begin(), names.end());

  struct Row {
    int n;
    IndexAssignment asg;
  };
  std::vector<Row> rows;
  for (int n : opt.ns) {
    const StructureTensors& t = structure_tensors(n);
    std::mt19937_64 rng(opt.seed + unsigned(n) * 131u);
    std::uniform_int_distribution<int> dist(0, t.dim - 1);
    for (long s = 0; s < samples; ++s) {
      Row r;
      r.n = n;
      for (auto& nm : name_list) r.asg[nm] = dist(rng);
      rows.push_back(std::move(r));
    }
  }

  long R = long(rows.size());
  Eigen::VectorXd b(R);
  Eigen::MatrixXd vals(R, long(cands.size()));
  for (long r = 0; r < R; ++r) {
    const StructureTensors& t = structure_tensors(rows[r].n);
    b(r) = eval_diagram(input, t, rows[r].asg);
    for (long j = 0; j < long(cands.size()); ++j)
      vals(r, j) = eval_diagram(cands[j], t, rows[r].asg);
  }

  // greedy independent subset in deterministic order (values as functions of
  // both the assignment and N); exactly dependent forests are dropped here
  std::vector<int> kept;
  Eigen::MatrixXd basis(R, 0);
  for (long j = 0; j < long(cands.size()); ++j) {
    Eigen::VectorXd v = vals.col(j);
    double norm0 = v.norm();
    if (norm0 < 1e-9) continue;
    Eigen::VectorXd res = v;
    if (basis.cols() > 0) res -= basis * (basis.transpose() * v);
    if (res.norm() <= 1e-6 * norm0) continue;
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = res / res.norm();
    kept.push_back(int(j));
  }

  double scale = std::max(1.0, b.lpNorm<Eigen::Infinity>());
  if (kept.empty()) {
    if (b.lpNorm<Eigen::Infinity>() < opt.tol_fit) return Expression::zero();
    throw FitFailure("no candidate forests but the diagram is nonzero");
  }

  // Grow the Laurent power window until the overdetermined joint system
  // reproduces the data and the holdout N confirms the interpolation. The
  // window must stay below the number of distinct N values, otherwise any
  // function of N could be interpolated.
  std::vector<std::pair<int, int>> windows;
  for (int size = 1; size <= npow; ++size) {
    int hi = size / 2;
    int lo = hi - size + 1;
    windows.push_back({lo, hi});
  }
  int distinct_n = int(opt.ns.size());
  std::string last_error = "power window exhausted";
  for (auto [lo, hi] : windows) {
    int w = hi - lo + 1;
    if (w > distinct_n - 1) break;
    long cols = long(kept.size()) * w;
    Eigen::MatrixXd A(R, cols);
    for (long r = 0; r < R; ++r) {
      double n = double(rows[r].n);
      for (long k = 0; k < long(kept.size()); ++k)
        for (int p = lo; p <= hi; ++p) A(r, k * w + (p - lo)) = vals(r, kept[k]) * std::pow(n, p);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < cols) {
      last_error = "rank-deficient joint system (enlarge the N set)";
      continue;
    }
    Eigen::VectorXd x = qr.solve(b);
    double resid = (A * x - b).lpNorm<Eigen::Infinity>();
    if (resid > opt.tol_fit * scale) {
      last_error = "fit residual " + std::to_string(resid) + " at window [" +
                   std::to_string(lo) + "," + std::to_string(hi) + "]";
      continue;
    }
    Expression out;
    bool rational_ok = true;
    for (long k = 0; k < long(kept.size()) && rational_ok; ++k) {
      Coefficient c;
      for (int p = lo; p <= hi; ++p) {
        double v = x(k * w + (p - lo));
        auto rat = rationalize(v, opt.max_denominator, 1e-6);
        if (!rat) {
          rational_ok = false;
          last_error = "coefficient does not rationalize: " + std::to_string(v);
          break;
        }
        if (*rat != 0) c = c + Coefficient::monomial(p, GaussianRational(*rat));
      }
      if (rational_ok && !c.is_zero()) out.add(cands[kept[k]], c);
    }
    if (!rational_ok) continue;
    VerifyReport rep = verify_equal(Expression::term(input), out, {opt.holdout}, 200,
                                    opt.tol_holdout * scale, opt.seed + 17);
    if (!rep.pass) {
      last_error = "holdout N=" + std::to_string(opt.holdout) + " check failed: " + rep.detail;
      continue;
    }
    return out;
  }
  if (last_error.find("rank-deficient") != std::string::npos) throw RankDeficient(last_error);
  throw FitFailure(last_error);
}

}  // namespace sunforest
