#include "sunforest/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace sunforest {

StructureTensors build_structure_tensors(int N) {
  if (N < 2) throw std::invalid_argument("build_structure_tensors: N must be >= 2");
  StructureTensors t;
  t.N = N;
  t.dim = N * N - 1;
  t.lambdas.reserve(t.dim);
  using Mat = Eigen::MatrixXcd;
  const std::complex<double> I{0.0, 1.0};
  // Standard Gell-Mann ordering: for k = 2..N emit the symmetric and
  // antisymmetric pair matrices against each earlier row, then the k-1-th
  // diagonal matrix. At N=3 this reproduces lambda_1..lambda_8.
  for (int k = 1; k < N; ++k) {
    for (int a = 0; a < k; ++a) {
      Mat s = Mat::Zero(N, N);
      s(a, k) = 1.0;
      s(k, a) = 1.0;
      t.lambdas.push_back(s);
      Mat m = Mat::Zero(N, N);
      m(a, k) = -I;
      m(k, a) = I;
      t.lambdas.push_back(m);
    }
    Mat diag = Mat::Zero(N, N);
    double norm = std::sqrt(2.0 / (double(k) * (k + 1)));
    for (int j = 0; j < k; ++j) diag(j, j) = norm;
    diag(k, k) = -norm * k;
    t.lambdas.push_back(diag);
  }

  int m = t.dim;
  t.d.assign(std::size_t(m) * m * m, 0.0);
  t.f.assign(std::size_t(m) * m * m, 0.0);
  std::vector<Mat> prod(std::size_t(m) * m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) prod[std::size_t(a) * m + b] = t.lambdas[a] * t.lambdas[b];
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const Mat& ab = prod[std::size_t(a) * m + b];
      const Mat& ba = prod[std::size_t(b) * m + a];
      for (int c = 0; c < m; ++c) {
        std::complex<double> tr_anti{0, 0}, tr_comm{0, 0};
        const Mat& lc = t.lambdas[c];
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j) {
            tr_anti += (ab(i, j) + ba(i, j)) * lc(j, i);
            tr_comm += (ab(i, j) - ba(i, j)) * lc(j, i);
          }
        t.d[(std::size_t(a) * m + b) * m + c] = 0.25 * tr_anti.real();
        t.f[(std::size_t(a) * m + b) * m + c] = 0.25 * tr_comm.imag();
      }
    }
  return t;
}

const StructureTensors& structure_tensors(int N) {
  static std::map<int, StructureTensors> cache;
  auto it = cache.find(N);
  if (it == cache.end()) it = cache.emplace(N, build_structure_tensors(N)).first;
  return it->second;
}

namespace {

struct Factor {
  std::vector<std::string> labels;
  std::vector<double> data;  // row-major, every axis has extent `dim`
};

std::size_t size_of(int rank, int dim) {
  std::size_t s = 1;
  for (int i = 0; i < rank; ++i) s *= dim;
  return s;
}

// trace out repeated labels inside one factor
Factor self_trace(Factor f, int dim) {
  for (;;) {
    int i1 = -1, i2 = -1;
    for (std::size_t i = 0; i < f.labels.size() && i1 < 0; ++i)
      for (std::size_t j = i + 1; j < f.labels.size(); ++j)
        if (f.labels[i] == f.labels[j]) {
          i1 = int(i);
          i2 = int(j);
          break;
        }
    if (i1 < 0) return f;
    int rank = int(f.labels.size());
    std::vector<std::string> out_labels;
    for (int i = 0; i < rank; ++i)
      if (i != i1 && i != i2) out_labels.push_back(f.labels[i]);
    int orank = rank - 2;
    std::vector<double> out(size_of(orank, dim), 0.0);
    std::vector<int> idx(rank, 0);
    // strides
    std::vector<std::size_t> stride(rank);
    std::size_t s = 1;
    for (int i = rank - 1; i >= 0; --i) {
      stride[i] = s;
      s *= dim;
    }
    std::vector<std::size_t> ostride(orank);
    s = 1;
    for (int i = orank - 1; i >= 0; --i) {
      ostride[i] = s;
      s *= dim;
    }
    std::vector<int> out_axes;
    for (int i = 0; i < rank; ++i)
      if (i != i1 && i != i2) out_axes.push_back(i);
    std::vector<int> oidx(orank, 0);
    bool done = orank == 0 && false;
    (void)done;
    // iterate over output indices and sum the diagonal
    std::size_t ocount = out.size();
    for (std::size_t oflat = 0; oflat < ocount; ++oflat) {
      std::size_t rem = oflat;
      std::size_t base = 0;
      for (int i = 0; i < orank; ++i) {
        int v = int(rem / ostride[i]);
        rem %= ostride[i];
        base += std::size_t(v) * stride[out_axes[i]];
      }
      double acc = 0;
      for (int kk = 0; kk < dim; ++kk)
        acc += f.data[base + std::size_t(kk) * (stride[i1] + stride[i2])];
      out[oflat] = acc;
    }
    f.labels = std::move(out_labels);
    f.data = std::move(out);
  }
}

Factor contract_pair(const Factor& a, const Factor& b, int dim) {
  std::vector<int> shared_a, shared_b;
  std::vector<int> keep_a, keep_b;
  for (int i = 0; i < int(a.labels.size()); ++i) {
    int j = -1;
    for (int k = 0; k < int(b.labels.size()); ++k)
      if (b.labels[k] == a.labels[i]) j = k;
    if (j >= 0) {
      shared_a.push_back(i);
      shared_b.push_back(j);
    } else {
      keep_a.push_back(i);
    }
  }
  for (int k = 0; k < int(b.labels.size()); ++k)
    if (std::find(shared_b.begin(), shared_b.end(), k) == shared_b.end()) keep_b.push_back(k);

  int ra = int(a.labels.size()), rb = int(b.labels.size());
  std::vector<std::size_t> sa(ra), sb(rb);
  std::size_t s = 1;
  for (int i = ra - 1; i >= 0; --i) {
    sa[i] = s;
    s *= dim;
  }
  s = 1;
  for (int i = rb - 1; i >= 0; --i) {
    sb[i] = s;
    s *= dim;
  }

  Factor out;
  for (int i : keep_a) out.labels.push_back(a.labels[i]);
  for (int i : keep_b) out.labels.push_back(b.labels[i]);
  int orank = int(out.labels.size());
  out.data.assign(size_of(orank, dim), 0.0);

  int nshared = int(shared_a.size());
  std::size_t shared_count = size_of(nshared, dim);
  std::size_t ka_count = size_of(int(keep_a.size()), dim);
  std::size_t kb_count = size_of(int(keep_b.size()), dim);

  for (std::size_t ia = 0; ia < ka_count; ++ia) {
    std::size_t base_a = 0;
    {
      std::size_t rem = ia;
      for (int i = int(keep_a.size()) - 1; i >= 0; --i) {
        base_a += (rem % dim) * sa[keep_a[i]];
        rem /= dim;
      }
    }
    for (std::size_t ib = 0; ib < kb_count; ++ib) {
      std::size_t base_b = 0;
      {
        std::size_t rem = ib;
        for (int i = int(keep_b.size()) - 1; i >= 0; --i) {
          base_b += (rem % dim) * sb[keep_b[i]];
          rem /= dim;
        }
      }
      double acc = 0.0;
      for (std::size_t ish = 0; ish < shared_count; ++ish) {
        std::size_t off_a = 0, off_b = 0;
        std::size_t rem = ish;
        for (int i = nshared - 1; i >= 0; --i) {
          std::size_t v = rem % dim;
          rem /= dim;
          off_a += v * sa[shared_a[i]];
          off_b += v * sb[shared_b[i]];
        }
        acc += a.data[base_a + off_a] * b.data[base_b + off_b];
      }
      out.data[ia * kb_count + ib] += acc;
    }
  }
  return out;
}

// result rank if the pair were contracted
int pair_out_rank(const Factor& a, const Factor& b) {
  int shared = 0;
  for (auto& la : a.labels)
    for (auto& lb : b.labels)
      if (la == lb) ++shared;
  return int(a.labels.size()) + int(b.labels.size()) - 2 * shared;
}

// Builds the factor list for a diagram. Externals present in `fixed` are
// sliced out; others stay as open axes labelled by the external name.
std::vector<Factor> diagram_factors(const Diagram& d, const StructureTensors& t,
                                    const IndexAssignment& fixed) {
  int m = t.dim;
  std::vector<Factor> fs;
  // internal edge label per leg
  std::map<int, std::string> edge_label;
  int en = 0;
  for (auto& [a, b] : d.internal_edges()) {
    std::string lbl = "\x01e" + std::to_string(en++);
    edge_label[a] = lbl;
    edge_label[b] = lbl;
  }
  for (int v = 0; v < d.vertex_count(); ++v) {
    const Vertex& vx = d.vertices()[v];
    std::array<int, 3> slot_fixed{-1, -1, -1};
    std::vector<std::string> labels;
    for (int s = 0; s < 3; ++s) {
      int leg = vx.legs[s];
      if (auto it = edge_label.find(leg); it != edge_label.end()) {
        labels.push_back(it->second);
      } else {
        auto name = d.external_name_of(leg);
        if (!name) throw MalformedDiagram("unattached leg during evaluation");
        auto fit = fixed.find(*name);
        if (fit != fixed.end())
          slot_fixed[s] = fit->second;
        else
          labels.push_back(*name);
      }
    }
    Factor f;
    f.labels = labels;
    f.data.assign(size_of(int(labels.size()), m), 0.0);
    const std::vector<double>& src = vx.kind == VertexKind::D ? t.d : t.f;
    // iterate over free slots
    std::array<int, 3> idx{0, 0, 0};
    auto flat_src = [&](const std::array<int, 3>& ix) {
      return (std::size_t(ix[0]) * m + ix[1]) * m + ix[2];
    };
    std::vector<int> free_slots;
    for (int s = 0; s < 3; ++s)
      if (slot_fixed[s] >= 0)
        idx[s] = slot_fixed[s];
      else
        free_slots.push_back(s);
    std::size_t count = size_of(int(free_slots.size()), m);
    for (std::size_t flat = 0; flat < count; ++flat) {
      std::size_t rem = flat;
      for (int i = int(free_slots.size()) - 1; i >= 0; --i) {
        idx[free_slots[i]] = int(rem % m);
        rem /= m;
      }
      f.data[flat] = src[flat_src(idx)];
    }
    fs.push_back(self_trace(std::move(f), m));
  }
  for (auto& [na, nb] : d.delta_edges()) {
    auto ia = fixed.find(na);
    auto ib = fixed.find(nb);
    if (ia != fixed.end() && ib != fixed.end()) {
      Factor f;
      f.data = {ia->second == ib->second ? 1.0 : 0.0};
      fs.push_back(std::move(f));
    } else if (ia != fixed.end() || ib != fixed.end()) {
      int val = ia != fixed.end() ? ia->second : ib->second;
      Factor f;
      f.labels = {ia != fixed.end() ? nb : na};
      f.data.assign(m, 0.0);
      f.data[val] = 1.0;
      fs.push_back(std::move(f));
    } else {
      Factor f;
      f.labels = {na, nb};
      f.data.assign(std::size_t(m) * m, 0.0);
      for (int i = 0; i < m; ++i) f.data[std::size_t(i) * m + i] = 1.0;
      fs.push_back(std::move(f));
    }
  }
  if (fs.empty()) {
    Factor one;
    one.data = {1.0};
    fs.push_back(std::move(one));
  }
  return fs;
}

Factor contract_all(std::vector<Factor> fs, int dim) {
  while (fs.size() > 1) {
    // greedy: smallest resulting rank, preferring pairs that share labels
    int bi = 0, bj = 1, best = 1 << 28;
    for (int i = 0; i < int(fs.size()); ++i)
      for (int j = i + 1; j < int(fs.size()); ++j) {
        int r = pair_out_rank(fs[i], fs[j]);
        bool share = r < int(fs[i].labels.size() + fs[j].labels.size());
        int score = r * 2 + (share ? 0 : 1);
        if (score < best) {
          best = score;
          bi = i;
          bj = j;
        }
      }
    if (size_of(pair_out_rank(fs[bi], fs[bj]), dim) > std::size_t(4e7))
      throw std::runtime_error("contraction intermediate too large");
    Factor merged = contract_pair(fs[bi], fs[bj], dim);
    fs.erase(fs.begin() + bj);
    fs[bi] = self_trace(std::move(merged), dim);
  }
  return std::move(fs[0]);
}

}  // namespace

double eval_diagram(const Diagram& d, const StructureTensors& t, const IndexAssignment& a) {
  for (auto& name : d.external_names())
    if (!a.count(name)) throw IncompleteAssignment("missing index for " + name);
  Factor r = contract_all(diagram_factors(d, t, a), t.dim);
  if (!r.labels.empty()) throw MalformedDiagram("evaluation left open axes");
  return r.data[0];
}

std::complex<double> eval_expression(const Expression& e, const StructureTensors& t,
                                     const IndexAssignment& a) {
  std::complex<double> acc{0.0, 0.0};
  for (auto& [enc, term] : e.terms())
    acc += term.coeff.eval(t.N) * eval_diagram(term.rep, t, a);
  return acc;
}

OpenTensor eval_expression_open(const Expression& e, const StructureTensors& t) {
  OpenTensor out;
  out.dim = t.dim;
  std::set<std::string> names = e.external_names();
  out.names.assign(names.begin(), names.end());
  out.data.assign(size_of(int(out.names.size()), t.dim), {0.0, 0.0});
  for (auto& [enc, term] : e.terms()) {
    if (term.rep.external_names() != names)
      throw LegMismatch("open evaluation with mixed free-index sets");
    Factor r = contract_all(diagram_factors(term.rep, t, {}), t.dim);
    // permute axes into sorted-name order
    std::vector<int> axis_of(out.names.size());
    for (int i = 0; i < int(out.names.size()); ++i) {
      auto it = std::find(r.labels.begin(), r.labels.end(), out.names[i]);
      if (it == r.labels.end()) throw MalformedDiagram("open axis missing");
      axis_of[i] = int(it - r.labels.begin());
    }
    int rank = int(r.labels.size());
    std::vector<std::size_t> stride(rank);
    std::size_t s = 1;
    for (int i = rank - 1; i >= 0; --i) {
      stride[i] = s;
      s *= t.dim;
    }
    std::complex<double> c = term.coeff.eval(t.N);
    std::size_t count = out.data.size();
    for (std::size_t flat = 0; flat < count; ++flat) {
      std::size_t rem = flat, off = 0;
      for (int i = 0; i < rank; ++i) {
        std::size_t extent = size_of(rank - 1 - i, t.dim);
        std::size_t v = rem / extent;
        rem %= extent;
        off += v * stride[axis_of[i]];
      }
      out.data[flat] += c * r.data[off];
    }
  }
  return out;
}

VerifyReport verify_equal(const Expression& a, const Expression& b, const std::vector<int>& ns,
                          long samples, double tol, unsigned seed) {
  std::set<std::string> names_a = a.external_names();
  std::set<std::string> names_b = b.external_names();
  std::set<std::string> names;
  if (a.is_zero())
    names = names_b;
  else if (b.is_zero())
    names = names_a;
  else if (names_a == names_b)
    names = names_a;
  else
    throw LegMismatch("verify_equal: free index sets differ");

  VerifyReport rep;
  std::vector<std::string> name_list(names.begin(), names.end());
  for (int n : ns) {
    const StructureTensors& t = structure_tensors(n);
    double legs_pow = std::pow(double(t.dim), double(name_list.size()));
    if (legs_pow <= 1e5) {
      OpenTensor ta = eval_expression_open(a, t);
      OpenTensor tb = eval_expression_open(b, t);
      std::size_t count = size_of(int(name_list.size()), t.dim);
      for (std::size_t i = 0; i < count; ++i) {
        std::complex<double> va = a.is_zero() ? 0.0 : ta.data[i];
        std::complex<double> vb = b.is_zero() ? 0.0 : tb.data[i];
        rep.max_abs_diff = std::max(rep.max_abs_diff, std::abs(va - vb));
      }
      rep.points += long(count);
      rep.exhaustive = true;
    } else {
      std::mt19937_64 rng(seed + unsigned(n) * 7919u);
      std::uniform_int_distribution<int> dist(0, t.dim - 1);
      for (long sidx = 0; sidx < samples; ++sidx) {
        IndexAssignment asg;
        for (auto& nm : name_list) asg[nm] = dist(rng);
        std::complex<double> va = eval_expression(a, t, asg);
        std::complex<double> vb = eval_expression(b, t, asg);
        rep.max_abs_diff = std::max(rep.max_abs_diff, std::abs(va - vb));
        ++rep.points;
      }
    }
  }
  rep.pass = rep.max_abs_diff < tol;
  std::ostringstream os;
  os << "max |diff| = " << rep.max_abs_diff << " over " << rep.points << " points";
  rep.detail = os.str();
  return rep;
}

}  // namespace sunforest
