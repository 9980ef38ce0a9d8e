#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sunforest/diagram.hpp"

namespace sunforest {

namespace {

struct EdgeInstance {
  int leg_a;  // leg at the smaller-indexed vertex (or first end for self-edges)
  int leg_b;
};

struct CanonData {
  const Diagram* d = nullptr;
  int n = 0;
  std::vector<VertexKind> kinds;
  std::vector<std::vector<std::string>> ext_names;              // per vertex, sorted
  std::map<std::pair<int, int>, std::vector<EdgeInstance>> groups;  // u<=v
  std::vector<std::vector<std::pair<int, int>>> adj;            // (neighbor, mult)
  std::vector<int> self_mult;
};

CanonData collect(const Diagram& d) {
  CanonData c;
  c.d = &d;
  c.n = d.vertex_count();
  c.kinds.resize(c.n);
  c.ext_names.resize(c.n);
  c.adj.resize(c.n);
  c.self_mult.assign(c.n, 0);
  for (int v = 0; v < c.n; ++v) c.kinds[v] = d.vertices()[v].kind;
  for (auto& [name, leg] : d.externals()) c.ext_names[d.owner(leg).vertex].push_back(name);
  for (auto& names : c.ext_names) std::sort(names.begin(), names.end());
  for (auto& [a, b] : d.internal_edges()) {
    int u = d.owner(a).vertex, v = d.owner(b).vertex;
    int la = a, lb = b;
    if (u > v) {
      std::swap(u, v);
      std::swap(la, lb);
    }
    c.groups[{u, v}].push_back({la, lb});
  }
  for (auto& [uv, insts] : c.groups) {
    std::sort(insts.begin(), insts.end(), [](const EdgeInstance& x, const EdgeInstance& y) {
      return std::pair(x.leg_a, x.leg_b) < std::pair(y.leg_a, y.leg_b);
    });
    if (uv.first == uv.second) {
      c.self_mult[uv.first] = int(insts.size());
    } else {
      c.adj[uv.first].push_back({uv.second, int(insts.size())});
      c.adj[uv.second].push_back({uv.first, int(insts.size())});
    }
  }
  for (auto& a : c.adj) std::sort(a.begin(), a.end());
  return c;
}

using Colors = std::vector<int>;

Colors refine(const CanonData& c, Colors colors) {
  for (;;) {
    // signature: (own color, multiset of neighbor colors with multiplicity,
    // self-edges contributing the own color twice per instance)
    std::vector<std::pair<std::vector<int>, int>> sigs(c.n);
    for (int v = 0; v < c.n; ++v) {
      std::vector<int> s;
      s.push_back(colors[v]);
      std::vector<int> nb;
      for (auto& [w, m] : c.adj[v])
        for (int k = 0; k < m; ++k) nb.push_back(colors[w]);
      for (int k = 0; k < c.self_mult[v]; ++k) {
        nb.push_back(colors[v]);
        nb.push_back(colors[v]);
      }
      std::sort(nb.begin(), nb.end());
      s.insert(s.end(), nb.begin(), nb.end());
      sigs[v] = {std::move(s), v};
    }
    std::vector<std::pair<std::vector<int>, int>> sorted = sigs;
    std::sort(sorted.begin(), sorted.end());
    Colors next(c.n);
    int color = -1;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (i == 0 || sorted[i].first != sorted[i - 1].first) ++color;
      next[sorted[i].second] = color;
    }
    if (next == colors) return colors;
    bool same_partition = true;
    {
      std::set<int> a(colors.begin(), colors.end()), b(next.begin(), next.end());
      same_partition = a.size() == b.size();
    }
    colors = std::move(next);
    if (same_partition) return colors;
  }
}

std::string serialize(const CanonData& c, const std::vector<int>& pos) {
  std::ostringstream os;
  os << "v:";
  std::vector<int> inv(c.n);
  for (int v = 0; v < c.n; ++v) inv[pos[v]] = v;
  for (int p = 0; p < c.n; ++p) os << kind_char(c.kinds[inv[p]]);
  os << "|e:";
  std::vector<std::pair<int, int>> edges;
  for (auto& [uv, insts] : c.groups) {
    int a = pos[uv.first], b = pos[uv.second];
    if (a > b) std::swap(a, b);
    for (std::size_t k = 0; k < insts.size(); ++k) edges.push_back({a, b});
  }
  std::sort(edges.begin(), edges.end());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (i) os << ",";
    os << edges[i].first << "-" << edges[i].second;
  }
  os << "|x:";
  bool first = true;
  for (auto& [name, leg] : c.d->externals()) {
    if (!first) os << ",";
    first = false;
    os << name << "@" << pos[c.d->owner(leg).vertex];
  }
  os << "|t:";
  first = true;
  for (auto& [a, b] : c.d->delta_edges()) {
    if (!first) os << ",";
    first = false;
    os << a << "-" << b;
  }
  return os.str();
}

struct SearchState {
  const CanonData* c = nullptr;
  std::string best;
  std::vector<std::vector<int>> best_positions;  // vertex -> canonical position
  std::size_t cap = 4096;
};

void search(SearchState& st, const Colors& start) {
  Colors colors = refine(*st.c, start);
  int n = st.c->n;
  std::vector<int> count(n, 0);
  for (int v = 0; v < n; ++v) ++count[colors[v]];
  int split_color = -1;
  for (int v = 0; v < n; ++v)
    if (count[colors[v]] > 1 && (split_color < 0 || colors[v] < split_color))
      split_color = colors[v];
  if (split_color < 0) {
    std::vector<int> pos(n);
    for (int v = 0; v < n; ++v) pos[v] = colors[v];
    std::string enc = serialize(*st.c, pos);
    if (st.best.empty() || enc < st.best) {
      st.best = enc;
      st.best_positions.clear();
      st.best_positions.push_back(pos);
    } else if (enc == st.best && st.best_positions.size() < st.cap) {
      st.best_positions.push_back(pos);
    }
    return;
  }
  for (int v = 0; v < n; ++v) {
    if (colors[v] != split_color) continue;
    Colors next(n);
    for (int u = 0; u < n; ++u) next[u] = colors[u] * 2 + 1;
    next[v] -= 1;
    search(st, next);
  }
}

int perm3_parity(const std::array<int, 3>& p) {
  int inv = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (p[i] > p[j]) ++inv;
  return inv % 2 == 0 ? 1 : -1;
}

// Representative slot layout for one canonical vertex: the order in which
// its attachment items fill slots 0..2. Items are edge ends sorted by
// (peer position, instance, end), then external names sorted by name.
struct RepSlotKey {
  int tag;  // 0 = edge end, 1 = external
  int peer = 0;
  int instance = 0;
  int end = 0;
  std::string name;
  bool operator<(const RepSlotKey& o) const {
    if (tag != o.tag) return tag < o.tag;
    if (tag == 0) return std::tie(peer, instance, end) < std::tie(o.peer, o.instance, o.end);
    return name < o.name;
  }
};

struct RepLayout {
  // per canonical vertex: sorted item keys; slot of item = index in list
  std::vector<std::vector<RepSlotKey>> items;
  // canonical edge list: ((u,slot),(v,slot)) for every instance
  std::vector<std::pair<LegRef, LegRef>> edges;
  std::map<std::string, LegRef> ext_slots;
};

RepLayout rep_layout(const CanonData& c, const std::vector<int>& pos) {
  int n = c.n;
  std::vector<int> inv(n);
  for (int v = 0; v < n; ++v) inv[pos[v]] = v;
  RepLayout lay;
  lay.items.resize(n);
  // canonical edge groups: (min pos, max pos) -> multiplicity
  std::map<std::pair<int, int>, int> canon_groups;
  for (auto& [uv, insts] : c.groups) {
    int a = pos[uv.first], b = pos[uv.second];
    if (a > b) std::swap(a, b);
    canon_groups[{a, b}] += int(insts.size());
  }
  for (auto& [ab, m] : canon_groups) {
    auto [a, b] = ab;
    for (int k = 0; k < m; ++k) {
      if (a == b) {
        lay.items[a].push_back({0, b, k, 0, ""});
        lay.items[a].push_back({0, b, k, 1, ""});
      } else {
        lay.items[a].push_back({0, b, k, 0, ""});
        lay.items[b].push_back({0, a, k, 0, ""});
      }
    }
  }
  for (auto& [name, leg] : c.d->externals())
    lay.items[pos[c.d->owner(leg).vertex]].push_back({1, 0, 0, 0, name});
  for (auto& it : lay.items) std::sort(it.begin(), it.end());

  auto slot_of = [&](int u, const RepSlotKey& key) {
    auto& list = lay.items[u];
    for (int s = 0; s < int(list.size()); ++s)
      if (!(list[s] < key) && !(key < list[s])) return s;
    throw MalformedDiagram("internal: canonical slot not found");
  };
  for (auto& [ab, m] : canon_groups) {
    auto [a, b] = ab;
    for (int k = 0; k < m; ++k) {
      if (a == b)
        lay.edges.push_back({{a, slot_of(a, {0, b, k, 0, ""})}, {a, slot_of(a, {0, b, k, 1, ""})}});
      else
        lay.edges.push_back({{a, slot_of(a, {0, b, k, 0, ""})}, {b, slot_of(b, {0, a, k, 0, ""})}});
    }
  }
  for (auto& [name, leg] : c.d->externals()) {
    int u = pos[c.d->owner(leg).vertex];
    lay.ext_slots[name] = {u, slot_of(u, {1, 0, 0, 0, name})};
  }
  return lay;
}

Diagram build_representative(const CanonData& c, const RepLayout& lay, const std::vector<int>& pos) {
  int n = c.n;
  std::vector<int> inv(n);
  for (int v = 0; v < n; ++v) inv[pos[v]] = v;
  std::vector<Vertex> verts(n);
  for (int p = 0; p < n; ++p) verts[p] = {c.kinds[inv[p]], {3 * p, 3 * p + 1, 3 * p + 2}};
  std::vector<std::pair<int, int>> edges;
  for (auto& [ea, eb] : lay.edges)
    edges.push_back({3 * ea.vertex + ea.slot, 3 * eb.vertex + eb.slot});
  std::map<std::string, int> exts;
  for (auto& [name, lr] : lay.ext_slots) exts[name] = 3 * lr.vertex + lr.slot;
  return Diagram::build(std::move(verts), std::move(edges), std::move(exts),
                        c.d->delta_edges());
}

// Enumerates achievable f-parities over all isomorphisms input -> rep for a
// fixed vertex map. Branches over parallel-edge instance matchings and
// self-edge end orientations; stops early once both signs are seen.
void collect_parities(const CanonData& c, const std::vector<int>& pos, const RepLayout& lay,
                      std::set<int>& signs) {
  struct Group {
    std::pair<int, int> uv;  // input vertex pair, u <= v
    bool self = false;
    int mult = 1;
  };
  std::vector<Group> branch_groups;
  for (auto& [uv, insts] : c.groups)
    if (insts.size() > 1 || uv.first == uv.second)
      branch_groups.push_back({uv, uv.first == uv.second, int(insts.size())});

  // current assignment: per group, a permutation of instances (+ end flips)
  std::vector<std::vector<int>> perms(branch_groups.size());
  std::vector<int> flips(branch_groups.size(), 0);
  for (std::size_t i = 0; i < branch_groups.size(); ++i) {
    perms[i].resize(branch_groups[i].mult);
    for (int k = 0; k < branch_groups[i].mult; ++k) perms[i][k] = k;
  }

  auto group_index = [&](std::pair<int, int> uv) -> int {
    for (std::size_t i = 0; i < branch_groups.size(); ++i)
      if (branch_groups[i].uv == uv) return int(i);
    return -1;
  };

  auto eval_parity = [&]() {
    int parity = 1;
    for (int w = 0; w < c.n; ++w) {
      if (c.kinds[w] != VertexKind::F) continue;
      std::array<int, 3> slot_perm{};
      for (int s = 0; s < 3; ++s) {
        int leg = c.d->vertices()[w].legs[s];
        if (auto name = c.d->external_name_of(leg)) {
          auto lr = lay.ext_slots.at(*name);
          slot_perm[s] = lr.slot;
          continue;
        }
        int peer = *c.d->edge_peer(leg);
        int w2 = c.d->owner(peer).vertex;
        std::pair<int, int> uv = {std::min(w, w2), std::max(w, w2)};
        const auto& insts = c.groups.at(uv);
        int inst = -1, end = 0;
        for (int k = 0; k < int(insts.size()); ++k) {
          if (insts[k].leg_a == leg) {
            inst = k;
            end = 0;
          } else if (insts[k].leg_b == leg) {
            inst = k;
            end = 1;
          }
        }
        int gi = group_index(uv);
        int rep_inst = inst, rep_end = end;
        if (gi >= 0) {
          rep_inst = perms[gi][inst];
          if (branch_groups[gi].self && ((flips[gi] >> inst) & 1)) rep_end = 1 - end;
        }
        int a = pos[uv.first];
        bool self_edge = uv.first == uv.second;
        RepSlotKey key;
        if (self_edge) {
          key = {0, a, rep_inst, rep_end, ""};
          slot_perm[s] = [&] {
            const auto& list = lay.items[a];
            for (int t = 0; t < 3; ++t)
              if (!(list[t] < key) && !(key < list[t])) return t;
            throw MalformedDiagram("internal: slot lookup");
          }();
        } else {
          // this vertex w maps to pos[w]; its peer-key peer is pos[w2]
          int pw = pos[w];
          int peer_pos = pos[w2];
          key = {0, peer_pos, rep_inst, 0, ""};
          const auto& list = lay.items[pw];
          int found = -1;
          for (int t = 0; t < int(list.size()); ++t)
            if (!(list[t] < key) && !(key < list[t])) found = t;
          if (found < 0) throw MalformedDiagram("internal: slot lookup");
          slot_perm[s] = found;
        }
      }
      parity *= perm3_parity(slot_perm);
    }
    return parity;
  };

  // iterate over all branch combinations (tiny in practice)
  std::vector<int> state(branch_groups.size(), 0);
  auto next_perm = [&](std::size_t i) {
    if (branch_groups[i].self) {
      if (flips[i] + 1 < (1 << branch_groups[i].mult)) {
        ++flips[i];
        return true;
      }
      flips[i] = 0;
    }
    return std::next_permutation(perms[i].begin(), perms[i].end());
  };
  std::size_t total_guard = 100000;
  for (;;) {
    signs.insert(eval_parity());
    if (signs.size() == 2) return;
    if (--total_guard == 0) throw MalformedDiagram("canonicalization: too many symmetries");
    std::size_t i = 0;
    for (; i < branch_groups.size(); ++i) {
      if (next_perm(i)) break;
      // rolled over: reset and carry
      std::sort(perms[i].begin(), perms[i].end());
      flips[i] = 0;
    }
    if (i == branch_groups.size()) return;
  }
}

}  // namespace

CanonicalDiagram canonicalize(const Diagram& d) {
  CanonicalDiagram out;
  if (d.vertex_count() == 0) {
    std::ostringstream os;
    os << "v:|e:|x:|t:";
    bool first = true;
    std::string deltas;
    for (auto& [a, b] : d.delta_edges()) {
      if (!first) deltas += ",";
      first = false;
      deltas += a + "-" + b;
    }
    out.encoding = os.str() + deltas;
    out.sign = 1;
    out.zero = false;
    out.representative = d;
    return out;
  }

  CanonData c = collect(d);

  Colors init(c.n);
  {
    std::vector<std::pair<std::vector<std::string>, int>> keys(c.n);
    for (int v = 0; v < c.n; ++v) {
      std::vector<std::string> k;
      k.push_back(std::string(1, kind_char(c.kinds[v])));
      k.push_back(std::to_string(c.self_mult[v]));
      for (auto& nm : c.ext_names[v]) k.push_back(nm);
      keys[v] = {std::move(k), v};
    }
    auto sorted = keys;
    std::sort(sorted.begin(), sorted.end());
    int color = -1;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (i == 0 || sorted[i].first != sorted[i - 1].first) ++color;
      init[sorted[i].second] = color;
    }
  }

  SearchState st;
  st.c = &c;
  search(st, init);

  const auto& pos0 = st.best_positions.front();
  RepLayout lay = rep_layout(c, pos0);
  out.encoding = st.best;
  out.representative = build_representative(c, lay, pos0);

  std::set<int> signs;
  for (auto& pos : st.best_positions) {
    collect_parities(c, pos, lay, signs);
    if (signs.size() == 2) break;
  }
  out.zero = signs.size() == 2;
  out.sign = out.zero ? 1 : *signs.begin();
  return out;
}

}  // namespace sunforest
