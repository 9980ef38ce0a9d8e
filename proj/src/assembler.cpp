#include "sunforest/assembler.hpp"

#include <algorithm>
#include <map>

namespace sunforest {

int DiagramAssembler::add_vertex(VertexKind kind) {
  vertices_.push_back(kind);
  slot_port_.resize(vertices_.size() * 3, -1);
  return int(vertices_.size()) - 1;
}

DiagramAssembler::Port DiagramAssembler::slot(int vertex, int s) {
  int key = 3 * vertex + s;
  if (slot_port_[key] < 0) {
    slot_port_[key] = int(ports_.size());
    ports_.push_back({PortKind::Slot, vertex, s, ""});
  }
  return {slot_port_[key]};
}

DiagramAssembler::Port DiagramAssembler::external(const std::string& name) {
  for (int i = 0; i < int(ports_.size()); ++i)
    if (ports_[i].kind == PortKind::External && ports_[i].name == name) return {i};
  ports_.push_back({PortKind::External, -1, -1, name});
  return {int(ports_.size()) - 1};
}

DiagramAssembler::Port DiagramAssembler::junction() {
  ports_.push_back({PortKind::Junction, -1, -1, ""});
  return {int(ports_.size()) - 1};
}

void DiagramAssembler::link(Port a, Port b) { links_.push_back({a.id, b.id}); }

DiagramAssembler::Result DiagramAssembler::finalize() const {
  std::vector<std::vector<std::pair<int, int>>> adj(ports_.size());  // (peer, link id)
  for (int l = 0; l < int(links_.size()); ++l) {
    adj[links_[l].first].push_back({links_[l].second, l});
    adj[links_[l].second].push_back({links_[l].first, l});
  }
  for (int p = 0; p < int(ports_.size()); ++p) {
    std::size_t want = ports_[p].kind == PortKind::Junction ? 2 : 1;
    if (adj[p].size() != want)
      throw MalformedDiagram("assembler: port wired " + std::to_string(adj[p].size()) +
                             " times, expected " + std::to_string(want));
  }

  std::vector<char> used_link(links_.size(), 0);
  std::vector<Vertex> verts;
  for (int v = 0; v < int(vertices_.size()); ++v)
    verts.push_back({vertices_[v], {3 * v, 3 * v + 1, 3 * v + 2}});
  std::vector<std::pair<int, int>> edges;
  std::map<std::string, int> externals;
  std::vector<std::pair<std::string, std::string>> deltas;

  auto leg_of = [&](int p) { return 3 * ports_[p].vertex + ports_[p].vslot; };

  // walk chains from each endpoint port
  for (int p = 0; p < int(ports_.size()); ++p) {
    if (ports_[p].kind == PortKind::Junction) continue;
    if (adj[p].empty() || used_link[adj[p][0].second]) continue;
    int cur = p;
    int link = adj[p][0].second;
    while (true) {
      used_link[link] = 1;
      int nxt = links_[link].first == cur ? links_[link].second : links_[link].first;
      if (ports_[nxt].kind != PortKind::Junction) {
        // chain complete: p .. nxt
        const PortInfo& a = ports_[p];
        const PortInfo& b = ports_[nxt];
        if (a.kind == PortKind::Slot && b.kind == PortKind::Slot)
          edges.push_back({leg_of(p), leg_of(nxt)});
        else if (a.kind == PortKind::Slot)
          externals[b.name] = leg_of(p);
        else if (b.kind == PortKind::Slot)
          externals[a.name] = leg_of(nxt);
        else
          deltas.push_back({a.name, b.name});
        break;
      }
      int l0 = adj[nxt][0].second, l1 = adj[nxt][1].second;
      link = (l0 == link) ? l1 : l0;
      cur = nxt;
    }
  }

  // leftover links form closed junction loops
  int loops = 0;
  for (int l = 0; l < int(links_.size()); ++l) {
    if (used_link[l]) continue;
    ++loops;
    int link = l;
    int cur = links_[l].first;
    while (!used_link[link]) {
      used_link[link] = 1;
      int nxt = links_[link].first == cur ? links_[link].second : links_[link].first;
      int l0 = adj[nxt][0].second, l1 = adj[nxt][1].second;
      link = (l0 == link) ? l1 : l0;
      cur = nxt;
    }
  }

  Result r;
  r.diagram = Diagram::build(std::move(verts), std::move(edges), std::move(externals),
                             std::move(deltas));
  r.closed_delta_loops = loops;
  return r;
}

}  // namespace sunforest
