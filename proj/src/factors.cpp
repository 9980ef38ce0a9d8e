#include "sunforest/factors.hpp"

#include <map>

#include "sunforest/assembler.hpp"

namespace sunforest {

std::pair<Diagram, int> assemble_factors(const std::vector<TensorFactor>& factors) {
  DiagramAssembler a;
  // occurrence sites per index name
  std::map<std::string, std::vector<DiagramAssembler::Port>> sites;
  for (auto& f : factors) {
    if (f.type == TensorFactor::Type::Delta) {
      if (f.indices.size() != 2) throw MalformedDiagram("delta takes two indices");
      auto j = a.junction();
      sites[f.indices[0]].push_back(j);
      sites[f.indices[1]].push_back(j);
    } else {
      if (f.indices.size() != 3) throw MalformedDiagram("d/f take three indices");
      int v = a.add_vertex(f.type == TensorFactor::Type::D ? VertexKind::D : VertexKind::F);
      for (int s = 0; s < 3; ++s) sites[f.indices[s]].push_back(a.slot(v, s));
    }
  }
  for (auto& [name, ps] : sites) {
    if (ps.size() == 1)
      a.link(ps[0], a.external(name));
    else if (ps.size() == 2)
      a.link(ps[0], ps[1]);
    else
      throw MalformedDiagram("index " + name + " occurs " + std::to_string(ps.size()) + " times");
  }
  auto r = a.finalize();
  return {std::move(r.diagram), r.closed_delta_loops};
}

}  // namespace sunforest
