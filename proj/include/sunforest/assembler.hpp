#pragma once

#include <string>
#include <vector>

#include "sunforest/diagram.hpp"

namespace sunforest {

/// Wiring builder for rewrite outputs. Vertex slots and external names are
/// endpoints (degree 1); junctions are pass-through points (degree 2).
/// finalize() resolves chains into edges / external attachments / bare
/// deltas, and counts closed all-junction loops — each one is a contracted
/// delta trace contributing a factor N^2-1 that the caller applies.
class DiagramAssembler {
 public:
  struct Port {
    int id = -1;
  };

  int add_vertex(VertexKind kind);
  Port slot(int vertex, int slot);
  Port external(const std::string& name);
  Port junction();
  void link(Port a, Port b);

  struct Result {
    Diagram diagram;
    int closed_delta_loops = 0;
  };
  Result finalize() const;

 private:
  enum class PortKind { Slot, External, Junction };
  struct PortInfo {
    PortKind kind;
    int vertex = -1;
    int vslot = -1;
    std::string name;
  };
  std::vector<VertexKind> vertices_;
  std::vector<PortInfo> ports_;
  std::vector<std::pair<int, int>> links_;
  std::vector<int> slot_port_;  // 3*vertex+slot -> port id (lazily created)
};

}  // namespace sunforest
