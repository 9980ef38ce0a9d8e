#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sunforest {

enum class VertexKind : std::uint8_t { D, F };

inline char kind_char(VertexKind k) { return k == VertexKind::D ? 'd' : 'f'; }

/// Trivalent vertex. For kind F the stored leg order is a cyclic order:
/// rotations are free, an odd permutation flips the diagram's sign.
struct Vertex {
  VertexKind kind;
  std::array<int, 3> legs;  // leg ids, unique across the diagram
};

struct LegRef {
  int vertex;
  int slot;
};

struct MalformedDiagram : std::runtime_error {
  explicit MalformedDiagram(const std::string& what) : std::runtime_error(what) {}
};

/// A tensor diagram: trivalent d/f vertices, internal edges between legs,
/// named external legs, and bare delta factors between external names.
/// Immutable after construction.
class Diagram {
 public:
  Diagram() = default;  // the empty diagram (scalar 1)

  static Diagram build(std::vector<Vertex> vertices,
                       std::vector<std::pair<int, int>> internal_edges,
                       std::map<std::string, int> external_legs,
                       std::vector<std::pair<std::string, std::string>> delta_edges = {});

  int vertex_count() const { return int(vertices_.size()); }
  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<std::pair<int, int>>& internal_edges() const { return internal_edges_; }
  const std::map<std::string, int>& externals() const { return externals_; }
  const std::vector<std::pair<std::string, std::string>>& delta_edges() const {
    return delta_edges_;
  }

  bool empty() const { return vertices_.empty() && delta_edges_.empty(); }
  int f_count() const;

  /// All free index names: vertex-attached externals plus delta endpoints.
  std::set<std::string> external_names() const;

  LegRef owner(int leg) const;
  /// The opposite leg across the internal edge through `leg`, if internal.
  std::optional<int> edge_peer(int leg) const;
  std::optional<std::string> external_name_of(int leg) const;

 private:
  void validate() const;

  std::vector<Vertex> vertices_;
  std::vector<std::pair<int, int>> internal_edges_;  // normalized (min,max), sorted
  std::map<std::string, int> externals_;             // name -> leg id
  std::vector<std::pair<std::string, std::string>> delta_edges_;  // normalized, sorted
  std::map<int, LegRef> owner_;
  std::map<int, int> peer_;
  std::map<int, std::string> leg_name_;
};

struct CycleReport {
  struct Cycle {
    std::vector<int> vertices;  // vertex indices in cycle order
    int f_count = 0;
    int length = 0;
  };
  std::vector<Cycle> cycles;
  bool has_cycle = false;  // exact even when the enumeration is truncated
};

/// Simple cycles of the vertex multigraph up to max_len (all, when < 0).
/// Length-1 cycles are self-edges, length-2 cycles parallel edge pairs.
CycleReport find_cycles(const Diagram& d, int max_len = -1, std::size_t max_count = 100000);

struct Classification {
  bool forest = true;
  int min_loop_length = 0;  // smallest cycle, when not a forest
  int loop_f_count = 0;
};

Classification classify(const Diagram& d);

/// Canonical form of a diagram. `sign` relates the input to the stored
/// representative: input = sign * representative. `zero` marks diagrams
/// admitting an automorphism of odd f-parity (such tensors vanish).
struct CanonicalDiagram {
  std::string encoding;
  int sign = 1;
  bool zero = false;
  Diagram representative;
};

CanonicalDiagram canonicalize(const Diagram& d);

/// Stored triple of `v` rotated so `leg` sits at position `where`.
/// Rotations are free for both vertex kinds.
std::array<int, 3> rotate_legs(const Vertex& v, int leg, int where);

}  // namespace sunforest
