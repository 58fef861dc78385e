#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "wirebend/geometry.hpp"

namespace wirebend {

using VertexIndex = std::size_t;
using EdgeId = std::size_t;

/// Undirected edge stored with a < b.
struct Edge {
  VertexIndex a = 0;
  VertexIndex b = 0;
  EdgeId id = 0;

  bool operator==(const Edge&) const = default;
};

/// Undirected wireframe: vertices in millimetres, simple edges (no loops, no duplicates).
class WireframeGraph {
 public:
  WireframeGraph() = default;

  VertexIndex add_vertex(const Vec3& p);

  /// Adds edge {i, j}. Returns false when the edge already exists.
  /// Throws InvalidInput for self-loops and out-of-range indices.
  bool add_edge(VertexIndex i, VertexIndex j);

  /// Removes edge {i, j} if present; remaining edge ids are renumbered densely.
  bool remove_edge(VertexIndex i, VertexIndex j);

  bool has_edge(VertexIndex i, VertexIndex j) const;

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Vec3& vertex(VertexIndex i) const { return vertices_.at(i); }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  std::vector<std::size_t> degrees() const;

  /// FNV-1a over the canonical JSON form; identifies the design a program came from.
  std::string content_hash() const;

  bool operator==(const WireframeGraph&) const = default;

 private:
  std::vector<Vec3> vertices_;
  std::vector<Edge> edges_;
};

enum class GraphFormat { Auto, Json, Obj };

/// Parses a JSON-graph or OBJ-subset document. Duplicate edges collapse silently;
/// ignored OBJ records and isolated vertices are reported through `warnings`.
WireframeGraph ingest_graph(std::string_view document, GraphFormat format = GraphFormat::Auto,
                            std::vector<std::string>* warnings = nullptr);

/// Canonical JSON form: {"vertices": [[x,y,z],...], "edges": [[i,j],...]}.
std::string graph_to_json(const WireframeGraph& g);

enum class EulerClass { Circuit, Trail, None };

const char* to_string(EulerClass c);

struct EulerStatus {
  EulerClass classification = EulerClass::None;
  std::vector<VertexIndex> odd_vertices;  // ascending
  bool connected = false;                 // over vertices of degree >= 1

  bool operator==(const EulerStatus&) const = default;
};

EulerStatus euler_status(const WireframeGraph& g);

/// Hierholzer traversal using every edge once. Lowest-index neighbour first; trails
/// start at the lowest odd vertex, circuits at the lowest non-isolated vertex.
/// Throws InvalidInput when the graph has no Euler trail or circuit.
std::vector<VertexIndex> euler_path(const WireframeGraph& g);

}  // namespace wirebend
