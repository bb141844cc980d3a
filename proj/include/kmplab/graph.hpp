#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kmplab {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

/// Oriented edge. For boundary edges `second` is always the boundary vertex.
struct Edge {
  VertexId first = 0;
  VertexId second = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Opinion-side experiments may pin a boundary vertex at temperature 0; the
/// energy models need strictly positive temperatures.
enum class TemperaturePolicy { positive, nonnegative };

enum class GraphErrorKind {
  empty,
  non_dense_vertices,
  unknown_vertex,
  self_loop,
  duplicate_edge,
  boundary_boundary_edge,
  missing_temperature,
  nonpositive_temperature,
  temperature_on_interior,
  path_too_short,
  unknown_edge,
};

class GraphError : public std::invalid_argument {
 public:
  GraphError(GraphErrorKind kind, const std::string& what)
      : std::invalid_argument(what), kind_(kind) {}

  GraphErrorKind kind() const noexcept { return kind_; }

 private:
  GraphErrorKind kind_;
};

/// Finite graph with an interior/boundary split and fixed boundary
/// temperatures. Immutable after construction.
///
/// Vertices are dense ids 0..n-1. Edge orientation is normalized so that a
/// boundary edge always points at its boundary vertex; interior code can rely
/// on `is_boundary(edge.second)` to recognize boundary edges.
class Graph {
 public:
  Graph() = default;

  std::size_t vertex_count() const noexcept { return is_boundary_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  std::span<const Edge> edges() const noexcept { return edges_; }
  const Edge& edge(EdgeId e) const;

  bool is_boundary(VertexId v) const { return is_boundary_.at(v) != 0; }
  bool is_boundary_edge(EdgeId e) const { return is_boundary(edge(e).second); }

  std::span<const VertexId> interior() const noexcept { return interior_; }
  std::span<const VertexId> boundary() const noexcept { return boundary_; }

  /// Boundary temperature of `v`; throws for interior vertices.
  double temperature(VertexId v) const;
  /// Per-vertex temperatures; interior entries are 0.
  std::span<const double> temperatures() const noexcept { return temps_; }
  std::map<VertexId, double> boundary_temps() const;

  double min_temperature() const noexcept { return min_temp_; }
  double max_temperature() const noexcept { return max_temp_; }

  /// Edges sharing exactly one vertex with `e` (through any vertex).
  std::span<const EdgeId> adjacent_edges(EdgeId e) const;
  /// Edges incident to `v`.
  std::span<const EdgeId> incident_edges(VertexId v) const;

  std::optional<EdgeId> find_edge(VertexId a, VertexId b) const;

  bool is_connected() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.is_boundary_ == b.is_boundary_ && a.edges_ == b.edges_ && a.temps_ == b.temps_;
  }

 private:
  friend Graph build_graph(std::span<const VertexId>, std::span<const VertexId>,
                           std::span<const Edge>, const std::map<VertexId, double>&,
                           TemperaturePolicy);

  std::vector<std::uint8_t> is_boundary_;
  std::vector<VertexId> interior_;
  std::vector<VertexId> boundary_;
  std::vector<Edge> edges_;
  std::vector<double> temps_;
  double min_temp_ = 0.0;
  double max_temp_ = 0.0;

  // CSR adjacency: edge -> adjacent edges, vertex -> incident edges.
  std::vector<std::uint32_t> adj_offsets_;
  std::vector<EdgeId> adj_;
  std::vector<std::uint32_t> inc_offsets_;
  std::vector<EdgeId> inc_;
};

/// Validates and builds a graph. Boundary edges given in the wrong direction
/// are flipped; any other rule violation throws GraphError.
Graph build_graph(std::span<const VertexId> vertices, std::span<const VertexId> interior,
                  std::span<const Edge> edges, const std::map<VertexId, double>& boundary_temps,
                  TemperaturePolicy policy = TemperaturePolicy::positive);

/// One-dimensional graph 0..n with boundary {0, n}. Edge k connects k and
/// k+1, i.e. edges are (1,0), (1,2), ..., (n-2,n-1), (n-1,n).
Graph path_graph(std::size_t n, double t_minus, double t_plus,
                 TemperaturePolicy policy = TemperaturePolicy::positive);

/// Number of other edges sharing exactly one interior vertex with `e`.
std::size_t edge_neighbor_count(const Graph& g, EdgeId e);

}  // namespace kmplab
