#include "kmplab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <utility>

namespace kmplab {

namespace {

std::string vertex_str(VertexId v) { return std::to_string(v); }

std::string edge_str(const Edge& e) {
  return "(" + vertex_str(e.first) + "," + vertex_str(e.second) + ")";
}

}  // namespace

const Edge& Graph::edge(EdgeId e) const {
  if (e >= edges_.size()) {
    throw GraphError(GraphErrorKind::unknown_edge, "unknown edge id " + std::to_string(e));
  }
  return edges_[e];
}

double Graph::temperature(VertexId v) const {
  if (!is_boundary(v)) {
    throw GraphError(GraphErrorKind::temperature_on_interior,
                     "vertex " + vertex_str(v) + " is interior and has no temperature");
  }
  return temps_[v];
}

std::map<VertexId, double> Graph::boundary_temps() const {
  std::map<VertexId, double> out;
  for (VertexId b : boundary_) out.emplace(b, temps_[b]);
  return out;
}

std::span<const EdgeId> Graph::adjacent_edges(EdgeId e) const {
  if (e >= edges_.size()) {
    throw GraphError(GraphErrorKind::unknown_edge, "unknown edge id " + std::to_string(e));
  }
  return {adj_.data() + adj_offsets_[e], adj_.data() + adj_offsets_[e + 1]};
}

std::span<const EdgeId> Graph::incident_edges(VertexId v) const {
  if (v >= vertex_count()) {
    throw GraphError(GraphErrorKind::unknown_vertex, "unknown vertex " + vertex_str(v));
  }
  return {inc_.data() + inc_offsets_[v], inc_.data() + inc_offsets_[v + 1]};
}

std::optional<EdgeId> Graph::find_edge(VertexId a, VertexId b) const {
  if (a >= vertex_count() || b >= vertex_count()) return std::nullopt;
  for (EdgeId e : incident_edges(a)) {
    const Edge& ed = edges_[e];
    if ((ed.first == a && ed.second == b) || (ed.first == b && ed.second == a)) return e;
  }
  return std::nullopt;
}

bool Graph::is_connected() const {
  const std::size_t n = vertex_count();
  if (n == 0) return false;
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<VertexId> stack{0};
  seen[0] = 1;
  std::size_t visited = 1;
  while (!stack.empty()) {
    VertexId v = stack.back();
    stack.pop_back();
    for (EdgeId e : incident_edges(v)) {
      const Edge& ed = edges_[e];
      VertexId w = ed.first == v ? ed.second : ed.first;
      if (!seen[w]) {
        seen[w] = 1;
        ++visited;
        stack.push_back(w);
      }
    }
  }
  return visited == n;
}

Graph build_graph(std::span<const VertexId> vertices, std::span<const VertexId> interior,
                  std::span<const Edge> edges, const std::map<VertexId, double>& boundary_temps,
                  TemperaturePolicy policy) {
  if (vertices.empty()) throw GraphError(GraphErrorKind::empty, "graph has no vertices");
  const std::size_t n = vertices.size();

  std::vector<VertexId> sorted(vertices.begin(), vertices.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 0; k < n; ++k) {
    if (sorted[k] != k) {
      throw GraphError(GraphErrorKind::non_dense_vertices, "vertex ids must be exactly 0..n-1");
    }
  }

  Graph g;
  g.is_boundary_.assign(n, 1);
  for (VertexId v : interior) {
    if (v >= n) throw GraphError(GraphErrorKind::unknown_vertex, "unknown interior vertex " + vertex_str(v));
    g.is_boundary_[v] = 0;
  }
  for (VertexId v = 0; v < n; ++v) (g.is_boundary_[v] ? g.boundary_ : g.interior_).push_back(v);

  g.temps_.assign(n, 0.0);
  for (const auto& [v, t] : boundary_temps) {
    if (v >= n) throw GraphError(GraphErrorKind::unknown_vertex, "temperature for unknown vertex " + vertex_str(v));
    if (!g.is_boundary_[v]) {
      throw GraphError(GraphErrorKind::temperature_on_interior,
                       "temperature given for interior vertex " + vertex_str(v));
    }
    const bool ok = policy == TemperaturePolicy::positive ? t > 0.0 : t >= 0.0;
    if (!ok || !std::isfinite(t)) {
      throw GraphError(GraphErrorKind::nonpositive_temperature,
                       "temperature of vertex " + vertex_str(v) + " must be positive and finite");
    }
    g.temps_[v] = t;
  }
  for (VertexId b : g.boundary_) {
    if (!boundary_temps.contains(b)) {
      throw GraphError(GraphErrorKind::missing_temperature, "boundary vertex " + vertex_str(b) + " has no temperature");
    }
  }
  if (!g.boundary_.empty()) {
    auto [lo, hi] = std::minmax_element(g.boundary_.begin(), g.boundary_.end(),
                                        [&](VertexId a, VertexId b) { return g.temps_[a] < g.temps_[b]; });
    g.min_temp_ = g.temps_[*lo];
    g.max_temp_ = g.temps_[*hi];
  }

  std::set<std::pair<VertexId, VertexId>> seen;
  g.edges_.reserve(edges.size());
  for (Edge e : edges) {
    if (e.first >= n || e.second >= n) {
      throw GraphError(GraphErrorKind::unknown_vertex, "edge " + edge_str(e) + " references an unknown vertex");
    }
    if (e.first == e.second) throw GraphError(GraphErrorKind::self_loop, "self loop at " + vertex_str(e.first));
    const bool b1 = g.is_boundary_[e.first] != 0;
    const bool b2 = g.is_boundary_[e.second] != 0;
    if (b1 && b2) {
      throw GraphError(GraphErrorKind::boundary_boundary_edge, "edge " + edge_str(e) + " joins two boundary vertices");
    }
    if (b1) std::swap(e.first, e.second);
    auto key = std::minmax(e.first, e.second);
    if (!seen.insert(key).second) {
      throw GraphError(GraphErrorKind::duplicate_edge, "duplicate edge " + edge_str(e));
    }
    g.edges_.push_back(e);
  }

  // vertex -> incident edges
  const std::size_t m = g.edges_.size();
  g.inc_offsets_.assign(n + 1, 0);
  for (const Edge& e : g.edges_) {
    ++g.inc_offsets_[e.first + 1];
    ++g.inc_offsets_[e.second + 1];
  }
  std::partial_sum(g.inc_offsets_.begin(), g.inc_offsets_.end(), g.inc_offsets_.begin());
  g.inc_.resize(2 * m);
  {
    std::vector<std::uint32_t> fill(g.inc_offsets_.begin(), g.inc_offsets_.end() - 1);
    for (EdgeId e = 0; e < m; ++e) {
      g.inc_[fill[g.edges_[e].first]++] = e;
      g.inc_[fill[g.edges_[e].second]++] = e;
    }
  }

  // edge -> edges sharing exactly one vertex; no multi-edges so every other
  // incident edge of either endpoint qualifies
  g.adj_offsets_.assign(m + 1, 0);
  for (EdgeId e = 0; e < m; ++e) {
    const Edge& ed = g.edges_[e];
    const auto deg = [&](VertexId v) { return g.inc_offsets_[v + 1] - g.inc_offsets_[v]; };
    g.adj_offsets_[e + 1] = g.adj_offsets_[e] + (deg(ed.first) - 1) + (deg(ed.second) - 1);
  }
  g.adj_.resize(g.adj_offsets_[m]);
  for (EdgeId e = 0; e < m; ++e) {
    std::uint32_t pos = g.adj_offsets_[e];
    for (VertexId v : {g.edges_[e].first, g.edges_[e].second}) {
      for (std::uint32_t k = g.inc_offsets_[v]; k < g.inc_offsets_[v + 1]; ++k) {
        if (g.inc_[k] != e) g.adj_[pos++] = g.inc_[k];
      }
    }
  }
  return g;
}

Graph path_graph(std::size_t n, double t_minus, double t_plus, TemperaturePolicy policy) {
  if (n < 2) throw GraphError(GraphErrorKind::path_too_short, "path graph needs n >= 2");
  std::vector<VertexId> vertices(n + 1);
  std::iota(vertices.begin(), vertices.end(), VertexId{0});
  std::vector<VertexId> interior(vertices.begin() + 1, vertices.end() - 1);
  std::vector<Edge> edges;
  edges.push_back({1, 0});
  for (VertexId k = 1; k + 1 < n; ++k) edges.push_back({k, k + 1});
  edges.push_back({static_cast<VertexId>(n - 1), static_cast<VertexId>(n)});
  return build_graph(vertices, interior, edges, {{0, t_minus}, {static_cast<VertexId>(n), t_plus}}, policy);
}

std::size_t edge_neighbor_count(const Graph& g, EdgeId e) {
  const Edge& ed = g.edge(e);
  std::size_t count = 0;
  for (VertexId v : {ed.first, ed.second}) {
    if (g.is_boundary(v)) continue;
    count += g.incident_edges(v).size() - 1;
  }
  return count;
}

}  // namespace kmplab
