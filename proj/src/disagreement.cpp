#include "kmplab/disagreement.hpp"

#include <numeric>
#include <string>

namespace kmplab {

bool is_legal_eta(const EtaConfig& eta, const Graph& g) {
  if (eta.size() != g.edge_count()) return false;
  for (EdgeId e = 0; e < eta.size(); ++e) {
    if (g.is_boundary_edge(e)) {
      if (!eta[e]) return false;
      continue;
    }
    if (eta[e]) continue;
    for (EdgeId f : g.adjacent_edges(e)) {
      if (!eta[f]) return false;
    }
  }
  return true;
}

void require_legal_eta(const EtaConfig& eta, const Graph& g) {
  if (eta.size() != g.edge_count()) {
    throw EtaError("eta has " + std::to_string(eta.size()) + " entries, graph has " +
                   std::to_string(g.edge_count()) + " edges");
  }
  if (!is_legal_eta(eta, g)) throw EtaError("illegal eta configuration");
}

EtaConfig eta_from_opinion(const OpinionConfig& o, const Graph& g) {
  if (o.size() != g.vertex_count()) throw std::invalid_argument("opinion size does not match the graph");
  EtaConfig eta(g.edge_count());
  for (EdgeId e = 0; e < eta.size(); ++e) {
    const Edge& ed = g.edge(e);
    eta[e] = g.is_boundary_edge(e) || o[ed.first] != o[ed.second];
  }
  return eta;
}

void step_eta(EtaConfig& eta, const MarkedEvent& ev, const Graph& g) {
  if (ev.refresh || !eta[ev.edge]) return;
  if (!ev.boundary) eta[ev.edge] = false;
  for (EdgeId f : g.adjacent_edges(ev.edge)) eta[f] = true;
}

void step_eta_checked(EtaConfig& eta, const MarkedEvent& ev, const Graph& g) {
  require_legal_eta(eta, g);
  step_eta(eta, ev, g);
}

EtaConfig perfect_sim_eta(const Graph& g, std::span<const EdgeId> order) {
  const std::size_t m = g.edge_count();
  if (order.size() != m) throw EtaError("order must list every edge exactly once");
  std::vector<bool> seen(m, false);
  for (EdgeId e : order) {
    if (e >= m || seen[e]) throw EtaError("order must list every edge exactly once");
    seen[e] = true;
  }

  EtaConfig eta(m, true);
  std::vector<bool> explored(m, false);
  for (EdgeId e = 0; e < m; ++e) explored[e] = g.is_boundary_edge(e);
  std::size_t remaining = 0;
  for (EdgeId e = 0; e < m; ++e) remaining += explored[e] ? 0 : 1;

  for (EdgeId e : order) {
    if (remaining == 0) break;
    if (!explored[e]) {
      explored[e] = true;
      eta[e] = false;
      --remaining;
    }
    for (EdgeId f : g.adjacent_edges(e)) {
      if (!explored[f]) {
        explored[f] = true;
        eta[f] = true;
        --remaining;
      }
    }
  }
  return eta;
}

std::vector<EdgeId> order_from_ranks(std::span<const std::uint32_t> ranks) {
  const std::size_t m = ranks.size();
  std::vector<EdgeId> order(m, 0);
  std::vector<bool> used(m, false);
  for (EdgeId e = 0; e < m; ++e) {
    const std::uint32_t rk = ranks[e];
    if (rk < 1 || rk > m || used[rk - 1]) throw EtaError("ranks must be a permutation of 1..|E|");
    used[rk - 1] = true;
    order[rk - 1] = e;
  }
  return order;
}

EtaConfig perfect_sim_eta_random(const Graph& g, Rng& rng) {
  std::vector<EdgeId> order(g.edge_count());
  std::iota(order.begin(), order.end(), EdgeId{0});
  for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[rng.below(k)]);
  return perfect_sim_eta(g, order);
}

double edge_marginal_stationary(const Graph& g, EdgeId edge) {
  if (g.is_boundary_edge(edge)) return 0.0;
  return 1.0 / (static_cast<double>(edge_neighbor_count(g, edge)) + 1.0);
}

}  // namespace kmplab
