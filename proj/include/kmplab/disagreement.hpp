#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "kmplab/events.hpp"
#include "kmplab/graph.hpp"
#include "kmplab/opinion.hpp"
#include "kmplab/rng.hpp"

namespace kmplab {

/// Disagreement indicators indexed by edge id.
using EtaConfig = std::vector<bool>;

class EtaError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Boundary edges are 1 and no two interior edges sharing a vertex are both 0.
bool is_legal_eta(const EtaConfig& eta, const Graph& g);

/// Throws EtaError if the configuration is not legal.
void require_legal_eta(const EtaConfig& eta, const Graph& g);

/// eta_e = 1 iff the endpoint opinions differ. Boundary edges are always 1.
EtaConfig eta_from_opinion(const OpinionConfig& o, const Graph& g);

/// Spiking step. No-op when eta on the event edge is 0; otherwise the edge
/// becomes 0 (stays 1 on the boundary) and every adjacent edge becomes 1.
/// Does not validate its input; see step_eta_checked.
void step_eta(EtaConfig& eta, const MarkedEvent& ev, const Graph& g);

/// step_eta after require_legal_eta.
void step_eta_checked(EtaConfig& eta, const MarkedEvent& ev, const Graph& g);

/// Backward exploration: edges are processed in `order` (first element first);
/// each processed edge sets its unexplored neighbours to 1 and, when itself
/// interior and unexplored, becomes 0.
EtaConfig perfect_sim_eta(const Graph& g, std::span<const EdgeId> order);

/// Converts 1-based ranks (ranks[e] = position of edge e in the processing
/// order) into an order. Throws EtaError unless ranks is a permutation of 1..|E|.
std::vector<EdgeId> order_from_ranks(std::span<const std::uint32_t> ranks);

/// perfect_sim_eta with a uniformly random order.
EtaConfig perfect_sim_eta_random(const Graph& g, Rng& rng);

/// Stationary probability that `edge` is 0: 1/(n+1) for interior edges with
/// n = edge_neighbor_count, 0 for boundary edges.
double edge_marginal_stationary(const Graph& g, EdgeId edge);

}  // namespace kmplab
