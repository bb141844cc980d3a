#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kmplab/events.hpp"
#include "kmplab/graph.hpp"
#include "kmplab/opinion.hpp"
#include "kmplab/stats.hpp"

namespace kmplab {

/// Particle counts indexed by vertex id.
using ParticleConfig = std::vector<std::int64_t>;

/// min(floor(u (m+1)), m): uniform on {0..m} when u is uniform on [0,1).
std::int64_t uniform_split(double u, std::int64_t m) noexcept;

/// Geometric on {0,1,...} with mean t by inverse CDF from a uniform u in [0,1).
std::int64_t geometric_from_uniform(double u, double t) noexcept;

/// Boundary-driven discrete KMP. K'_i = uniform_split(U, K_i + K_j); interior
/// edges give the rest to j, boundary edges refresh K_j geometrically with mean
/// T_j from the event extras.
void step_discrete(ParticleConfig& k, const MarkedEvent& ev, const Graph& g);

/// Absorbed discrete KMP: boundary vertices accumulate. On a boundary edge
/// K'_i = uniform_split(U, K_i) and K_j grows by the difference.
void step_absorbed(ParticleConfig& k, const MarkedEvent& ev, const Graph& g);

struct DualityReport {
  Estimate lhs;
  Estimate rhs;
  /// |lhs - rhs| <= 3 (se_lhs + se_rhs), i.e. the 3 sigma intervals overlap.
  bool pass = false;
};

/// prod_i o_i^{k_i}.
double moment_product(std::span<const double> o, std::span<const std::int64_t> k);

/// E[prod O_i(t)^{K_i}] under the opinion process against
/// E[prod O_i^{K_i(t)}] under the absorbed process.
DualityReport duality_check_opinion(const Graph& g, const OpinionConfig& o_init,
                                    const ParticleConfig& k_init, double t, std::size_t replicas,
                                    std::uint64_t seed);

/// zeta(0) independent exponentials with means `means`;
/// E[prod zeta_i(t)^{K_i} / K_i!] under boundary-driven KMP against
/// E[prod means_i^{K_i(t)}] under the absorbed process.
DualityReport duality_check_continuous(const Graph& g, const std::vector<double>& means,
                                       const ParticleConfig& k_init, double t,
                                       std::size_t replicas, std::uint64_t seed);

}  // namespace kmplab
