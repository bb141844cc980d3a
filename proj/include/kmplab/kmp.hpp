#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "kmplab/events.hpp"
#include "kmplab/graph.hpp"
#include "kmplab/rng.hpp"

namespace kmplab {

/// Energies indexed by vertex id.
using EnergyConfig = std::vector<double>;

/// Draws a parameter configuration (one mean per vertex) from some measure.
using NuSampler = std::function<std::vector<double>(Rng&)>;

/// Boundary-driven KMP. Interior edge: (U s, (1-U) s) with s = zeta_i + zeta_j.
/// Boundary edge: zeta_i = U s, zeta_j = B T_j. Refresh events are ignored.
void step_kmp(EnergyConfig& z, const MarkedEvent& ev, const Graph& g);

/// Original KMP boundary: every edge splits like an interior edge and the
/// boundary vertex is refreshed by separate events (StreamOptions::boundary_refresh).
void step_kmp_original(EnergyConfig& z, const MarkedEvent& ev, const Graph& g);

struct JointConfig {
  std::vector<double> x;
  std::vector<double> t;
};

/// Joint KMP / hidden temperature step. V = X_i / (X_i + X_j), or 1/2 when
/// the sum is zero (counted, see degenerate_joint_events()).
void step_joint(JointConfig& c, const MarkedEvent& ev, const Graph& g);

/// Number of joint steps that hit X_i + X_j = 0 since program start.
std::uint64_t degenerate_joint_events() noexcept;

/// Pointwise X * T.
EnergyConfig zeta_of(const JointConfig& c);

/// ζ after the event computed directly from (X, T), i.e. U (X_i T_i + X_j T_j)
/// and B T_j. Equal bit for bit to step_kmp applied to zeta_of(c).
EnergyConfig joint_zeta_update(const JointConfig& c, const MarkedEvent& ev, const Graph& g);

/// Joint process carrying ζ alongside (X, T). The carried ζ follows the KMP
/// rule exactly; X_i * T_i agrees with it up to rounding.
struct HiddenTemperatureState {
  JointConfig joint;
  EnergyConfig zeta;
};

HiddenTemperatureState make_hidden_state(JointConfig c);
void step_hidden(HiddenTemperatureState& s, const MarkedEvent& ev, const Graph& g);

/// Independent exponentials with the given means (a zero mean gives 0).
EnergyConfig exponential_product(std::span<const double> means, Rng& rng);

/// s ~ nu, then independent exponentials with means s.
EnergyConfig sample_stationary_energy(const Graph& g, const NuSampler& nu, Rng& rng);

}  // namespace kmplab
