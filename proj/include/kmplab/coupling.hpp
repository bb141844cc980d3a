#pragma once

#include <vector>

#include "kmplab/discrete.hpp"
#include "kmplab/events.hpp"
#include "kmplab/graph.hpp"
#include "kmplab/kmp.hpp"
#include "kmplab/rng.hpp"

namespace kmplab {

/// Energies with marked points: kappa[i] is a sorted list of points in
/// [0, zeta[i]].
struct PointedEnergyConfig {
  EnergyConfig zeta;
  std::vector<std::vector<double>> kappa;

  ParticleConfig counts() const;
};

/// Count-only view of the coupling: energies plus point counts.
struct CoupledCounts {
  EnergyConfig zeta;
  ParticleConfig k;
};

/// Sorted rate-one Poisson points on [0, length], count first then positions.
std::vector<double> poisson_points(double length, Rng& rng);

/// Rate-one Poisson point set on [0, zeta_i] for every vertex.
PointedEnergyConfig poissonize(const EnergyConfig& zeta, Rng& rng);

/// Throws std::invalid_argument if some point lies outside its interval.
void require_contained(const PointedEnergyConfig& c);

/// Remix-and-split step. zeta follows step_kmp exactly. The K_i + K_j points
/// are redrawn uniformly on [0, s] and split at U s; the left block goes to i,
/// the right block (shifted) to j. On a boundary edge the right block is
/// dropped and j gets fresh Poisson points on [0, B T_j].
void step_coupled(PointedEnergyConfig& c, const MarkedEvent& ev, const Graph& g);

/// Same law for (zeta, K) without positions: K'_i ~ Binomial(K_i + K_j, U),
/// boundary K'_j ~ Poisson(B T_j).
void step_coupled_counts(CoupledCounts& c, const MarkedEvent& ev, const Graph& g);

/// zeta from sample_stationary_energy, then poissonize.
PointedEnergyConfig sample_coupled_stationary(const Graph& g, const NuSampler& nu, Rng& rng);

}  // namespace kmplab
