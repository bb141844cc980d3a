#include "kmplab/coupling.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace kmplab {

ParticleConfig PointedEnergyConfig::counts() const {
  ParticleConfig k(kappa.size());
  for (std::size_t v = 0; v < k.size(); ++v) k[v] = static_cast<std::int64_t>(kappa[v].size());
  return k;
}

std::vector<double> poisson_points(double length, Rng& rng) {
  if (!(length > 0.0)) return {};
  std::poisson_distribution<long long> count(length);
  std::vector<double> pts(static_cast<std::size_t>(count(rng)));
  for (double& p : pts) p = length * rng.uniform();
  std::sort(pts.begin(), pts.end());
  return pts;
}

PointedEnergyConfig poissonize(const EnergyConfig& zeta, Rng& rng) {
  PointedEnergyConfig c;
  c.zeta = zeta;
  c.kappa.resize(zeta.size());
  for (std::size_t v = 0; v < zeta.size(); ++v) c.kappa[v] = poisson_points(zeta[v], rng);
  return c;
}

void require_contained(const PointedEnergyConfig& c) {
  if (c.kappa.size() != c.zeta.size()) throw std::invalid_argument("kappa size does not match zeta");
  for (std::size_t v = 0; v < c.zeta.size(); ++v) {
    for (double p : c.kappa[v]) {
      if (p < 0.0 || p > c.zeta[v]) {
        throw std::invalid_argument("point outside [0, zeta] at vertex " + std::to_string(v));
      }
    }
  }
}

void step_coupled(PointedEnergyConfig& c, const MarkedEvent& ev, const Graph& g) {
  if (ev.refresh) return;
  const Edge& e = g.edge(ev.edge);
  const VertexId i = e.first;
  const VertexId j = e.second;
  const double s = c.zeta[i] + c.zeta[j];
  const std::size_t m = c.kappa[i].size() + c.kappa[j].size();
  step_kmp(c.zeta, ev, g);

  Rng x = ev.extras();
  std::vector<double> remix(m);
  for (double& p : remix) p = s * x.uniform();
  std::sort(remix.begin(), remix.end());
  const double u = ev.U * s;
  const auto cut = std::upper_bound(remix.begin(), remix.end(), u);

  c.kappa[i].assign(remix.begin(), cut);
  if (ev.boundary) {
    c.kappa[j] = poisson_points(c.zeta[j], x);
  } else {
    auto& right = c.kappa[j];
    right.clear();
    for (auto it = cut; it != remix.end(); ++it) right.push_back(std::min(*it - u, c.zeta[j]));
  }
}

void step_coupled_counts(CoupledCounts& c, const MarkedEvent& ev, const Graph& g) {
  if (ev.refresh) return;
  const Edge& e = g.edge(ev.edge);
  const VertexId i = e.first;
  const VertexId j = e.second;
  const std::int64_t m = c.k[i] + c.k[j];
  step_kmp(c.zeta, ev, g);
  Rng x = ev.extras();
  std::binomial_distribution<std::int64_t> split(m, ev.U);
  const std::int64_t left = split(x);
  c.k[i] = left;
  if (ev.boundary) {
    c.k[j] = c.zeta[j] > 0.0 ? std::poisson_distribution<std::int64_t>(c.zeta[j])(x) : 0;
  } else {
    c.k[j] = m - left;
  }
}

PointedEnergyConfig sample_coupled_stationary(const Graph& g, const NuSampler& nu, Rng& rng) {
  return poissonize(sample_stationary_energy(g, nu, rng), rng);
}

}  // namespace kmplab
