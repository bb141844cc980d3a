#include "kmplab/kmp.hpp"

#include <atomic>
#include <cstdio>
#include <stdexcept>

#include "kmplab/opinion.hpp"

namespace kmplab {

namespace {

std::atomic<std::uint64_t> degenerate_count{0};

}  // namespace

void step_kmp(EnergyConfig& z, const MarkedEvent& ev, const Graph& g) {
  if (ev.refresh) return;
  const Edge& e = g.edge(ev.edge);
  const double s = z[e.first] + z[e.second];
  z[e.first] = ev.U * s;
  if (ev.boundary) {
    z[e.second] = ev.B * g.temperatures()[e.second];
  } else {
    z[e.second] = (1.0 - ev.U) * s;
  }
}

void step_kmp_original(EnergyConfig& z, const MarkedEvent& ev, const Graph& g) {
  if (ev.refresh) {
    z[ev.vertex] = ev.B * g.temperatures()[ev.vertex];
    return;
  }
  const Edge& e = g.edge(ev.edge);
  const double s = z[e.first] + z[e.second];
  z[e.first] = ev.U * s;
  z[e.second] = (1.0 - ev.U) * s;
}

void step_joint(JointConfig& c, const MarkedEvent& ev, const Graph& g) {
  if (ev.refresh) return;
  const Edge& e = g.edge(ev.edge);
  const VertexId i = e.first;
  const VertexId j = e.second;
  const double sx = c.x[i] + c.x[j];
  double v = 0.5;
  if (sx > 0.0) {
    v = c.x[i] / sx;
  } else if (degenerate_count.fetch_add(1, std::memory_order_relaxed) == 0) {
    std::fprintf(stderr, "kmplab: X_i + X_j = 0 on edge %u, using V = 1/2\n", ev.edge);
  }
  const double w = mix(v, c.t[i], c.t[j]);
  c.x[i] = ev.U * sx;
  c.t[i] = w;
  if (ev.boundary) {
    c.x[j] = ev.B;
  } else {
    c.x[j] = (1.0 - ev.U) * sx;
    c.t[j] = w;
  }
}

std::uint64_t degenerate_joint_events() noexcept { return degenerate_count.load(); }

EnergyConfig zeta_of(const JointConfig& c) {
  if (c.x.size() != c.t.size()) throw std::invalid_argument("X and T sizes differ");
  EnergyConfig z(c.x.size());
  for (std::size_t k = 0; k < z.size(); ++k) z[k] = c.x[k] * c.t[k];
  return z;
}

EnergyConfig joint_zeta_update(const JointConfig& c, const MarkedEvent& ev, const Graph& g) {
  EnergyConfig z = zeta_of(c);
  if (ev.refresh) return z;
  const Edge& e = g.edge(ev.edge);
  const VertexId i = e.first;
  const VertexId j = e.second;
  const double s = c.x[i] * c.t[i] + c.x[j] * c.t[j];
  z[i] = ev.U * s;
  z[j] = ev.boundary ? ev.B * g.temperatures()[j] : (1.0 - ev.U) * s;
  return z;
}

HiddenTemperatureState make_hidden_state(JointConfig c) {
  HiddenTemperatureState s;
  s.zeta = zeta_of(c);
  s.joint = std::move(c);
  return s;
}

void step_hidden(HiddenTemperatureState& s, const MarkedEvent& ev, const Graph& g) {
  step_kmp(s.zeta, ev, g);
  step_joint(s.joint, ev, g);
}

EnergyConfig exponential_product(std::span<const double> means, Rng& rng) {
  EnergyConfig z(means.size());
  for (std::size_t k = 0; k < z.size(); ++k) {
    if (means[k] < 0.0) throw std::invalid_argument("exponential mean must be nonnegative");
    z[k] = means[k] * rng.exponential();
  }
  return z;
}

EnergyConfig sample_stationary_energy(const Graph& g, const NuSampler& nu, Rng& rng) {
  std::vector<double> s = nu(rng);
  if (s.size() != g.vertex_count()) throw std::invalid_argument("nu sampler returned wrong dimension");
  return exponential_product(s, rng);
}

}  // namespace kmplab
