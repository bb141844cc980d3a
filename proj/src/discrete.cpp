#include "kmplab/discrete.hpp"

#include <cmath>
#include <stdexcept>

#include "kmplab/kmp.hpp"
#include "kmplab/replicas.hpp"
#include "kmplab/simulate.hpp"

namespace kmplab {

std::int64_t uniform_split(double u, std::int64_t m) noexcept {
  const auto h = static_cast<std::int64_t>(std::floor(u * static_cast<double>(m + 1)));
  return h < m ? h : m;
}

std::int64_t geometric_from_uniform(double u, double t) noexcept {
  return static_cast<std::int64_t>(std::floor(std::log1p(-u) / std::log(t / (t + 1.0))));
}

void step_discrete(ParticleConfig& k, const MarkedEvent& ev, const Graph& g) {
  if (ev.refresh) return;
  const Edge& e = g.edge(ev.edge);
  const std::int64_t m = k[e.first] + k[e.second];
  const std::int64_t h = uniform_split(ev.U, m);
  k[e.first] = h;
  if (ev.boundary) {
    Rng x = ev.extras();
    k[e.second] = geometric_from_uniform(x.uniform(), g.temperatures()[e.second]);
  } else {
    k[e.second] = m - h;
  }
}

void step_absorbed(ParticleConfig& k, const MarkedEvent& ev, const Graph& g) {
  if (ev.refresh) return;
  const Edge& e = g.edge(ev.edge);
  if (ev.boundary) {
    const std::int64_t h = uniform_split(ev.U, k[e.first]);
    k[e.second] += k[e.first] - h;
    k[e.first] = h;
  } else {
    const std::int64_t m = k[e.first] + k[e.second];
    const std::int64_t h = uniform_split(ev.U, m);
    k[e.first] = h;
    k[e.second] = m - h;
  }
}

double moment_product(std::span<const double> o, std::span<const std::int64_t> k) {
  if (o.size() != k.size()) throw std::invalid_argument("moment_product: size mismatch");
  double p = 1.0;
  for (std::size_t v = 0; v < o.size(); ++v) {
    for (std::int64_t a = 0; a < k[v]; ++a) p *= o[v];
  }
  return p;
}

namespace {

void check_duality_inputs(const Graph& g, std::span<const double> o, const ParticleConfig& k,
                          double t, std::size_t replicas) {
  if (o.size() != g.vertex_count() || k.size() != g.vertex_count()) {
    throw std::invalid_argument("duality check: configuration size does not match the graph");
  }
  for (VertexId b : g.boundary()) {
    if (o[b] != g.temperatures()[b]) throw std::invalid_argument("duality check: boundary values must equal T_j");
  }
  for (std::int64_t c : k) {
    if (c < 0) throw std::invalid_argument("duality check: negative particle count");
  }
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("duality check: bad time");
  if (replicas < 2) throw std::invalid_argument("duality check: need at least two replicas");
}

double factorial(std::int64_t k) {
  double f = 1.0;
  for (std::int64_t a = 2; a <= k; ++a) f *= static_cast<double>(a);
  return f;
}

DualityReport finish(const std::vector<double>& lhs, const std::vector<double>& rhs) {
  DualityReport rep;
  rep.lhs = estimate_mean(lhs);
  rep.rhs = estimate_mean(rhs);
  rep.pass = std::abs(rep.lhs.mean - rep.rhs.mean) <= 3.0 * (rep.lhs.se + rep.rhs.se);
  return rep;
}

std::vector<double> absorbed_side(const Graph& g, std::span<const double> o, const ParticleConfig& k_init,
                                  double t, std::size_t replicas, std::uint64_t seed, std::uint64_t stage) {
  return map_replicas(replicas, [&](std::size_t r) {
    EventStream s(g, seed, substream(stage, r));
    ParticleConfig k = simulate(k_init, s, t, step_absorbed);
    return moment_product(o, k);
  });
}

}  // namespace

DualityReport duality_check_opinion(const Graph& g, const OpinionConfig& o_init,
                                    const ParticleConfig& k_init, double t, std::size_t replicas,
                                    std::uint64_t seed) {
  check_duality_inputs(g, o_init, k_init, t, replicas);
  auto lhs = map_replicas(replicas, [&](std::size_t r) {
    EventStream s(g, seed, substream(1, r));
    OpinionConfig o = simulate(o_init, s, t, step_opinion);
    return moment_product(o, k_init);
  });
  auto rhs = absorbed_side(g, o_init, k_init, t, replicas, seed, 2);
  return finish(lhs, rhs);
}

DualityReport duality_check_continuous(const Graph& g, const std::vector<double>& means,
                                       const ParticleConfig& k_init, double t,
                                       std::size_t replicas, std::uint64_t seed) {
  check_duality_inputs(g, means, k_init, t, replicas);
  auto lhs = map_replicas(replicas, [&](std::size_t r) {
    Rng init(seed, substream(3, r));
    EnergyConfig z = exponential_product(means, init);
    EventStream s(g, seed, substream(4, r));
    z = simulate(std::move(z), s, t, step_kmp);
    double p = moment_product(z, k_init);
    for (std::int64_t c : k_init) p /= factorial(c);
    return p;
  });
  auto rhs = absorbed_side(g, means, k_init, t, replicas, seed, 5);
  return finish(lhs, rhs);
}

}  // namespace kmplab
