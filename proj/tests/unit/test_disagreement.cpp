#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "../support.hpp"
#include "kmplab/disagreement.hpp"
#include "kmplab/opinion.hpp"
#include "kmplab/replicas.hpp"
#include "kmplab/stats.hpp"

using namespace kmplab;
using kmptest::event_on;
using kmptest::kSeed;

namespace {

EtaConfig ones(const Graph& g) { return EtaConfig(g.edge_count(), true); }

std::vector<double> zero_frequency(const Graph& g, std::size_t replicas, std::uint64_t stage) {
  const auto etas = map_replicas(replicas, [&](std::size_t r) {
    Rng rng(kSeed, substream(stage, r));
    return perfect_sim_eta_random(g, rng);
  });
  std::vector<double> p(g.edge_count(), 0.0);
  for (const auto& eta : etas) {
    CHECK(is_legal_eta(eta, g));
    for (EdgeId e = 0; e < g.edge_count(); ++e) p[e] += eta[e] ? 0.0 : 1.0;
  }
  for (double& x : p) x /= static_cast<double>(replicas);
  return p;
}

}  // namespace

TEST_CASE("legal set") {
  const Graph g = path_graph(4, 1.0, 2.0);  // edges (1,0) (1,2) (2,3) (3,4)
  CHECK(is_legal_eta(ones(g), g));
  CHECK(is_legal_eta({true, false, true, true}, g));
  CHECK_FALSE(is_legal_eta({false, true, true, true}, g));
  CHECK_FALSE(is_legal_eta({true, false, false, true}, g));
  CHECK_FALSE(is_legal_eta({true, true, true}, g));
  CHECK_THROWS_AS(require_legal_eta({true, false, false, true}, g), EtaError);
}

TEST_CASE("eta_from_opinion") {
  const Graph g = path_graph(4, 1.0, 2.0);
  CHECK(eta_from_opinion({1.0, 1.5, 1.5, 1.5, 2.0}, g) == EtaConfig{true, false, false, true});
  CHECK(eta_from_opinion({1.0, 1.2, 1.4, 1.6, 2.0}, g) == ones(g));
  // Boundary edges are 1 even when the interior neighbour equals T_j.
  CHECK(eta_from_opinion({1.0, 1.0, 1.4, 1.6, 2.0}, g)[0]);

  OpinionConfig o{1.0, 1.2, 1.4, 1.6, 2.0};
  step_opinion(o, event_on(g, 2, 0.5, 0.37), g);
  CHECK(eta_from_opinion(o, g) == EtaConfig{true, true, false, true});
}

TEST_CASE("step_eta examples") {
  const Graph g = path_graph(3, 1.0, 2.0);  // e1=(1,0) boundary, e2=(1,2), e3=(2,3) boundary
  EtaConfig eta = ones(g);
  step_eta(eta, event_on(g, 1, 0.5), g);
  CHECK(eta == EtaConfig{true, false, true});

  step_eta(eta, event_on(g, 0, 0.5), g);
  CHECK(eta == EtaConfig{true, true, true});

  const Graph p = path_graph(4, 1.0, 2.0);
  EtaConfig z{true, false, true, true};
  step_eta(z, event_on(p, 1, 0.5), p);
  CHECK(z == EtaConfig{true, false, true, true});
  step_eta(z, event_on(p, 2, 0.5), p);
  CHECK(z == EtaConfig{true, true, false, true});

  EtaConfig bad{true, false, false, true};
  CHECK_THROWS_AS(step_eta_checked(bad, event_on(p, 1, 0.5), p), EtaError);
}

TEST_CASE("step_eta preserves the legal set and matches the opinion dynamics") {
  for (const Graph& g : {path_graph(7, 1.0, 2.0), kmptest::grid3(1.0, 2.0), kmptest::star(3, 2)}) {
    Rng init(kSeed);
    OpinionConfig o = pinned_opinion(g, 0.0);
    for (VertexId v : g.interior()) o[v] = 5.0 * init.uniform();
    EtaConfig eta = eta_from_opinion(o, g);
    EventStream s(g, kSeed);
    bool legal = true;
    bool same = true;
    for (int k = 0; k < 20000; ++k) {
      const MarkedEvent ev = s.next_event();
      step_opinion(o, ev, g);
      step_eta_checked(eta, ev, g);
      legal = legal && is_legal_eta(eta, g);
      same = same && eta == eta_from_opinion(o, g);
    }
    CHECK(legal);
    CHECK(same);
  }
}

TEST_CASE("perfect simulation worked example") {
  const Graph g = path_graph(8, 1.0, 2.0);
  const std::vector<std::uint32_t> ranks{3, 6, 5, 8, 1, 2, 4, 7};
  CHECK(perfect_sim_eta(g, order_from_ranks(ranks)) == EtaConfig{true, true, false, true, false, true, true, true});

  CHECK_THROWS_AS(order_from_ranks(std::vector<std::uint32_t>{1, 1, 2}), EtaError);
  CHECK_THROWS_AS(order_from_ranks(std::vector<std::uint32_t>{0, 1, 2}), EtaError);
  CHECK_THROWS_AS(perfect_sim_eta(g, std::vector<EdgeId>{0, 1, 2}), EtaError);
  CHECK_THROWS_AS(perfect_sim_eta(g, std::vector<EdgeId>{0, 1, 2, 3, 4, 5, 6, 6}), EtaError);
}

TEST_CASE("perfect simulation on a two-edge path") {
  const Graph g = path_graph(2, 1.0, 2.0);
  CHECK(perfect_sim_eta(g, std::vector<EdgeId>{0, 1}) == EtaConfig{true, true});
  CHECK(perfect_sim_eta(g, std::vector<EdgeId>{1, 0}) == EtaConfig{true, true});
}

TEST_CASE("edge_marginal_stationary") {
  const Graph p = path_graph(5, 1.0, 2.0);
  CHECK(edge_marginal_stationary(p, *p.find_edge(2, 3)) == doctest::Approx(1.0 / 3.0));
  CHECK(edge_marginal_stationary(p, *p.find_edge(1, 0)) == 0.0);
  const Graph s = kmptest::star(3, 1);
  CHECK(edge_marginal_stationary(s, *s.find_edge(0, 1)) == doctest::Approx(0.25));
  CHECK_THROWS_AS(edge_marginal_stationary(p, 42), GraphError);
}

TEST_CASE("perfect simulation marginals are 1/(n+1)") {
  const std::size_t R = 40000;
  for (const Graph& g : {path_graph(5, 1.0, 2.0), kmptest::star(3, 1), kmptest::grid3()}) {
    const auto p = zero_frequency(g, R, 1);
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      const double expect = edge_marginal_stationary(g, e);
      if (g.is_boundary_edge(e)) {
        CHECK(p[e] == 0.0);
      } else {
        CHECK(std::abs(p[e] - expect) <= 3.0 * kmptest::binomial_se(expect, R));
      }
    }
  }
}

TEST_CASE("single-edge marginal of the dynamics is a two-state chain") {
  const Graph g = path_graph(5, 1.0, 2.0);
  const EdgeId mid = *g.find_edge(2, 3);
  const auto n = static_cast<double>(edge_neighbor_count(g, mid));
  EventStream s(g, kSeed);
  EtaConfig eta = ones(g);
  std::vector<double> hold0;
  std::vector<double> hold1;
  double since = 0.0;
  bool state = true;
  double time0 = 0.0;
  double last = 0.0;
  while (hold0.size() < 3000 || hold1.size() < 3000) {
    const MarkedEvent ev = s.next_event();
    if (!state) time0 += ev.time - last;
    last = ev.time;
    step_eta(eta, ev, g);
    if (eta[mid] != state) {
      (state ? hold1 : hold0).push_back(ev.time - since);
      since = ev.time;
      state = eta[mid];
    }
  }
  // Time average of {eta = 0} with a renewal-reward standard error over
  // (0-sojourn, 1-sojourn) cycles.
  const double p0 = time0 / last;
  const std::size_t m = std::min(hold0.size(), hold1.size());
  std::vector<double> resid;
  double cycle = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    resid.push_back(hold0[k] - p0 * (hold0[k] + hold1[k]));
    cycle += hold0[k] + hold1[k];
  }
  cycle /= static_cast<double>(m);
  const double se = estimate_mean(resid).se / cycle;
  CHECK(std::abs(p0 - 1.0 / (n + 1.0)) <= 3.0 * se);
  CHECK_FALSE(ks_statistic(hold0, [&](double x) { return 1.0 - std::exp(-n * x); }).reject_01);
  CHECK_FALSE(ks_statistic(hold1, [](double x) { return 1.0 - std::exp(-x); }).reject_01);
}
