#include <doctest.h>

#include <cmath>
#include <limits>

#include "../support.hpp"
#include "kmplab/kmp.hpp"
#include "kmplab/opinion.hpp"
#include "kmplab/replicas.hpp"
#include "kmplab/simulate.hpp"
#include "kmplab/stats.hpp"

using namespace kmplab;
using kmptest::event_on;
using kmptest::kSeed;

namespace {

// Path 0-1-2-3: edge 1 = (1,2) interior, edge 2 = (2,3) boundary at T=2.
const Graph& p3() {
  static const Graph g = path_graph(3, 1.0, 2.0);
  return g;
}

}  // namespace

TEST_CASE("step_kmp on hand-built events") {
  const Graph& g = p3();
  EnergyConfig z{1.0, 2.0, 4.0, 5.0};
  step_kmp(z, event_on(g, 1, 0.25), g);
  CHECK(z == EnergyConfig{1.0, 1.5, 4.5, 5.0});

  z = {1.0, 2.0, 4.0, 5.0};
  step_kmp(z, event_on(g, 1, 0.0), g);
  CHECK(z[1] == 0.0);
  CHECK(z[2] == 6.0);

  z = {1.0, 7.0, 3.0, 5.0};
  step_kmp(z, event_on(g, 2, 0.5, 0.5, 0.7), g);
  CHECK(z[2] == 4.0);
  CHECK(z[3] == doctest::Approx(1.4).epsilon(1e-15));
  CHECK(z[0] == 1.0);
  CHECK(z[1] == 7.0);
}

TEST_CASE("step_kmp_original") {
  const Graph& g = p3();
  EnergyConfig z{1.0, 7.0, 3.0, 5.0};
  step_kmp_original(z, event_on(g, 2, 0.5, 0.5, 0.7), g);
  CHECK(z[2] == 4.0);
  CHECK(z[3] == 4.0);

  MarkedEvent refresh;
  refresh.refresh = true;
  refresh.vertex = 3;
  refresh.B = 0.7;
  step_kmp_original(z, refresh, g);
  CHECK(z[3] == doctest::Approx(1.4).epsilon(1e-15));

  // step_kmp ignores refresh events.
  EnergyConfig y = z;
  step_kmp(y, refresh, g);
  CHECK(y == z);

  EventStream s(g, kSeed, 0, {true});
  for (int k = 0; k < 1000; ++k) {
    const MarkedEvent ev = s.next_event();
    if (ev.refresh || ev.boundary) continue;
    EnergyConfig a{1.0, 0.3, 2.5, 5.0};
    EnergyConfig b = a;
    step_kmp(a, ev, g);
    step_kmp_original(b, ev, g);
    CHECK(a == b);
  }
}

TEST_CASE("interior energy is conserved to 4 ulp") {
  const Graph g = kmptest::grid3();
  EventStream s(g, kSeed);
  EnergyConfig z(g.vertex_count(), 1.0);
  bool ok = true;
  for (int k = 0; k < 20000; ++k) {
    const MarkedEvent ev = s.next_event();
    const Edge& e = g.edge(ev.edge);
    const double before = z[e.first] + z[e.second];
    step_kmp(z, ev, g);
    if (!ev.boundary) {
      const double after = z[e.first] + z[e.second];
      ok = ok && std::abs(after - before) <= 4.0 * std::numeric_limits<double>::epsilon() * before;
    }
  }
  CHECK(ok);
}

TEST_CASE("step_joint examples") {
  const Graph& g = p3();
  JointConfig c{{0.0, 1.0, 3.0, 1.0}, {1.0, 2.0, 6.0, 2.0}};
  const auto ev = event_on(g, 1, 0.5);
  CHECK(joint_zeta_update(c, ev, g)[1] == 10.0);
  step_joint(c, ev, g);
  CHECK(c.x[1] == 2.0);
  CHECK(c.x[2] == 2.0);
  CHECK(c.t[1] == 5.0);
  CHECK(c.t[2] == 5.0);

  JointConfig eq{{0.0, 1.0, 1.0, 1.0}, {1.0, 4.0, 4.0, 2.0}};
  for (double u : {0.0, 0.3, 0.9}) {
    step_joint(eq, event_on(g, 1, u, 0.77), g);
    CHECK(eq.t[1] == 4.0);
    CHECK(eq.t[2] == 4.0);
  }

  JointConfig b{{0.0, 0.0, 2.0, 2.0}, {2.0, 2.0, 3.0, 1.0}};
  const Graph h = path_graph(3, 2.0, 1.0);
  step_joint(b, event_on(h, 2, 0.25, 0.5, 0.9), h);
  CHECK(b.x[2] == 1.0);
  CHECK(b.x[3] == 0.9);
  CHECK(b.t[2] == 2.0);
  CHECK(b.t[3] == 1.0);
}

TEST_CASE("degenerate joint step uses V = 1/2") {
  const Graph& g = p3();
  const auto before = degenerate_joint_events();
  JointConfig c{{0.0, 0.0, 0.0, 1.0}, {1.0, 1.0, 3.0, 2.0}};
  step_joint(c, event_on(g, 1, 0.5), g);
  CHECK(degenerate_joint_events() == before + 1);
  CHECK(c.t[1] == 2.0);
  CHECK(c.t[2] == 2.0);
}

TEST_CASE("zeta_of") {
  CHECK(zeta_of({{2.0, 2.0}, {5.0, 5.0}}) == EnergyConfig{10.0, 10.0});
  CHECK(zeta_of({{0.0, 0.0}, {5.0, 3.0}}) == EnergyConfig{0.0, 0.0});
}

TEST_CASE("carried zeta intertwines with step_kmp bit for bit") {
  const Graph g = kmptest::grid3(0.5, 3.0);
  Rng init(kSeed, 99);
  JointConfig c;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    c.x.push_back(init.exponential());
    c.t.push_back(g.is_boundary(static_cast<VertexId>(v)) ? g.temperatures()[v] : 0.5 + 2.5 * init.uniform());
  }
  HiddenTemperatureState h = make_hidden_state(c);
  CHECK(h.zeta == zeta_of(c));
  EnergyConfig z = h.zeta;
  EventStream s(g, kSeed);
  bool bitwise = true;
  bool direct = true;
  bool close = true;
  for (int k = 0; k < 20000; ++k) {
    const MarkedEvent ev = s.next_event();
    const EnergyConfig from_joint = joint_zeta_update(h.joint, ev, g);
    EnergyConfig from_kmp = zeta_of(h.joint);
    step_kmp(from_kmp, ev, g);
    const Edge& e = g.edge(ev.edge);
    direct = direct && from_joint[e.first] == from_kmp[e.first] && from_joint[e.second] == from_kmp[e.second];

    step_hidden(h, ev, g);
    step_kmp(z, ev, g);
    bitwise = bitwise && h.zeta == z;
    for (std::size_t v = 0; v < z.size(); ++v) {
      close = close && std::abs(h.joint.x[v] * h.joint.t[v] - z[v]) <= 1e-9 * (1.0 + z[v]);
    }
  }
  CHECK(direct);
  CHECK(bitwise);
  CHECK(close);
}

TEST_CASE("joint temperatures: pinned boundary, invariant and attractive interval") {
  const Graph g = path_graph(5, 1.0, 3.0);
  EventStream s(g, kSeed);
  JointConfig out{std::vector<double>(6, 1.0), {1.0, 10.0, 0.0, 7.0, 0.5, 3.0}};
  JointConfig in{std::vector<double>(6, 1.0), {1.0, 1.2, 2.9, 1.0, 2.0, 3.0}};
  bool pinned = true;
  bool invariant = true;
  for (int k = 0; k < 5000; ++k) {
    const MarkedEvent ev = s.next_event();
    step_joint(out, ev, g);
    step_joint(in, ev, g);
    pinned = pinned && out.t[0] == 1.0 && out.t[5] == 3.0 && in.t[0] == 1.0 && in.t[5] == 3.0;
    for (VertexId v = 1; v < 5; ++v) invariant = invariant && in.t[v] >= 1.0 && in.t[v] <= 3.0;
  }
  CHECK(pinned);
  CHECK(invariant);
  for (VertexId v = 1; v < 5; ++v) CHECK((out.t[v] >= 1.0 - 1e-12 && out.t[v] <= 3.0 + 1e-12));
}

TEST_CASE("simulate") {
  const Graph& g = p3();
  EventStream s(g, kSeed);
  const EnergyConfig z0{1.0, 1.0, 1.0, 2.0};
  CHECK(simulate(z0, s, 0.0, step_kmp) == z0);
  EventStream s2(g, kSeed);
  CHECK(simulate_events(z0, s2, 0, step_kmp) == z0);

  // Sampled trajectory follows the cadlag convention.
  EventStream a(g, kSeed);
  EventStream b(g, kSeed);
  const std::vector<double> times{0.5, 1.0, 2.0};
  Trajectory<EnergyConfig> traj;
  const EnergyConfig end = simulate(z0, a, 2.0, step_kmp, times, &traj);
  REQUIRE(traj.states.size() == 3);
  CHECK(traj.states[2] == end);
  CHECK(traj.states[0] == simulate(z0, b, 0.5, step_kmp));
  EventStream c(g, kSeed);
  CHECK_THROWS_AS(simulate(z0, c, 1.0, step_kmp, std::vector<double>{2.0}), std::invalid_argument);
}

TEST_CASE("single oscillator with equal boundary temperatures is exponential") {
  const double theta = 1.7;
  const Graph g = path_graph(2, theta, theta);
  auto z = map_replicas(3000, [&](std::size_t r) {
    EventStream s(g, kSeed, r);
    return simulate(EnergyConfig{theta, 0.1, theta}, s, 30.0, step_kmp)[1];
  });
  const auto ks = ks_statistic(z, [&](double x) { return 1.0 - std::exp(-x / theta); });
  CHECK_FALSE(ks.reject_01);
}

TEST_CASE("boundary energies are exponential with mean T_j at all times") {
  const Graph& g = p3();
  for (double t : {0.5, 3.0}) {
    auto z = map_replicas(3000, [&](std::size_t r) {
      Rng init(kSeed, substream(7, r));
      EventStream s(g, kSeed, r);
      EnergyConfig z0{init.exponential(), 1.0, 1.0, 2.0 * init.exponential()};
      return simulate(z0, s, t, step_kmp);
    });
    std::vector<double> left;
    std::vector<double> right;
    for (const auto& c : z) {
      left.push_back(c[0]);
      right.push_back(c[3]);
    }
    CHECK_FALSE(ks_statistic(left, [](double x) { return 1.0 - std::exp(-x); }).reject_01);
    CHECK_FALSE(ks_statistic(right, [](double x) { return 1.0 - std::exp(-x / 2.0); }).reject_01);
  }
}

TEST_CASE("sample_stationary_energy") {
  const Graph g = path_graph(3, 1.0, 1.0);
  Rng rng(kSeed);
  NuSampler ones = [&](Rng&) { return std::vector<double>(4, 1.0); };
  std::vector<double> x1;
  std::vector<double> x2;
  MomentAccumulator acc(2);
  for (int r = 0; r < 5000; ++r) {
    const EnergyConfig z = sample_stationary_energy(g, ones, rng);
    x1.push_back(z[1]);
    x2.push_back(z[2]);
    const double p[2] = {z[1], z[2]};
    acc.add(p);
  }
  const auto exp1 = [](double x) { return 1.0 - std::exp(-x); };
  CHECK_FALSE(ks_statistic(x1, exp1).reject_01);
  CHECK_FALSE(ks_statistic(x2, exp1).reject_01);
  CHECK(std::abs(acc.covariance(0, 1)) <= 3.0 / std::sqrt(5000.0));

  CHECK(exponential_product(std::vector<double>{0.0, 2.0}, rng)[0] == 0.0);
}

TEST_CASE("single oscillator with arc-sine parameter") {
  const Graph g = path_graph(2, 0.0, 1.0, TemperaturePolicy::nonnegative);
  const auto rho = [](double y) { return arcsine_density(y, 0.0, 1.0); };
  const double m1 = kmptest::arcsine_integral(rho, [](double y) { return y; }, 0.0, 1.0);
  const double m2 = kmptest::arcsine_integral(rho, [](double y) { return 2.0 * y * y; }, 0.0, 1.0);
  CHECK(m1 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(m2 == doctest::Approx(0.75).epsilon(1e-12));

  const auto samples = map_replicas(20000, [&](std::size_t r) {
    Rng rng(kSeed, substream(1, r));
    NuSampler nu = [&](Rng& x) {
      EventStream s(g, x(), 0);
      return sample_stationary_opinion(g, s);
    };
    return sample_stationary_energy(g, nu, rng)[1];
  });
  std::vector<double> sq;
  for (double z : samples) sq.push_back(z * z);
  const Estimate e1 = estimate_mean(samples);
  const Estimate e2 = estimate_mean(sq);
  CHECK(std::abs(e1.mean - m1) <= 3.0 * e1.se);
  CHECK(std::abs(e2.mean - m2) <= 3.0 * e2.se);
}

TEST_CASE("moments from a point parameter track opinion moments") {
  // E zeta_i(t) = E O_i(t), E zeta_i(t)^2 = 2 E O_i(t)^2 with O(0) = s.
  const Graph& g = p3();
  const std::vector<double> s0{1.0, 0.4, 1.6, 2.0};
  const std::size_t R = 20000;
  const double t = 1.0;
  auto zs = map_replicas(R, [&](std::size_t r) {
    Rng rng(kSeed, substream(2, r));
    EventStream s(g, kSeed, substream(3, r));
    return simulate(exponential_product(s0, rng), s, t, step_kmp);
  });
  auto os = map_replicas(R, [&](std::size_t r) {
    EventStream s(g, kSeed, substream(4, r));
    return simulate(OpinionConfig(s0), s, t, step_opinion);
  });
  for (VertexId v : {1u, 2u}) {
    std::vector<double> z1, z2, o1, o2;
    for (std::size_t r = 0; r < R; ++r) {
      z1.push_back(zs[r][v]);
      z2.push_back(zs[r][v] * zs[r][v] / 2.0);
      o1.push_back(os[r][v]);
      o2.push_back(os[r][v] * os[r][v]);
    }
    const Estimate a1 = estimate_mean(z1), b1 = estimate_mean(o1);
    const Estimate a2 = estimate_mean(z2), b2 = estimate_mean(o2);
    CHECK(std::abs(a1.mean - b1.mean) <= 3.0 * (a1.se + b1.se));
    CHECK(std::abs(a2.mean - b2.mean) <= 3.0 * (a2.se + b2.se));
  }
}

TEST_CASE("X and T decorrelate along the joint process") {
  const Graph g = path_graph(4, 1.0, 3.0);
  const std::size_t R = 5000;
  auto runs = map_replicas(R, [&](std::size_t r) {
    Rng init(kSeed, substream(5, r));
    JointConfig c;
    for (int v = 0; v < 5; ++v) c.x.push_back(init.exponential());
    c.t = {1.0, 1.0 + 2.0 * init.uniform(), 1.0 + 2.0 * init.uniform(), 1.0 + 2.0 * init.uniform(), 3.0};
    EventStream s(g, kSeed, substream(6, r));
    return simulate(c, s, 2.0, step_joint);
  });
  for (VertexId v = 1; v < 4; ++v) {
    MomentAccumulator acc(2);
    for (const auto& c : runs) {
      const double p[2] = {std::exp(-c.x[v]), c.t[v]};
      acc.add(p);
    }
    const double corr = acc.covariance(0, 1) / std::sqrt(acc.variance(0) * acc.variance(1));
    CHECK(std::abs(corr) <= 4.0 / std::sqrt(static_cast<double>(R)));
  }
}
