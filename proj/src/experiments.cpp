#include "kmplab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <set>

#include "kmplab/coupling.hpp"
#include "kmplab/disagreement.hpp"
#include "kmplab/discrete.hpp"
#include "kmplab/events.hpp"
#include "kmplab/exact.hpp"
#include "kmplab/io.hpp"
#include "kmplab/kmp.hpp"
#include "kmplab/opinion.hpp"
#include "kmplab/replicas.hpp"
#include "kmplab/simulate.hpp"
#include "kmplab/stats.hpp"

#ifndef KMPLAB_VERSION
#define KMPLAB_VERSION "unknown"
#endif

namespace kmplab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = {
      "simulate",     "stationary-sample", "perfect-sim-eta", "exact-moments",
      "duality-check", "hydrostatic",      "independence",    "coupling-check"};
  return kinds;
}

const std::vector<std::string>& process_kinds() {
  static const std::vector<std::string> kinds = {"kmp",      "kmp-original", "joint",
                                                 "opinion",  "modified-opinion", "discrete",
                                                 "absorbed", "eta",          "coupled"};
  return kinds;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "experiment", "path",  "temps", "graph",  "seed", "replicas", "horizon",
      "events",     "sample-times", "kind", "init", "perm", "ns",  "psi",
      "t",          "particles", "mode", "what", "window", "out", "assert"};
  return keys;
}

namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::map<std::string, std::string> defaults_for(const std::string& experiment) {
  std::map<std::string, std::string> d = {
      {"path", "4"},        {"temps", "1,2"},  {"graph", ""},      {"seed", "1"},
      {"replicas", "1000"}, {"horizon", "10"}, {"events", ""},     {"sample-times", ""},
      {"kind", "kmp"},      {"init", ""},      {"perm", ""},       {"ns", "5,10,20,40"},
      {"psi", "one"},       {"t", "1"},        {"particles", ""},  {"mode", "both"},
      {"what", "opinion"},  {"window", "1"},   {"assert", "false"}};
  const char* env = std::getenv("KMPLAB_OUT_DIR");
  d["out"] = env && *env ? env : ".";
  if (experiment == "simulate") {
    d["path"] = "3";
    d["replicas"] = "1";
  } else if (experiment == "stationary-sample") {
    d["path"] = "10";
  } else if (experiment == "perfect-sim-eta") {
    d["path"] = "5";
    d["replicas"] = "10000";
  } else if (experiment == "exact-moments") {
    d["path"] = "10";
    d["temps"] = "0,1";
  } else if (experiment == "duality-check") {
    d["replicas"] = "10000";
    d["t"] = "0,1,5";
  } else if (experiment == "hydrostatic") {
    d["temps"] = "0,1";
  } else if (experiment == "independence") {
    d["replicas"] = "10000";
    d["t"] = "3";
  } else if (experiment == "coupling-check") {
    d["path"] = "5";
    d["replicas"] = "10000";
  }
  return d;
}

std::uint64_t parse_seed(const std::string& s) {
  try {
    std::size_t used = 0;
    const bool hex = s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X');
    if (s.empty() || s[0] == '-' || s[0] == '+') throw std::invalid_argument(s);
    const std::uint64_t v = std::stoull(s, &used, hex ? 16 : 10);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("seed must be a decimal or 0x-prefixed hex integer, got '" + s + "'");
  }
}

std::size_t parse_count(const std::string& key, const std::string& s) {
  const auto v = parse_uint_list(s);
  if (v.size() != 1) throw ConfigError(key + " must be a single nonnegative integer");
  return static_cast<std::size_t>(v[0]);
}

double parse_real(const std::string& key, const std::string& s) {
  const auto v = parse_real_list(s);
  if (v.size() != 1 || !std::isfinite(v[0])) throw ConfigError(key + " must be a single finite number");
  return v[0];
}

bool parse_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(key + " must be true or false");
}

/// Experiments and processes that only involve opinions accept T = 0.
TemperaturePolicy policy_for(const ExperimentConfig& c) {
  const std::string& e = c.experiment;
  if (e == "hydrostatic" || e == "perfect-sim-eta" || e == "exact-moments") return TemperaturePolicy::nonnegative;
  if (e == "stationary-sample" && c.what == "opinion") return TemperaturePolicy::nonnegative;
  if (e == "duality-check" && c.mode == "opinion") return TemperaturePolicy::nonnegative;
  if (e == "simulate" && (c.process == "opinion" || c.process == "modified-opinion" || c.process == "eta" ||
                          c.process == "absorbed")) {
    return TemperaturePolicy::nonnegative;
  }
  return TemperaturePolicy::positive;
}

}  // namespace

ExperimentConfig make_config(const std::map<std::string, std::string>& raw) {
  for (const auto& [k, v] : raw) {
    if (!contains(config_keys(), k)) throw ConfigError("unknown key '" + k + "'");
  }
  const auto exp_it = raw.find("experiment");
  if (exp_it == raw.end() || !contains(experiment_kinds(), exp_it->second)) {
    throw ConfigError("experiment must be one of the run kinds");
  }
  ExperimentConfig c;
  c.experiment = exp_it->second;
  c.effective = defaults_for(c.experiment);
  for (const auto& [k, v] : raw) c.effective[k] = v;
  const auto& e = c.effective;

  try {
    const std::string& path = e.at("path");
    c.graph_file = e.at("graph");
    if (c.graph_file.empty()) {
      std::string p = path;
      if (p.size() > 6 && p.substr(p.size() - 6) == "-edges") p = p.substr(0, p.size() - 6);
      c.path_n = parse_count("path", p);
      if (c.path_n < 2) throw ConfigError("path needs N >= 2");
    }
    c.temps = parse_real_list(e.at("temps"));
    if (c.temps.size() != 2) throw ConfigError("temps must be 'T-,T+'");
    c.seed = parse_seed(e.at("seed"));
    c.replicas = parse_count("replicas", e.at("replicas"));
    if (c.replicas == 0) throw ConfigError("replicas must be positive");
    c.horizon = parse_real("horizon", e.at("horizon"));
    if (c.horizon < 0.0) throw ConfigError("horizon must be nonnegative");
    if (!e.at("events").empty()) c.events = parse_count("events", e.at("events"));
    if (!e.at("sample-times").empty()) c.sample_times = parse_real_list(e.at("sample-times"));
    for (double s : c.sample_times) {
      if (s < 0.0 || s > c.horizon) throw ConfigError("sample times must lie in [0, horizon]");
    }
    c.process = e.at("kind");
    if (!contains(process_kinds(), c.process)) throw ConfigError("unknown process kind '" + c.process + "'");
    if (!e.at("init").empty()) c.init = parse_real_list(e.at("init"));
    if (!e.at("perm").empty()) {
      for (auto v : parse_uint_list(e.at("perm"))) c.perm.push_back(static_cast<std::uint32_t>(v));
    }
    for (auto v : parse_uint_list(e.at("ns"))) c.ns.push_back(static_cast<std::size_t>(v));
    c.psi = e.at("psi");
    if (c.psi != "one" && c.psi != "identity") throw ConfigError("psi must be 'one' or 'identity'");
    c.times = parse_real_list(e.at("t"));
    if (c.times.empty()) throw ConfigError("t needs at least one time");
    for (double t : c.times) {
      if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("times must be finite and nonnegative");
    }
    if (!e.at("particles").empty()) {
      for (auto v : parse_uint_list(e.at("particles"))) c.particles.push_back(static_cast<VertexId>(v));
    }
    c.mode = e.at("mode");
    if (c.mode != "opinion" && c.mode != "continuous" && c.mode != "both") {
      throw ConfigError("mode must be opinion, continuous or both");
    }
    c.what = e.at("what");
    if (c.what != "opinion" && c.what != "energy" && c.what != "coupled") {
      throw ConfigError("what must be opinion, energy or coupled");
    }
    c.window = parse_real("window", e.at("window"));
    if (!(c.window > 0.0)) throw ConfigError("window must be positive");
    c.out_dir = e.at("out");
    c.assert_mode = parse_bool("assert", e.at("assert"));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& ex) {
    throw ConfigError(ex.what());
  }
  if (c.experiment == "simulate" && c.process == "modified-opinion" && c.path_n == 0) {
    throw ConfigError("modified-opinion needs a path graph");
  }
  if ((c.experiment == "exact-moments" || c.experiment == "hydrostatic") && c.path_n == 0 &&
      c.experiment == "exact-moments") {
    throw ConfigError("exact-moments needs --path");
  }
  if (c.experiment == "hydrostatic") {
    if (c.ns.empty()) throw ConfigError("ns must list at least one size");
    for (std::size_t k = 0; k < c.ns.size(); ++k) {
      if (c.ns[k] < 2 || (k > 0 && c.ns[k] <= c.ns[k - 1])) throw ConfigError("ns must be increasing and >= 2");
    }
    if (c.replicas < 2) throw ConfigError("hydrostatic needs at least two replicas");
  }
  return c;
}

Graph make_graph(const ExperimentConfig& c) {
  const TemperaturePolicy policy = policy_for(c);
  if (!c.graph_file.empty()) return load_graph(c.graph_file, policy);
  return path_graph(c.path_n, c.temps[0], c.temps[1], policy);
}

namespace {

struct Context {
  const ExperimentConfig& c;
  std::ostream& log;
  RunResult& result;

  fs::path file(const std::string& name) {
    fs::path p = c.out_dir / name;
    result.files.push_back(p);
    return p;
  }
  void check(bool ok, const std::string& what) {
    if (!ok) {
      result.passed = false;
      log << "FAILED: " << what << '\n';
    }
  }
};

struct SampleRow {
  double time;
  std::size_t index;
  const char* quantity;
  double value;
};

using Rows = std::vector<SampleRow>;

std::vector<double> sample_times_for(const ExperimentConfig& c) {
  if (!c.sample_times.empty()) return c.sample_times;
  if (c.horizon == 0.0) return {0.0};
  return {0.0, c.horizon};
}

template <class Config, class Step, class Emit>
Rows run_process(const ExperimentConfig& c, EventStream& s, Config init, Step step, Emit emit) {
  Rows rows;
  if (c.events) {
    emit(rows, 0.0, init);
    Config out = simulate_events(std::move(init), s, *c.events, step);
    emit(rows, s.cursor(), out);
    return rows;
  }
  const std::vector<double> times = sample_times_for(c);
  Trajectory<Config> traj;
  simulate(std::move(init), s, c.horizon, step, times, &traj);
  for (std::size_t k = 0; k < traj.times.size(); ++k) emit(rows, traj.times[k], traj.states[k]);
  return rows;
}

std::vector<double> vertex_init(const ExperimentConfig& c, const Graph& g, double interior_default) {
  std::vector<double> v(g.vertex_count(), interior_default);
  for (VertexId b : g.boundary()) v[b] = g.temperatures()[b];
  if (c.init.empty()) return v;
  if (c.init.size() != g.vertex_count()) throw ConfigError("init needs one value per vertex");
  for (double x : c.init) {
    if (x < 0.0) throw ConfigError("init values must be nonnegative");
  }
  return c.init;
}

ParticleConfig count_init(const ExperimentConfig& c, const Graph& g) {
  ParticleConfig k(g.vertex_count(), 0);
  for (VertexId v : g.interior()) k[v] = 1;
  if (c.init.empty()) return k;
  if (c.init.size() != g.vertex_count()) throw ConfigError("init needs one count per vertex");
  for (std::size_t v = 0; v < k.size(); ++v) {
    if (c.init[v] < 0.0 || c.init[v] != std::floor(c.init[v])) throw ConfigError("counts must be nonnegative integers");
    k[v] = static_cast<std::int64_t>(c.init[v]);
  }
  return k;
}

void emit_values(Rows& rows, double t, std::span<const double> v, const char* q) {
  for (std::size_t k = 0; k < v.size(); ++k) rows.push_back({t, k, q, v[k]});
}

void emit_counts(Rows& rows, double t, std::span<const std::int64_t> v, const char* q) {
  for (std::size_t k = 0; k < v.size(); ++k) rows.push_back({t, k, q, static_cast<double>(v[k])});
}

void run_simulate(Context& ctx, const Graph& g) {
  const auto& c = ctx.c;
  const double mid = 0.5 * (g.min_temperature() + g.max_temperature());
  const std::string& p = c.process;

  // Validate the initial configuration before any simulation.
  std::vector<double> real_init;
  ParticleConfig count0;
  EtaConfig eta0;
  if (p == "discrete" || p == "absorbed") {
    count0 = count_init(c, g);
  } else if (p == "eta") {
    eta0.assign(g.edge_count(), true);
    if (!c.init.empty()) {
      if (c.init.size() != g.edge_count()) throw ConfigError("eta init needs one 0/1 value per edge");
      for (std::size_t e = 0; e < eta0.size(); ++e) {
        if (c.init[e] != 0.0 && c.init[e] != 1.0) throw ConfigError("eta values must be 0 or 1");
        eta0[e] = c.init[e] == 1.0;
      }
    }
    try {
      require_legal_eta(eta0, g);
    } catch (const EtaError& ex) {
      throw ConfigError(ex.what());
    }
  } else if (p == "opinion" || p == "modified-opinion" || p == "joint") {
    real_init = vertex_init(c, g, mid);
    for (VertexId b : g.boundary()) {
      if (real_init[b] != g.temperatures()[b]) throw ConfigError("boundary opinions must equal T_j");
    }
  } else {
    real_init = vertex_init(c, g, 1.0);
  }

  const StreamOptions opts{p == "kmp-original"};
  auto rows = map_replicas(c.replicas, [&](std::size_t r) -> Rows {
    EventStream s(g, c.seed, substream(0, r), opts);
    if (p == "kmp") {
      return run_process(c, s, real_init, step_kmp,
                         [](Rows& o, double t, const EnergyConfig& z) { emit_values(o, t, z, "zeta"); });
    }
    if (p == "kmp-original") {
      return run_process(c, s, real_init, step_kmp_original,
                         [](Rows& o, double t, const EnergyConfig& z) { emit_values(o, t, z, "zeta"); });
    }
    if (p == "joint") {
      JointConfig j{std::vector<double>(g.vertex_count(), 1.0), real_init};
      return run_process(c, s, make_hidden_state(std::move(j)), step_hidden,
                         [](Rows& o, double t, const HiddenTemperatureState& h) {
                           emit_values(o, t, h.joint.x, "x");
                           emit_values(o, t, h.joint.t, "t");
                           emit_values(o, t, h.zeta, "zeta");
                         });
    }
    if (p == "opinion") {
      return run_process(c, s, real_init, step_opinion,
                         [](Rows& o, double t, const OpinionConfig& v) { emit_values(o, t, v, "opinion"); });
    }
    if (p == "modified-opinion") {
      const std::size_t n = c.path_n;
      auto step = [n](OpinionConfig& o, const MarkedEvent& ev, const Graph& gg) {
        step_modified_opinion(o, ev, gg, n);
      };
      return run_process(c, s, real_init, step,
                         [](Rows& o, double t, const OpinionConfig& v) { emit_values(o, t, v, "opinion"); });
    }
    if (p == "discrete" || p == "absorbed") {
      auto step = p == "discrete" ? step_discrete : step_absorbed;
      return run_process(c, s, count0, step,
                         [](Rows& o, double t, const ParticleConfig& k) { emit_counts(o, t, k, "count"); });
    }
    if (p == "eta") {
      return run_process(c, s, eta0, step_eta, [](Rows& o, double t, const EtaConfig& e) {
        for (std::size_t k = 0; k < e.size(); ++k) o.push_back({t, k, "eta", e[k] ? 1.0 : 0.0});
      });
    }
    Rng init_rng(c.seed, substream(1, r));
    return run_process(c, s, poissonize(real_init, init_rng), step_coupled,
                       [](Rows& o, double t, const PointedEnergyConfig& pc) {
                         emit_values(o, t, pc.zeta, "zeta");
                         emit_counts(o, t, pc.counts(), "count");
                       });
  });

  CsvWriter csv(ctx.file("simulate.csv"), {"replica", "time", "index", "quantity", "value"});
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto& row : rows[r]) csv.row(r, row.time, row.index, std::string(row.quantity), row.value);
  }
  ctx.result.summary["results"] = {{"process", p}, {"rows", [&] {
                                      std::size_t n = 0;
                                      for (const auto& v : rows) n += v.size();
                                      return n;
                                    }()}};
}

std::vector<double> cftp_sample(const Graph& g, std::uint64_t seed, std::uint64_t stream, double window) {
  EventStream s(g, seed, stream);
  CftpOptions opt;
  opt.initial_window = window;
  return sample_stationary_opinion(g, s, opt);
}

void run_stationary(Context& ctx, const Graph& g) {
  const auto& c = ctx.c;
  const std::size_t n = g.vertex_count();
  std::vector<std::vector<double>> values;
  std::vector<ParticleConfig> counts;
  if (c.what == "opinion") {
    values = map_replicas(c.replicas, [&](std::size_t r) { return cftp_sample(g, c.seed, substream(0, r), c.window); });
  } else {
    const double window = c.window;
    NuSampler nu = [&g, window](Rng& rng) { return cftp_sample(g, rng(), 0, window); };
    if (c.what == "energy") {
      values = map_replicas(c.replicas, [&](std::size_t r) {
        Rng rng(c.seed, substream(0, r));
        return sample_stationary_energy(g, nu, rng);
      });
    } else {
      auto pts = map_replicas(c.replicas, [&](std::size_t r) {
        Rng rng(c.seed, substream(0, r));
        return sample_coupled_stationary(g, nu, rng);
      });
      for (auto& pc : pts) {
        counts.push_back(pc.counts());
        values.push_back(std::move(pc.zeta));
      }
    }
  }

  if (c.what == "coupled") {
    CsvWriter csv(ctx.file("stationary-sample.csv"), {"replica", "vertex", "zeta", "count"});
    for (std::size_t r = 0; r < values.size(); ++r) {
      for (std::size_t v = 0; v < n; ++v) csv.row(r, v, values[r][v], counts[r][v]);
    }
  } else {
    CsvWriter csv(ctx.file("stationary-sample.csv"), {"replica", "vertex", "value"});
    for (std::size_t r = 0; r < values.size(); ++r) {
      for (std::size_t v = 0; v < n; ++v) csv.row(r, v, values[r][v]);
    }
  }

  MomentAccumulator acc(n);
  MomentAccumulator kacc(n);
  for (std::size_t r = 0; r < values.size(); ++r) {
    acc.add(values[r]);
    if (!counts.empty()) {
      std::vector<double> kv(counts[r].begin(), counts[r].end());
      kacc.add(kv);
    }
  }
  json means = json::array();
  const std::vector<double> profile =
      c.path_n ? mean_profile(c.path_n, c.temps[0], c.temps[1]) : std::vector<double>{};
  for (std::size_t v = 0; v < n; ++v) {
    json item = {{"vertex", v}, {"mean", acc.mean(v)}, {"se", acc.mean_se(v)}};
    if (!profile.empty()) {
      item["expected"] = profile[v];
      const bool boundary = g.is_boundary(static_cast<VertexId>(v));
      if (c.replicas >= 2 && !(boundary && c.what == "opinion")) {
        const double se = acc.mean_se(v);
        ctx.check(std::abs(acc.mean(v) - profile[v]) <= 3.0 * se + 1e-12,
                  "mean at vertex " + std::to_string(v) + " outside 3 sigma of the linear profile");
        if (!counts.empty()) {
          ctx.check(std::abs(kacc.mean(v) - profile[v]) <= 3.0 * kacc.mean_se(v) + 1e-12,
                    "mean count at vertex " + std::to_string(v) + " outside 3 sigma");
        }
      }
    }
    means.push_back(item);
  }
  ctx.result.summary["results"] = {{"what", c.what}, {"means", means}};
}

void run_perfect_eta(Context& ctx, const Graph& g) {
  const auto& c = ctx.c;
  if (!c.perm.empty()) {
    EtaConfig eta;
    try {
      eta = perfect_sim_eta(g, order_from_ranks(c.perm));
    } catch (const EtaError& ex) {
      throw ConfigError(ex.what());
    }
    CsvWriter csv(ctx.file("perfect-sim-eta.csv"), {"edge", "eta"});
    std::string line;
    for (std::size_t e = 0; e < eta.size(); ++e) {
      csv.row(e + 1, eta[e] ? 1 : 0);
      line += (e ? "," : "") + std::string(eta[e] ? "1" : "0");
    }
    ctx.log << line << '\n';
    ctx.result.summary["results"] = {{"eta", line}};
    return;
  }
  auto etas = map_replicas(c.replicas, [&](std::size_t r) {
    Rng rng(c.seed, substream(0, r));
    return perfect_sim_eta_random(g, rng);
  });
  CsvWriter csv(ctx.file("perfect-sim-eta.csv"), {"edge", "neighbors", "p_zero", "se", "expected"});
  const double rr = static_cast<double>(c.replicas);
  json rows = json::array();
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    double zeros = 0.0;
    for (const auto& eta : etas) zeros += eta[e] ? 0.0 : 1.0;
    const double p = zeros / rr;
    const double expect = edge_marginal_stationary(g, e);
    const double se = std::sqrt(expect * (1.0 - expect) / rr);
    csv.row(e + 1, edge_neighbor_count(g, e), p, se, expect);
    ctx.check(std::abs(p - expect) <= 3.0 * se, "edge " + std::to_string(e + 1) + " marginal outside 3 sigma");
    rows.push_back({{"edge", e + 1}, {"p_zero", p}, {"expected", expect}});
  }
  ctx.result.summary["results"] = {{"marginals", rows}};
}

void run_exact(Context& ctx) {
  const auto& c = ctx.c;
  const std::size_t n = c.path_n;
  const double tm = c.temps[0];
  const double tp = c.temps[1];
  const MomentTable m = solve_second_moments(n, tm, tp);
  const Eigen::MatrixXd cov = m.covariance();
  const MomentTable mt = tilde_moments(n, tm, tp);
  const Eigen::MatrixXd ct = tilde_correlations(n, tm, tp);
  const double residual = second_moment_residual(assemble_second_moment_system(n, tm, tp), m);

  CsvWriter means(ctx.file("exact-means.csv"), {"k", "m"});
  for (std::size_t k = 0; k <= n; ++k) means.row(k, m.first[k]);
  CsvWriter csv(ctx.file("exact-moments.csv"), {"k", "l", "M", "C", "M_tilde", "C_tilde"});
  double worst = -1e300;
  for (Eigen::Index k = 0; k <= static_cast<Eigen::Index>(n); ++k) {
    for (Eigen::Index l = k; l <= static_cast<Eigen::Index>(n); ++l) {
      csv.row(static_cast<std::size_t>(k), static_cast<std::size_t>(l), m.second(k, l), cov(k, l),
              mt.second(k, l), ct(k, l));
      worst = std::max(worst, cov(k, l) - ct(k, l));
    }
  }
  ctx.check(worst <= 1e-12, "solved covariance exceeds the modified-model bound");
  ctx.check(residual < 1e-10, "solver residual too large");
  ctx.result.summary["results"] = {{"residual", residual}, {"max_C_minus_C_tilde", worst}};
}

void run_duality(Context& ctx, const Graph& g) {
  const auto& c = ctx.c;
  const auto interior = g.interior();
  if (interior.empty()) throw ConfigError("duality check needs an interior vertex");
  std::vector<double> o(g.vertex_count());
  for (VertexId b : g.boundary()) o[b] = g.temperatures()[b];
  const double lo = g.min_temperature();
  const double hi = g.max_temperature();
  for (std::size_t k = 0; k < interior.size(); ++k) {
    o[interior[k]] = lo + (hi - lo) * static_cast<double>(k + 1) / static_cast<double>(interior.size() + 1);
  }
  if (!c.init.empty()) {
    if (c.init.size() != g.vertex_count()) throw ConfigError("init needs one value per vertex");
    o = c.init;
  }
  ParticleConfig k(g.vertex_count(), 0);
  std::vector<VertexId> parts = c.particles;
  if (parts.empty()) parts = {interior.front(), interior.back()};
  for (VertexId v : parts) {
    if (v >= g.vertex_count()) throw ConfigError("particle at unknown vertex");
    ++k[v];
  }
  if (c.replicas < 2) throw ConfigError("duality check needs at least two replicas");

  CsvWriter csv(ctx.file("duality-check.csv"), {"mode", "t", "lhs", "lhs_se", "rhs", "rhs_se", "pass"});
  json rows = json::array();
  auto record = [&](const char* mode, double t, const DualityReport& rep) {
    csv.row(std::string(mode), t, rep.lhs.mean, rep.lhs.se, rep.rhs.mean, rep.rhs.se, rep.pass ? 1 : 0);
    rows.push_back({{"mode", mode}, {"t", t}, {"lhs", rep.lhs.mean}, {"rhs", rep.rhs.mean}, {"pass", rep.pass}});
    ctx.check(rep.pass, std::string(mode) + " duality at t=" + format_real(t));
  };
  for (double t : c.times) {
    if (c.mode != "continuous") record("opinion", t, duality_check_opinion(g, o, k, t, c.replicas, c.seed));
    if (c.mode != "opinion") record("continuous", t, duality_check_continuous(g, o, k, t, c.replicas, c.seed));
  }
  ctx.result.summary["results"] = {{"checks", rows}};
}

void run_hydrostatic(Context& ctx) {
  const auto& c = ctx.c;
  auto psi = [&](std::size_t n) { return c.psi == "one" ? psi_one(n) : psi_identity(n); };
  const auto rows = hydrostatic_experiment(c.ns, c.replicas, psi, c.temps[0], c.temps[1], c.seed);
  CsvWriter csv(ctx.file("hydrostatic.csv"),
                {"N", "mean", "mean_se", "expected", "variance", "variance_se", "bound", "exact_variance"});
  json out = json::array();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    csv.row(r.n, r.mean, r.mean_se, r.expected, r.variance, r.variance_se, r.bound, r.exact_variance);
    out.push_back({{"N", r.n}, {"mean", r.mean}, {"variance", r.variance}, {"bound", r.bound}});
    ctx.check(std::abs(r.mean - r.expected) <= 3.0 * r.mean_se + 1e-12,
              "mean for N=" + std::to_string(r.n) + " outside 3 sigma");
    ctx.check(r.exact_variance <= r.bound + 1e-12, "solved variance for N=" + std::to_string(r.n) + " above the bound");
    ctx.check(r.variance <= r.bound + 3.0 * r.variance_se,
              "sample variance for N=" + std::to_string(r.n) + " significantly above the bound");
    if (k > 0) {
      ctx.check(r.variance < rows[k - 1].variance || (r.variance == 0.0 && rows[k - 1].variance == 0.0),
                "variance not decreasing at N=" + std::to_string(r.n));
    }
  }
  ctx.result.summary["results"] = {{"rows", out}};
}

void run_independence(Context& ctx, const Graph& g) {
  const auto& c = ctx.c;
  const auto r = independence_experiment(g, c.times.front(), c.replicas, c.seed, g.min_temperature(),
                                         g.max_temperature());
  CsvWriter csv(ctx.file("independence.csv"), {"check", "vertex", "value", "threshold", "ok"});
  for (std::size_t k = 0; k < r.vertices.size(); ++k) {
    csv.row(std::string("correlation"), r.vertices[k], r.correlations[k], r.band,
            std::abs(r.correlations[k]) <= r.band ? 1 : 0);
  }
  const double ks_crit = 1.628 / std::sqrt(static_cast<double>(c.replicas) / 2.0);
  for (std::size_t k = 0; k < r.vertices.size(); ++k) {
    csv.row(std::string("ks_t_vs_opinion"), r.vertices[k], r.ks_d[k], ks_crit, r.ks_reject_01[k] ? 0 : 1);
  }
  for (std::size_t k = 0; k < r.vertices.size(); ++k) {
    csv.row(std::string("control_correlation"), r.vertices[k], r.control_correlations[k], r.band,
            std::abs(r.control_correlations[k]) > r.band ? 1 : 0);
  }
  ctx.check(r.independent, "correlation outside the 3 sigma band");
  for (std::size_t k = 0; k < r.vertices.size(); ++k) {
    ctx.check(!r.ks_reject_01[k], "KS rejects T vs O at vertex " + std::to_string(r.vertices[k]));
  }
  ctx.check(r.control_detected, "negative control not detected");
  ctx.result.summary["results"] = {{"independent", r.independent}, {"control_detected", r.control_detected}};
}

void run_coupling(Context& ctx, const Graph& g) {
  const auto& c = ctx.c;
  const auto r = coupling_experiment(g, c.times.front(), c.replicas, c.seed);
  CsvWriter csv(ctx.file("coupling-check.csv"), {"comparison", "vertex", "p_value"});
  for (std::size_t k = 0; k < r.vertices.size(); ++k) {
    csv.row(std::string("coupled_vs_direct"), r.vertices[k], r.p_coupled_vs_direct[k]);
    csv.row(std::string("counts_vs_points"), r.vertices[k], r.p_counts_vs_points[k]);
  }
  ctx.check(r.agree, "coupled and direct count laws differ at level 0.01");
  ctx.result.summary["results"] = {{"agree", r.agree}};
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& c, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  std::error_code ec;
  fs::create_directories(c.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + c.out_dir.string() + ": " + ec.message());

  Context ctx{c, log, result};
  const std::string& e = c.experiment;
  if (e == "exact-moments") {
    run_exact(ctx);
  } else if (e == "hydrostatic") {
    run_hydrostatic(ctx);
  } else {
    Graph g;
    try {
      g = make_graph(c);
    } catch (const GraphError& ex) {
      throw ConfigError(ex.what());
    }
    if (e == "simulate") {
      run_simulate(ctx, g);
    } else if (e == "stationary-sample") {
      run_stationary(ctx, g);
    } else if (e == "perfect-sim-eta") {
      run_perfect_eta(ctx, g);
    } else if (e == "duality-check") {
      run_duality(ctx, g);
    } else if (e == "independence") {
      run_independence(ctx, g);
    } else {
      run_coupling(ctx, g);
    }
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json outputs = json::array();
  for (const auto& f : result.files) outputs.push_back(f.filename().string());
  result.summary["experiment"] = e;
  result.summary["version"] = KMPLAB_VERSION;
  result.summary["seed"] = c.seed;
  result.summary["wall_time_s"] = wall;
  result.summary["config"] = c.effective;
  result.summary["outputs"] = outputs;
  result.summary["passed"] = result.passed;

  const fs::path summary_path = c.out_dir / (e + ".json");
  std::ofstream js(summary_path);
  if (!js) throw IoError("cannot write " + summary_path.string());
  js << result.summary.dump(2) << '\n';
  result.files.push_back(summary_path);

  log << e << ": " << (result.passed ? "ok" : "statistical check failed") << " (" << format_real(wall)
      << " s)\n";
  result.exit_code = (c.assert_mode && !result.passed) ? 2 : 0;
  return result;
}

IndependenceOutcome independence_experiment(const Graph& g, double t, std::size_t replicas,
                                            std::uint64_t seed, double t_lo, double t_hi) {
  if (replicas < 30) throw std::invalid_argument("independence experiment needs at least 30 replicas");
  struct Pair {
    std::vector<double> x, t, o;
  };
  auto draw_temps = [&](Rng& rng) {
    std::vector<double> temps(g.vertex_count());
    for (std::size_t v = 0; v < temps.size(); ++v) {
      temps[v] = g.is_boundary(static_cast<VertexId>(v)) ? g.temperatures()[v] : t_lo + (t_hi - t_lo) * rng.uniform();
    }
    return temps;
  };
  auto runs = map_replicas(replicas, [&](std::size_t r) {
    Rng init(seed, substream(0, r));
    JointConfig j;
    j.x.resize(g.vertex_count());
    for (double& x : j.x) x = init.exponential();
    j.t = draw_temps(init);
    EventStream s(g, seed, substream(1, r));
    j = simulate(std::move(j), s, t, step_joint);

    Rng oinit(seed, substream(2, r));
    EventStream so(g, seed, substream(3, r));
    OpinionConfig o = simulate(draw_temps(oinit), so, t, step_opinion);
    return Pair{std::move(j.x), std::move(j.t), std::move(o)};
  });

  std::vector<std::vector<double>> xs;
  std::vector<std::vector<double>> ts;
  for (auto& p : runs) {
    xs.push_back(p.x);
    ts.push_back(p.t);
  }
  const std::vector<VertexId> verts(g.interior().begin(), g.interior().end());
  IndependenceOutcome out;
  const IndependenceReport rep = independence_report(xs, ts, verts);
  out.vertices = rep.vertices;
  out.correlations = rep.correlations;
  out.band = rep.band;
  out.independent = rep.consistent;
  for (VertexId v : verts) {
    std::vector<double> a;
    std::vector<double> b;
    for (const auto& p : runs) {
      a.push_back(p.t[v]);
      b.push_back(p.o[v]);
    }
    const KsResult ks = ks_two_sample(std::move(a), std::move(b));
    out.ks_d.push_back(ks.d);
    out.ks_reject_01.push_back(ks.reject_01);
  }

  // T = X at time zero must be flagged.
  std::vector<std::vector<double>> xc;
  for (std::size_t r = 0; r < replicas; ++r) {
    Rng init(seed, substream(4, r));
    std::vector<double> x(g.vertex_count());
    for (double& v : x) v = init.exponential();
    xc.push_back(std::move(x));
  }
  const IndependenceReport ctl = independence_report(xc, xc, verts);
  out.control_correlations = ctl.correlations;
  out.control_detected = !ctl.consistent;
  for (double cc : ctl.correlations) out.control_detected = out.control_detected && std::abs(cc) > ctl.band;
  return out;
}

CouplingOutcome coupling_experiment(const Graph& g, double t, std::size_t replicas, std::uint64_t seed) {
  const std::size_t n = g.vertex_count();
  PointedEnergyConfig start;
  start.zeta.assign(n, 1.0);
  for (VertexId b : g.boundary()) start.zeta[b] = g.temperatures()[b];
  start.kappa.resize(n);
  for (std::size_t v = 0; v < n; ++v) start.kappa[v] = {start.zeta[v] / 3.0, 2.0 * start.zeta[v] / 3.0};
  const ParticleConfig k0 = start.counts();
  const CoupledCounts cstart{start.zeta, k0};

  struct Triple {
    ParticleConfig points, counts, direct;
  };
  auto runs = map_replicas(replicas, [&](std::size_t r) {
    EventStream s1(g, seed, substream(1, r));
    EventStream s2(g, seed, substream(2, r));
    EventStream s3(g, seed, substream(3, r));
    Triple out;
    out.points = simulate(start, s1, t, step_coupled).counts();
    out.counts = simulate(cstart, s3, t, step_coupled_counts).k;
    out.direct = simulate(k0, s2, t, step_discrete);
    return out;
  });

  CouplingOutcome out;
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<std::int64_t> a;
    std::vector<std::int64_t> b;
    std::vector<std::int64_t> cc;
    std::int64_t top = 0;
    for (const auto& r : runs) {
      a.push_back(r.points[v]);
      b.push_back(r.direct[v]);
      cc.push_back(r.counts[v]);
      top = std::max({top, r.points[v], r.direct[v], r.counts[v]});
    }
    const auto bins = static_cast<std::size_t>(top) + 1;
    const auto ha = count_histogram(a, bins);
    const auto hb = count_histogram(b, bins);
    const auto hc = count_histogram(cc, bins);
    const ChiSquareResult direct = chi_square_two_sample(ha, hb);
    const ChiSquareResult modes = chi_square_two_sample(ha, hc);
    out.vertices.push_back(static_cast<VertexId>(v));
    out.p_coupled_vs_direct.push_back(direct.p_value);
    out.p_counts_vs_points.push_back(modes.p_value);
    if (direct.reject_01 || modes.reject_01) out.agree = false;
  }
  return out;
}

}  // namespace kmplab::cli
