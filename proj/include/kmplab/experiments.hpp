#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kmplab/graph.hpp"

namespace kmplab::cli {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Experiment kinds accepted by `run`.
const std::vector<std::string>& experiment_kinds();
/// Process kinds accepted by `run simulate --kind`.
const std::vector<std::string>& process_kinds();
/// Every key accepted in a config file or as a --flag.
const std::vector<std::string>& config_keys();

/// Fully validated experiment settings.
struct ExperimentConfig {
  std::string experiment;
  std::map<std::string, std::string> effective;  // after defaults, for provenance

  std::size_t path_n = 0;  // 0 when `graph_file` is used
  std::vector<double> temps;
  std::filesystem::path graph_file;
  std::uint64_t seed = 1;
  std::size_t replicas = 1;
  double horizon = 0.0;
  std::optional<std::size_t> events;
  std::vector<double> sample_times;
  std::string process;
  std::vector<double> init;
  std::vector<std::uint32_t> perm;
  std::vector<std::size_t> ns;
  std::string psi;
  std::vector<double> times;
  std::vector<VertexId> particles;
  std::string mode;
  std::string what;
  double window = 1.0;
  std::filesystem::path out_dir;
  bool assert_mode = false;
};

/// Validates raw key/value settings (from a config file merged with flags),
/// fills defaults and rejects unknown keys. Throws ConfigError.
ExperimentConfig make_config(const std::map<std::string, std::string>& raw);

struct RunResult {
  int exit_code = 0;
  bool passed = true;
  std::vector<std::filesystem::path> files;
  nlohmann::json summary;
};

/// Runs the experiment, writing CSV data and a JSON summary into out_dir.
/// Exit code 2 when assert_mode is set and a statistical check failed.
RunResult run_experiment(const ExperimentConfig& config, std::ostream& log);

/// Builds the experiment graph (path or file).
Graph make_graph(const ExperimentConfig& config);

struct IndependenceOutcome {
  std::vector<VertexId> vertices;
  std::vector<double> correlations;
  double band = 0.0;
  bool independent = true;
  std::vector<double> ks_d;
  std::vector<bool> ks_reject_01;
  std::vector<double> control_correlations;
  bool control_detected = false;
};

/// Joint process from X(0) iid Exp(1), interior T(0) iid Uniform(t_lo, t_hi),
/// run to time t; correlation check of (X, T), two-sample KS of T_v against an
/// independent opinion run, and a T = X negative control at time 0.
IndependenceOutcome independence_experiment(const Graph& g, double t, std::size_t replicas,
                                            std::uint64_t seed, double t_lo, double t_hi);

struct CouplingOutcome {
  std::vector<VertexId> vertices;
  std::vector<double> p_coupled_vs_direct;
  std::vector<double> p_counts_vs_points;
  bool agree = true;
};

/// K(t) from the materialized coupling, from the counts-only coupling and
/// from direct discrete KMP, all started from two points per vertex; per-vertex
/// two-sample chi-square at level 0.01.
CouplingOutcome coupling_experiment(const Graph& g, double t, std::size_t replicas, std::uint64_t seed);

}  // namespace kmplab::cli
