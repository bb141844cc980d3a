#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "kmplab/experiments.hpp"
#include "kmplab/io.hpp"

namespace {

struct FlagSpec {
  const char* key;
  const char* help;
};

const FlagSpec kFlags[] = {
    {"path", "path graph size N (or 'N-edges')"},
    {"temps", "boundary temperatures T-,T+"},
    {"graph", "graph description file"},
    {"seed", "master seed (decimal or 0x hex)"},
    {"replicas", "independent replicas"},
    {"horizon", "simulated time"},
    {"events", "event count instead of a horizon"},
    {"sample-times", "comma-separated sampling times"},
    {"kind", "process for simulate"},
    {"init", "initial configuration, comma-separated"},
    {"perm", "edge ranks for perfect-sim-eta"},
    {"ns", "sizes for hydrostatic"},
    {"psi", "test function for hydrostatic: one | identity"},
    {"t", "time(s) for duality, independence, coupling"},
    {"particles", "dual particle positions"},
    {"mode", "duality mode: opinion | continuous | both"},
    {"what", "stationary-sample target: opinion | energy | coupled"},
    {"window", "initial CFTP window"},
    {"out", "output directory (default $KMPLAB_OUT_DIR or .)"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-driven KMP simulation lab"};
  app.require_subcommand(1);
  auto* run = app.add_subcommand("run", "run an experiment");

  std::string experiment;
  std::string config_file;
  bool assert_flag = false;
  std::map<std::string, std::string> flags;
  std::map<std::string, CLI::Option*> opts;

  run->add_option("experiment", experiment, "experiment kind")
      ->required()
      ->check(CLI::IsMember(kmplab::cli::experiment_kinds()));
  run->add_option("--config", config_file, "key = value config file");
  run->add_flag("--assert", assert_flag, "exit 2 when a statistical check fails");
  for (const auto& f : kFlags) opts[f.key] = run->add_option(std::string("--") + f.key, flags[f.key], f.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    std::map<std::string, std::string> raw;
    if (!config_file.empty()) raw = kmplab::load_key_values(config_file);
    for (const auto& [key, opt] : opts) {
      if (opt->count() > 0) raw[key] = flags[key];
    }
    if (assert_flag) raw["assert"] = "true";
    const auto file_exp = raw.find("experiment");
    if (file_exp != raw.end() && file_exp->second != experiment) {
      throw kmplab::cli::ConfigError("config file names experiment '" + file_exp->second + "'");
    }
    raw["experiment"] = experiment;
    const auto config = kmplab::cli::make_config(raw);
    return kmplab::cli::run_experiment(config, std::cout).exit_code;
  } catch (const std::exception& e) {
    std::cerr << "kmplab: " << e.what() << '\n';
    return 1;
  }
}
