#pragma once

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>
#include <vector>

#include "proxflow/solvers.hpp"

namespace proxflow {
namespace bench {

struct GeneratorSpec {
  std::string kind;  ///< gaussian | product | tomo
  std::size_t n = 0, p = 0, rank = 0;
  double sparsity = 0.1;
  double noise_variance = 0.0;
  int size = 0;        ///< tomo: image side
  int angles = 0;      ///< tomo: projection count
  double noise_percent = 1.0;
};

struct FilesSpec {
  std::string a_path;
  std::string y_path;
};

struct SolverSpec {
  std::string name;
  std::string label;  ///< trace file stem; defaults to the solver name
  SolverOptions options;
  Budget budget;
};

struct ExperimentConfig {
  static constexpr int kSchemaVersion = 1;
  std::uint64_t seed = 0;
  double lambda = 1.0;
  std::optional<GeneratorSpec> generator;
  std::optional<FilesSpec> files;
  Penalty penalty{SeparableL1{}};
  std::vector<SolverSpec> solvers;
  std::string output_dir = ".";
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

/// Stable 64-bit FNV-1a hash of the canonical config serialization.
std::string config_hash(const ExperimentConfig& cfg);

Problem build_problem(const ExperimentConfig& cfg);

/// Runs every configured solver (optionally concurrently, one thread per
/// solver) and writes one trace CSV per solver; returns the written paths.
std::vector<std::string> run_experiment(const ExperimentConfig& cfg, bool parallel = false);

/// Objective-gap-vs-wall-clock comparison plot; the gap baseline is the
/// minimum objective across all input traces and is stated in the title.
void plot_svg(const std::vector<Trace>& traces, std::ostream& os);

/// CLI entry point (subcommands: gen, run, plot). Returns the process exit
/// code: 0 on success, 2 on configuration/usage errors.
int run_cli(int argc, const char* const* argv);

}  // namespace bench
}  // namespace proxflow
