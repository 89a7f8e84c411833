#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "mlmc/cmlmc.hpp"
#include "mlmc/diagnostics.hpp"
#include "mlmc/run_record.hpp"
#include "mlmc/smlmc.hpp"

namespace mlmc {

struct EmitFlags {
  bool records = true;
  bool errors = true;
  bool work = true;
  bool theta = true;
  bool levels = true;
  bool qq = true;
};

struct ExperimentConfig {
  nlohmann::json sampler;  // {"name", "params"}
  std::string label;       // variant name used by compare
  std::string preset;      // "sde" or "pde" for cmlmc defaults
  std::variant<ContinuationConfig, StandardConfig> algorithm;
  std::vector<double> tolerances;
  int repetitions = 1;
  std::uint64_t base_seed = 0;
  std::string output_dir = "out";
  std::optional<double> reference;
  EmitFlags emit;

  bool is_cmlmc() const { return std::holds_alternative<ContinuationConfig>(algorithm); }
  const char* algorithm_name() const { return is_cmlmc() ? "cmlmc" : "smlmc"; }
  void set_reuse(bool reuse);
};

// Strict parse: unknown keys and type errors raise Error(config) whose message
// starts with the JSON pointer of the offending field.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
// Normalised form with every default written out.
nlohmann::json config_to_json(const ExperimentConfig& cfg);

// FNV-1a 64 of the normalised config serialisation, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

struct RunOptions {
  std::optional<std::string> out_dir;
  int threads = 1;
  std::optional<std::uint64_t> seed;   // overrides base_seed
  std::optional<bool> reuse_samples;   // overrides the algorithm flag
  bool write = true;
};

struct ExperimentResult {
  nlohmann::json manifest;
  std::vector<std::vector<RunRecord>> records;  // [tolerance][repetition]
  std::vector<EnsembleSummary> summaries;
  std::optional<ComplexityFit> complexity;
  double reference = 0.0;
  bool has_reference = false;
  int failed_runs = 0;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {});

// Runs one algorithm instance for a single tolerance.
RunRecord run_single(const CoupledSampler& sampler, const ExperimentConfig& cfg, double tol,
                     std::uint64_t seed, int threads = 1);

// Joins manifests on the tolerance grid; work columns are normalised by the
// baseline median (first cmlmc manifest, else the first manifest).
nlohmann::json compare_manifests(const std::vector<std::string>& manifest_paths,
                                 const std::optional<std::string>& out_dir);

// Recomputes summaries and tables from the run records a manifest lists.
nlohmann::json diagnose_manifest(const std::string& manifest_path,
                                 const std::optional<std::string>& out_dir);

// Shortest round-trip decimal form.
std::string format_double(double x);

}  // namespace mlmc
