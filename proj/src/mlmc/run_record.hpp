#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace mlmc {

struct IterationTrace {
  int index = 0;         // -1 for the initial hierarchy
  double tol_i = 0.0;
  int L = 0;             // finest level index
  double theta = 0.0;
  double qw_theta = 0.0; // weak constant used for theta (worst case for CMLMC)
  std::vector<std::int64_t> M;      // allocation targets
  std::vector<std::int64_t> M_bar;  // estimator sample counts
  std::vector<double> V;            // variances used in the error estimate
  double q1 = 0.0, q2 = 0.0, qw = 0.0, qw_star = 0.0, qw_sd = 0.0, qs = 0.0;
  bool rate_warning = false;
  double estimate = 0.0;
  double bias = 0.0;
  double stat_error = 0.0;
  double error_estimate = 0.0;
  double model_work = 0.0;  // work of samples drawn in this iteration
  double measured_cost = 0.0;
};

struct LevelSummary {
  int level = 0;
  std::int64_t count = 0;
  double mean = 0.0;
  double variance = 0.0;
};

struct RunRecord {
  std::string algorithm;
  std::string sampler;
  std::string status = "ok";  // an error code name on failure
  std::string message;
  std::uint64_t seed = 0;
  double tol = 0.0;
  double estimate = 0.0;
  double error_estimate = 0.0;
  double estimator_variance = 0.0;
  double bias = 0.0;
  int final_L = 0;
  double theta_final = 0.0;
  std::vector<IterationTrace> iterations;
  std::vector<LevelSummary> levels;
  double total_model_work = 0.0;
  double total_measured_cost = 0.0;  // seconds; excluded from determinism
  bool ok() const { return status == "ok"; }
};

// The "timing" object carries every wall-clock quantity; it is omitted when
// include_timing is false so the payload is reproducible.
nlohmann::json to_json(const RunRecord& r, bool include_timing = true);
RunRecord record_from_json(const nlohmann::json& j);

}  // namespace mlmc
