#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mlmc/calibration.hpp"
#include "mlmc/hierarchy.hpp"
#include "mlmc/run_record.hpp"
#include "mlmc/sampler.hpp"

namespace mlmc {

struct InitialLevel {
  double h = 1.0;
  std::int64_t M = 10;
};

struct ContinuationConfig {
  double tol = 0.01;
  double tol_max = 0.1;
  double r1 = 2.0;
  double r2 = 1.1;
  double c_alpha = 2.0;
  int L_inc = 2;
  int frak_L = 5;
  int L_max_abs = 20;
  int max_iterations = 50;
  double theta_min = 0.01;
  bool reuse_samples = false;
  std::vector<InitialLevel> initial_hierarchy;  // empty: first 3 levels, 10 samples each
  std::optional<RatePrior> rate_prior;          // empty: the sampler's default prior
  VariancePriorConfig var_prior;

  void validate() const;

  static ContinuationConfig sde_defaults();
  static ContinuationConfig pde_defaults();
};

// floor((-log tol + log r2 + log tol_max)/log r1), at least 0.
int schedule_iE(double tol, double tol_max, double r1, double r2);

// r1^(iE-i) tol/r2 before iE, r2^(iE-i) tol/r2 from iE on.
double iteration_tolerance(int i, int iE, double tol, double r1, double r2);

struct LevelChoice {
  int L = 0;
  double theta = 0.0;
  double predicted_work = 0.0;
};

// Exhaustive search over [L_lo, L_lo + L_inc] (capped at max_level) for the
// minimum predicted work, skipping theta < theta_min. Levels without a
// variance in params.v get qs/s_l(q2). Throws tolerance_unreachable when no
// candidate is feasible.
LevelChoice select_num_levels(double tol_i, const ModelParams& params, const MeshHierarchy& hier,
                              int L_prev, double c_alpha, int L_inc, double theta_min,
                              int max_level);

// Runs the continuation algorithm. Failures after validation are recorded
// in the returned record's status rather than thrown.
RunRecord run_cmlmc(const CoupledSampler& sampler, const ContinuationConfig& cfg,
                    std::uint64_t seed, int threads = 1);

}  // namespace mlmc
