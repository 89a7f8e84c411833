#pragma once

#include <span>
#include <vector>

#include "mlmc/hierarchy.hpp"
#include "mlmc/level_stats.hpp"

namespace mlmc {

// Gaussian prior on x0 = log q1 and x1 = log(2 q1 - q2).
struct RatePrior {
  double x0_hat = 0.0;
  double x1_hat = 0.0;
  double sigma0 = 1.0;
  double sigma1 = 1.0;

  void validate() const;

  static RatePrior from_rates(double q1, double q2, double sigma0 = 1.0, double sigma1 = 1.0);
};

// Normal-gamma prior weights for the per-level variance posterior.
struct VariancePriorConfig {
  double kappa0 = 0.1;
  double kappa1 = 0.1;

  void validate() const;
};

// Posterior variance estimate for level >= 1. Prior guesses are
// mu = qw w_l(q1) and lambda = s_l(q2)/qs taken from params. With no samples
// this is qs/s_l(q2) exactly.
double variance_posterior(const LevelStats& stats, const ModelParams& params,
                          const VariancePriorConfig& cfg, const MeshHierarchy& hier, int level);

struct QwQsFit {
  double qw = 0.0;
  double qs = 0.0;
  double qs_raw = 0.0;  // before the floor
  bool floored = false;
};

// Weighted least squares over levels l0..L (stats indexed by level).
// Throws calibration_unavailable when no level in range has samples.
QwQsFit fit_qw_qs(std::span<const LevelStats> stats, const MeshHierarchy& hier, double q1,
                  double q2, int l0, int L);

// sqrt(qs / sum_l M_l w_l(q1)^2 s_l(q2)).
double qw_posterior_sd(std::span<const LevelStats> stats, const MeshHierarchy& hier, double q1,
                       double q2, double qs, int l0, int L);

// qw + sign(qw) c_alpha sd, sign(0) = +1.
double qw_worst_case(double qw_star, double sd, double c_alpha);

// Profiled Gaussian log-likelihood in (q1, q2) including the q2-dependent
// normalisation, plus the log prior. Invalid points (q2 <= 0) get a large
// negative value that grows with the violation.
double rate_log_posterior(double x0, double x1, std::span<const LevelStats> stats,
                          const MeshHierarchy& hier, const RatePrior& prior, int l0, int L);

struct RateFit {
  double q1 = 1.0;
  double q2 = 1.0;
  bool warning = false;     // optimizer did not converge; prior mode returned
  bool prior_only = false;  // no data on levels >= 1
  int evals = 0;
};

RateFit fit_rates(std::span<const LevelStats> stats, const MeshHierarchy& hier,
                  const RatePrior& prior, int L);

struct Calibration {
  ModelParams params;  // params.qw is the worst-case weak constant
  double qw_star = 0.0;
  double qw_sd = 0.0;
  bool qs_floored = false;
  bool rate_warning = false;
};

// Full parameter update over the levels present in stats (0..size-1).
// Levels without samples receive the model variance qs/s_l(q2).
Calibration calibrate(std::span<const LevelStats> stats, const MeshHierarchy& hier,
                      const RatePrior& prior, const VariancePriorConfig& vprior, double c_alpha,
                      int frak_L);

// qs/s_l(q2): the zero-sample posterior, used for levels beyond the data.
double model_variance(const ModelParams& params, const MeshHierarchy& hier, int level);

}  // namespace mlmc
