#pragma once

#include <span>
#include <vector>

#include "mlmc/hierarchy.hpp"
#include "mlmc/level_stats.hpp"
#include "mlmc/run_record.hpp"

namespace mlmc {

struct Percentiles {
  double p5 = 0.0, p50 = 0.0, p95 = 0.0;
};

// Linear interpolation between order statistics (position p (n-1)).
double percentile(std::vector<double> values, double p);
Percentiles work_percentiles(std::span<const double> works);

struct EnsembleSummary {
  double tol = 0.0;
  int runs = 0;       // successful runs used
  int failed = 0;     // excluded runs
  std::vector<double> errors;          // estimate - reference
  std::vector<double> error_estimates;
  std::vector<double> works;           // model work
  std::vector<double> costs;           // measured cost
  Percentiles work;
  double exceed_fraction = 0.0;        // |error| > tol
  double ks_statistic = 0.0;
  int ks_excluded = 0;
};

EnsembleSummary confidence_table(std::span<const RunRecord> records, double reference, double tol);

struct ComplexityFit {
  double s1_hat = 0.0;
  double s2 = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of the fit
};

// Least squares of log(work) - s2 log|log tol| = c + s1 (-log tol).
ComplexityFit complexity_fit(std::span<const double> tols, std::span<const double> works, double s2);

struct NormalityResult {
  double ks_statistic = 0.0;
  std::vector<double> sorted;  // normalised errors, ascending
  int excluded = 0;            // records with zero estimated variance
  bool degenerate = false;     // all values identical
};

// sup |F_n - Phi| of the sample.
double ks_statistic_normal(std::vector<double> values);

// e = (A - reference)/sqrt(Var[A]) per successful record.
NormalityResult normality_check(std::span<const RunRecord> records, double reference);

struct LevelAccuracy {
  int level = 0;
  std::int64_t count = 0;
  double variance_rel_error2 = 0.0;  // squared relative error of the sample variance
  double kurtosis = 0.0;             // m4 / V^2
  double qw_factor = 0.0;            // beta^(l (2 q1 - q2)) / M
};

// Levels with fewer than 4 samples raise insufficient_samples.
std::vector<LevelAccuracy> estimator_accuracy_diag(std::span<const LevelStats> stats,
                                                   const ModelParams& params,
                                                   const MeshHierarchy& hier);

}  // namespace mlmc
