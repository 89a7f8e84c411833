#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mlmc/hierarchy.hpp"
#include "mlmc/level_stats.hpp"

namespace mlmc {

struct Allocation {
  std::vector<std::int64_t> M;
  double theta = 0.5;
  double predicted_work = 0.0;
};

// 1 - bias_model(L)/tol, unclamped. Values <= 0 mean L is infeasible.
double optimal_theta(double tol, const MeshHierarchy& hier, double qw, double q1, int num_levels);

// Unrounded optimum M_l = (C/(theta tol))^2 sqrt(V_l/W_l) sum_k sqrt(V_k W_k).
// Throws invalid_split for theta outside (0,1), invalid_argument on bad V/W.
std::vector<double> optimal_samples_real(double tol, double theta, double c_alpha,
                                         std::span<const double> V, std::span<const double> W);

// Ceiling of the above, with every level clamped to at least one sample.
std::vector<std::int64_t> optimal_samples(double tol, double theta, double c_alpha,
                                          std::span<const double> V, std::span<const double> W);

// (C/(theta tol))^2 (sum sqrt(V W))^2.
double predicted_work(double tol, double theta, double c_alpha, std::span<const double> V,
                      std::span<const double> W);

Allocation allocate(double tol, double theta, double c_alpha, std::span<const double> V,
                    std::span<const double> W);

// Sum of level means. Throws insufficient_samples naming the empty level.
double estimator_value(std::span<const LevelStats> stats);

double estimator_variance(std::span<const double> V, std::span<const double> M);
double estimator_variance(std::span<const double> V, std::span<const std::int64_t> M);

double total_error_estimate(double bias, double var_a, double c_alpha);

}  // namespace mlmc
