#include "mlmc/estimator.hpp"

#include <cmath>
#include <string>

#include "mlmc/error.hpp"

namespace mlmc {

namespace {

void check_inputs(double tol, double theta, double c_alpha, std::span<const double> V,
                  std::span<const double> W) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw Error(ErrorCode::invalid_split, "splitting parameter theta must lie in (0,1), got " +
                                              std::to_string(theta));
  }
  if (!(tol > 0.0) || !(c_alpha > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "tol and C_alpha must be positive");
  }
  if (V.empty() || V.size() != W.size()) {
    throw Error(ErrorCode::invalid_argument, "V and W must be nonempty and of equal length");
  }
  for (std::size_t l = 0; l < V.size(); ++l) {
    if (!(V[l] >= 0.0) || !std::isfinite(V[l]) || !(W[l] > 0.0) || !std::isfinite(W[l])) {
      throw Error(ErrorCode::invalid_argument,
                  "invalid variance or work on level " + std::to_string(l));
    }
  }
}

double sum_sqrt_vw(std::span<const double> V, std::span<const double> W) {
  double s = 0.0;
  for (std::size_t l = 0; l < V.size(); ++l) s += std::sqrt(V[l] * W[l]);
  return s;
}

}  // namespace

double optimal_theta(double tol, const MeshHierarchy& hier, double qw, double q1, int num_levels) {
  return 1.0 - bias_model(hier, qw, q1, num_levels) / tol;
}

std::vector<double> optimal_samples_real(double tol, double theta, double c_alpha,
                                         std::span<const double> V, std::span<const double> W) {
  check_inputs(tol, theta, c_alpha, V, W);
  const double k = c_alpha / (theta * tol);
  const double scale = k * k * sum_sqrt_vw(V, W);
  std::vector<double> m(V.size());
  for (std::size_t l = 0; l < V.size(); ++l) m[l] = scale * std::sqrt(V[l] / W[l]);
  return m;
}

std::vector<std::int64_t> optimal_samples(double tol, double theta, double c_alpha,
                                          std::span<const double> V, std::span<const double> W) {
  const auto real = optimal_samples_real(tol, theta, c_alpha, V, W);
  std::vector<std::int64_t> m(real.size());
  for (std::size_t l = 0; l < real.size(); ++l) {
    const double c = std::ceil(real[l]);
    if (c > 9.0e15) {
      throw Error(ErrorCode::tolerance_unreachable,
                  "optimal sample count overflows on level " + std::to_string(l));
    }
    m[l] = c < 1.0 ? 1 : static_cast<std::int64_t>(c);
  }
  return m;
}

double predicted_work(double tol, double theta, double c_alpha, std::span<const double> V,
                      std::span<const double> W) {
  check_inputs(tol, theta, c_alpha, V, W);
  const double k = c_alpha / (theta * tol);
  const double s = sum_sqrt_vw(V, W);
  return k * k * s * s;
}

Allocation allocate(double tol, double theta, double c_alpha, std::span<const double> V,
                    std::span<const double> W) {
  Allocation a;
  a.theta = theta;
  a.M = optimal_samples(tol, theta, c_alpha, V, W);
  a.predicted_work = predicted_work(tol, theta, c_alpha, V, W);
  return a;
}

double estimator_value(std::span<const LevelStats> stats) {
  if (stats.empty()) throw Error(ErrorCode::insufficient_samples, "estimator has no levels");
  double a = 0.0;
  for (std::size_t l = 0; l < stats.size(); ++l) {
    if (stats[l].count() < 1) {
      throw Error(ErrorCode::insufficient_samples,
                  "level " + std::to_string(l) + " has no samples");
    }
    a += stats[l].mean();
  }
  return a;
}

double estimator_variance(std::span<const double> V, std::span<const double> M) {
  if (V.size() != M.size()) throw Error(ErrorCode::invalid_argument, "V and M length mismatch");
  double s = 0.0;
  for (std::size_t l = 0; l < V.size(); ++l) {
    if (!(M[l] >= 1.0)) {
      throw Error(ErrorCode::insufficient_samples,
                  "level " + std::to_string(l) + " has fewer than one sample");
    }
    s += V[l] / M[l];
  }
  return s;
}

double estimator_variance(std::span<const double> V, std::span<const std::int64_t> M) {
  std::vector<double> m(M.begin(), M.end());
  return estimator_variance(V, std::span<const double>(m));
}

double total_error_estimate(double bias, double var_a, double c_alpha) {
  return bias + c_alpha * std::sqrt(var_a);
}

}  // namespace mlmc
