#include "mlmc/hierarchy.hpp"

#include <cmath>
#include <string>

#include "mlmc/error.hpp"

namespace mlmc {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::config: return "config_error";
    case ErrorCode::sampling_failure: return "sampling_failure";
    case ErrorCode::insufficient_samples: return "insufficient_samples";
    case ErrorCode::invalid_split: return "invalid_split";
    case ErrorCode::calibration_unavailable: return "calibration_unavailable";
    case ErrorCode::tolerance_unreachable: return "tolerance_unreachable";
    case ErrorCode::iteration_limit: return "iteration_limit";
    case ErrorCode::estimate_undefined: return "estimate_undefined";
    case ErrorCode::io: return "io_error";
  }
  return "unknown";
}

void MeshHierarchy::validate() const {
  if (!(h0 > 0.0) || !std::isfinite(h0)) {
    throw Error(ErrorCode::invalid_argument, "mesh hierarchy: h0 must be positive");
  }
  if (beta < 2) {
    throw Error(ErrorCode::invalid_argument, "mesh hierarchy: beta must be an integer > 1");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorCode::invalid_argument, "mesh hierarchy: gamma must be positive");
  }
}

double mesh_size(const MeshHierarchy& hier, int level) {
  return hier.h0 * std::pow(static_cast<double>(hier.beta), -static_cast<double>(level));
}

double work_model(const MeshHierarchy& hier, int level) {
  return std::pow(mesh_size(hier, level), -hier.gamma);
}

namespace {

// beta^(l q) as an integer power of beta^q keeps successive ratios within a
// few ulps of beta^q.
double level_power(int beta, double q, int level) {
  return std::pow(std::pow(static_cast<double>(beta), q), level);
}

}  // namespace

double weak_term(const MeshHierarchy& hier, double q1, int level) {
  return std::pow(hier.h0, q1) * level_power(hier.beta, -q1, level) *
         (std::pow(static_cast<double>(hier.beta), q1) - 1.0);
}

double strong_term(const MeshHierarchy& hier, double q2, int level) {
  return std::pow(hier.h0, -q2) * level_power(hier.beta, q2, level);
}

double bias_model(const MeshHierarchy& hier, double qw, double q1, int num_levels) {
  return std::abs(qw) * std::pow(hier.h0, q1) * level_power(hier.beta, -q1, num_levels);
}

void ModelParams::validate() const {
  if (!(q1 > 0.0)) throw Error(ErrorCode::invalid_argument, "model params: q1 must be positive");
  if (!(q2 > 0.0) || q2 > 2.0 * q1) {
    throw Error(ErrorCode::invalid_argument, "model params: require 0 < q2 <= 2 q1");
  }
  if (qw == 0.0 || !std::isfinite(qw)) {
    throw Error(ErrorCode::invalid_argument, "model params: qw must be finite and nonzero");
  }
  if (!(qs > 0.0)) throw Error(ErrorCode::invalid_argument, "model params: qs must be positive");
  for (std::size_t l = 0; l < v.size(); ++l) {
    if (!(v[l] >= 0.0)) {
      throw Error(ErrorCode::invalid_argument,
                  "model params: negative variance on level " + std::to_string(l));
    }
  }
}

}  // namespace mlmc
