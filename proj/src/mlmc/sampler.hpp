#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mlmc/calibration.hpp"
#include "mlmc/hierarchy.hpp"
#include "mlmc/rng.hpp"

namespace mlmc {

struct SamplerDescriptor {
  std::string name;
  double q1 = 1.0;  // nominal rates
  double q2 = 1.0;
  MeshHierarchy hier;
  std::optional<double> reference;
  RatePrior rate_prior;
  double s1 = 2.0;  // nominal complexity tol^-s1 |log tol|^s2
  double s2 = 0.0;
};

// Complexity exponents implied by (q1, q2, gamma).
void nominal_complexity(double q1, double q2, double gamma, double& s1, double& s2);

struct Sample {
  double g = 0.0;
  double cost = 0.0;  // model work h_l^-gamma
};

// Coupled level-difference generator. A random outcome omega is a vector of
// standard normals. functional(l, omega) is g_l(omega); coupled(l, omega) is
// g_l - g_{l-1} evaluated on the same omega (g_0 at level 0). omega may be
// longer than outcome_size(l) when it was drawn for a finer level; each
// sampler documents how it restricts a fine outcome.
class CoupledSampler {
 public:
  virtual ~CoupledSampler() = default;

  virtual const SamplerDescriptor& descriptor() const = 0;
  virtual std::size_t outcome_size(int level) const = 0;
  virtual double functional(int level, std::span<const double> omega) const = 0;
  virtual double coupled(int level, std::span<const double> omega) const = 0;
  virtual int max_level() const { return 24; }
  virtual nlohmann::json params_json() const = 0;

  const MeshHierarchy& hierarchy() const { return descriptor().hier; }

  // Draws omega from the stream into scratch and evaluates the level difference.
  Sample sample(int level, Stream& stream, std::vector<double>& scratch) const;
};

// Builds a sampler from {"name": ..., "params": {...}}. Unknown names or
// parameters raise Error(config) with the offending field path.
std::unique_ptr<CoupledSampler> make_sampler(const nlohmann::json& spec);

}  // namespace mlmc
