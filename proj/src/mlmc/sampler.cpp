#include "mlmc/sampler.hpp"

#include <string>

#include "mlmc/elliptic1d_sampler.hpp"
#include "mlmc/error.hpp"
#include "mlmc/gbm_sampler.hpp"
#include "mlmc/synthetic_sampler.hpp"

namespace mlmc {

void nominal_complexity(double q1, double q2, double gamma, double& s1, double& s2) {
  if (q2 > gamma) {
    s1 = 2.0;
    s2 = 0.0;
  } else if (q2 == gamma) {
    s1 = 2.0;
    s2 = 2.0;
  } else {
    s1 = 2.0 + (gamma - q2) / q1;
    s2 = 0.0;
  }
}

Sample CoupledSampler::sample(int level, Stream& stream, std::vector<double>& scratch) const {
  const std::size_t n = outcome_size(level);
  scratch.resize(n);
  for (std::size_t i = 0; i < n; ++i) scratch[i] = stream.normal();
  return {coupled(level, scratch), work_model(hierarchy(), level)};
}

std::unique_ptr<CoupledSampler> make_sampler(const nlohmann::json& spec) {
  if (!spec.is_object()) throw Error(ErrorCode::config, "/sampler: expected object");
  for (auto it = spec.begin(); it != spec.end(); ++it) {
    if (it.key() != "name" && it.key() != "params") {
      throw Error(ErrorCode::config, "/sampler/" + it.key() + ": unknown field");
    }
  }
  if (!spec.contains("name") || !spec["name"].is_string()) {
    throw Error(ErrorCode::config, "/sampler/name: required string");
  }
  const std::string name = spec["name"].get<std::string>();
  const nlohmann::json params = spec.value("params", nlohmann::json::object());
  if (!params.is_object()) throw Error(ErrorCode::config, "/sampler/params: expected object");
  if (name == "gbm") return std::make_unique<GbmSampler>(GbmParams::from_json(params));
  if (name == "synthetic") return std::make_unique<SyntheticSampler>(SyntheticParams::from_json(params));
  if (name == "elliptic1d") return std::make_unique<Elliptic1dSampler>(EllipticParams::from_json(params));
  throw Error(ErrorCode::config, "/sampler/name: unknown sampler '" + name + "'");
}

}  // namespace mlmc
