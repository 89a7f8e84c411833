#include "mlmc/synthetic_sampler.hpp"

#include <cmath>
#include <string>

#include "mlmc/error.hpp"

namespace mlmc {

nlohmann::json SyntheticParams::to_json() const {
  return {{"q1", q1},       {"q2", q2}, {"qw", qw},       {"qs", qs},    {"gamma", gamma},
          {"h0", h0},       {"beta", beta}, {"mean0", mean0}, {"var0", var0}};
}

SyntheticParams SyntheticParams::from_json(const nlohmann::json& j) {
  SyntheticParams p;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const auto& v = it.value();
    const std::string path = "/sampler/params/" + k;
    if (k == "beta") {
      if (!v.is_number_integer() || v.get<long long>() < 2) {
        throw Error(ErrorCode::config, path + ": expected integer > 1");
      }
      p.beta = v.get<int>();
      continue;
    }
    if (!v.is_number()) throw Error(ErrorCode::config, path + ": expected number");
    const double x = v.get<double>();
    if (k == "q1") p.q1 = x;
    else if (k == "q2") p.q2 = x;
    else if (k == "qw") p.qw = x;
    else if (k == "qs") p.qs = x;
    else if (k == "gamma") p.gamma = x;
    else if (k == "h0") p.h0 = x;
    else if (k == "mean0") p.mean0 = x;
    else if (k == "var0") p.var0 = x;
    else throw Error(ErrorCode::config, path + ": unknown parameter");
  }
  if (!(p.q1 > 0.0)) throw Error(ErrorCode::config, "/sampler/params/q1: must be positive");
  if (!(p.q2 > 0.0) || p.q2 > 2.0 * p.q1) {
    throw Error(ErrorCode::config, "/sampler/params/q2: require 0 < q2 <= 2 q1");
  }
  if (!(p.qs >= 0.0)) throw Error(ErrorCode::config, "/sampler/params/qs: must be >= 0");
  if (!(p.var0 >= 0.0)) throw Error(ErrorCode::config, "/sampler/params/var0: must be >= 0");
  if (!(p.h0 > 0.0)) throw Error(ErrorCode::config, "/sampler/params/h0: must be positive");
  if (!(p.gamma > 0.0)) throw Error(ErrorCode::config, "/sampler/params/gamma: must be positive");
  return p;
}

SyntheticSampler::SyntheticSampler(SyntheticParams p) : p_(p) {
  desc_.name = "synthetic";
  desc_.q1 = p_.q1;
  desc_.q2 = p_.q2;
  desc_.hier = {p_.h0, p_.beta, p_.gamma};
  desc_.hier.validate();
  // E[g] = mean0 + qw sum_{l>=1} w_l = mean0 + qw h0^q1.
  desc_.reference = p_.mean0 + p_.qw * std::pow(p_.h0, p_.q1);
  const double gap = std::max(2.0 * p_.q1 - p_.q2, 0.1 * p_.q1);
  desc_.rate_prior = {std::log(p_.q1), std::log(gap), 1.0, 1.0};
  nominal_complexity(p_.q1, p_.q2, p_.gamma, desc_.s1, desc_.s2);
}

double SyntheticSampler::level_mean(int level) const {
  return level == 0 ? p_.mean0 : p_.qw * weak_term(desc_.hier, p_.q1, level);
}

double SyntheticSampler::level_variance(int level) const {
  return level == 0 ? p_.var0 : p_.qs / strong_term(desc_.hier, p_.q2, level);
}

double SyntheticSampler::coupled(int level, std::span<const double> omega) const {
  if (omega.size() < outcome_size(level)) {
    throw Error(ErrorCode::invalid_argument, "synthetic: outcome too short");
  }
  return level_mean(level) + std::sqrt(level_variance(level)) * omega[static_cast<std::size_t>(level)];
}

double SyntheticSampler::functional(int level, std::span<const double> omega) const {
  double g = 0.0;
  for (int l = 0; l <= level; ++l) g += coupled(l, omega);
  return g;
}

}  // namespace mlmc
