#include "mlmc/gbm_sampler.hpp"

#include <cmath>
#include <string>

#include "mlmc/error.hpp"

namespace mlmc {

nlohmann::json GbmParams::to_json() const {
  return {{"drift", drift},   {"volatility", volatility}, {"maturity", maturity},
          {"u0", u0},         {"strike", strike},         {"scale", scale},
          {"discount", discount}, {"steps0", steps0}};
}

GbmParams GbmParams::from_json(const nlohmann::json& j) {
  GbmParams p;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const auto& v = it.value();
    auto num = [&](double& dst) {
      if (!v.is_number()) throw Error(ErrorCode::config, "/sampler/params/" + k + ": expected number");
      dst = v.get<double>();
    };
    if (k == "drift") num(p.drift);
    else if (k == "volatility") num(p.volatility);
    else if (k == "maturity") num(p.maturity);
    else if (k == "u0") num(p.u0);
    else if (k == "strike") num(p.strike);
    else if (k == "scale") num(p.scale);
    else if (k == "discount") {
      if (!v.is_boolean()) throw Error(ErrorCode::config, "/sampler/params/discount: expected boolean");
      p.discount = v.get<bool>();
    } else if (k == "steps0") {
      if (!v.is_number_integer() || v.get<long long>() < 1) {
        throw Error(ErrorCode::config, "/sampler/params/steps0: expected positive integer");
      }
      p.steps0 = v.get<int>();
    } else {
      throw Error(ErrorCode::config, "/sampler/params/" + k + ": unknown parameter");
    }
  }
  if (!(p.maturity > 0.0)) throw Error(ErrorCode::config, "/sampler/params/maturity: must be positive");
  if (!(p.volatility >= 0.0)) throw Error(ErrorCode::config, "/sampler/params/volatility: must be >= 0");
  if (!(p.u0 > 0.0)) throw Error(ErrorCode::config, "/sampler/params/u0: must be positive");
  return p;
}

GbmSampler::GbmSampler(GbmParams p) : p_(p) {
  desc_.name = "gbm";
  desc_.q1 = 1.0;
  desc_.q2 = 1.0;
  desc_.hier = {p_.maturity / p_.steps0, 2, 1.0};
  desc_.reference = exact_mean(p_);
  desc_.rate_prior = RatePrior::from_rates(1.0, 1.0);
  nominal_complexity(desc_.q1, desc_.q2, desc_.hier.gamma, desc_.s1, desc_.s2);
}

std::size_t GbmSampler::outcome_size(int level) const {
  return static_cast<std::size_t>(p_.steps0) << level;
}

std::vector<double> GbmSampler::coarsen(const std::vector<double>& fine) const {
  const std::size_t b = static_cast<std::size_t>(desc_.hier.beta);
  std::vector<double> c(fine.size() / b, 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < b; ++k) s += fine[i * b + k];
    c[i] = s;
  }
  return c;
}

std::vector<double> GbmSampler::increments(int level, std::span<const double> omega) const {
  const std::size_t n = outcome_size(level);
  const std::size_t ratio = n == 0 ? 0 : omega.size() / n;
  if (omega.size() < n || omega.size() % n != 0 || (ratio & (ratio - 1)) != 0) {
    throw Error(ErrorCode::invalid_argument, "gbm: outcome too short for level " + std::to_string(level));
  }
  const double sqrt_h = std::sqrt(p_.maturity / static_cast<double>(omega.size()));
  std::vector<double> dw(omega.size());
  for (std::size_t i = 0; i < omega.size(); ++i) dw[i] = sqrt_h * omega[i];
  while (dw.size() > n) dw = coarsen(dw);
  return dw;
}

double GbmSampler::payoff_from_increments(const std::vector<double>& dw) const {
  const double h = p_.maturity / static_cast<double>(dw.size());
  double u = p_.u0;
  for (double d : dw) u += u * (p_.drift * h + p_.volatility * d);
  const double disc = p_.discount ? std::exp(-p_.drift * p_.maturity) : 1.0;
  return disc * p_.scale * std::max(u - p_.strike, 0.0);
}

double GbmSampler::functional(int level, std::span<const double> omega) const {
  return payoff_from_increments(increments(level, omega));
}

double GbmSampler::coupled(int level, std::span<const double> omega) const {
  const auto fine = increments(level, omega);
  const double gf = payoff_from_increments(fine);
  if (level == 0) return gf;
  return gf - payoff_from_increments(coarsen(fine));
}

double GbmSampler::exact_mean(const GbmParams& p) {
  const double T = p.maturity;
  const double disc = p.discount ? std::exp(-p.drift * T) : 1.0;
  const double fwd = p.u0 * std::exp(p.drift * T);
  if (p.volatility == 0.0) return disc * p.scale * std::max(fwd - p.strike, 0.0);
  const double sd = p.volatility * std::sqrt(T);
  const double d1 = (std::log(fwd / p.strike) + 0.5 * sd * sd) / sd;
  const double d2 = d1 - sd;
  return disc * p.scale * (fwd * normal_cdf(d1) - p.strike * normal_cdf(d2));
}

}  // namespace mlmc
