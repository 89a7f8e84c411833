#include "mlmc/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mlmc/error.hpp"
#include "mlmc/simplex.hpp"

namespace mlmc {

namespace {

void check_range(std::span<const LevelStats> stats, int l0, int L) {
  if (l0 < 1 || L < l0 || static_cast<std::size_t>(L) >= stats.size()) {
    throw Error(ErrorCode::calibration_unavailable,
                "calibration level range [" + std::to_string(l0) + ", " + std::to_string(L) +
                    "] is empty or outside the data");
  }
}

struct Sums {
  double mw2s = 0.0;   // sum M w^2 s
  double wsmg = 0.0;   // sum w s M Gbar
  double m = 0.0;      // sum M
  double logs = 0.0;   // sum M log s
};

Sums weighted_sums(std::span<const LevelStats> stats, const MeshHierarchy& hier, double q1,
                   double q2, int l0, int L) {
  Sums s;
  for (int l = l0; l <= L; ++l) {
    const auto& st = stats[static_cast<std::size_t>(l)];
    if (st.count() == 0) continue;
    const double M = static_cast<double>(st.count());
    const double w = weak_term(hier, q1, l);
    const double sl = strong_term(hier, q2, l);
    s.mw2s += M * w * w * sl;
    s.wsmg += w * sl * M * st.mean();
    s.m += M;
    s.logs += M * std::log(sl);
  }
  return s;
}

// sum_l s_l sum_m (G - qw w_l)^2 from central sums.
double residual_sum(std::span<const LevelStats> stats, const MeshHierarchy& hier, double q1,
                    double q2, double qw, int l0, int L) {
  double r = 0.0;
  for (int l = l0; l <= L; ++l) {
    const auto& st = stats[static_cast<std::size_t>(l)];
    if (st.count() == 0) continue;
    const double M = static_cast<double>(st.count());
    const double d = st.mean() - qw * weak_term(hier, q1, l);
    r += strong_term(hier, q2, l) * (st.m2() + M * d * d);
  }
  return r;
}

}  // namespace

void RatePrior::validate() const {
  if (!(sigma0 > 0.0) || !(sigma1 > 0.0) || !std::isfinite(x0_hat) || !std::isfinite(x1_hat)) {
    throw Error(ErrorCode::invalid_argument, "rate prior: sigmas must be positive, means finite");
  }
}

RatePrior RatePrior::from_rates(double q1, double q2, double sigma0, double sigma1) {
  if (!(q1 > 0.0) || !(q2 < 2.0 * q1)) {
    throw Error(ErrorCode::invalid_argument, "rate prior: need q1 > 0 and q2 < 2 q1");
  }
  return {std::log(q1), std::log(2.0 * q1 - q2), sigma0, sigma1};
}

void VariancePriorConfig::validate() const {
  if (!(kappa0 > 0.0) || !(kappa1 > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "variance prior: kappa0 and kappa1 must be positive");
  }
}

double model_variance(const ModelParams& params, const MeshHierarchy& hier, int level) {
  return params.qs / strong_term(hier, params.q2, level);
}

double variance_posterior(const LevelStats& stats, const ModelParams& params,
                          const VariancePriorConfig& cfg, const MeshHierarchy& hier, int level) {
  if (level < 1) {
    throw Error(ErrorCode::invalid_argument, "variance posterior is defined for levels >= 1");
  }
  if (stats.count() == 0) return model_variance(params, hier, level);
  const double M = static_cast<double>(stats.count());
  const double mu_hat = params.qw * weak_term(hier, params.q1, level);
  const double lambda_hat = strong_term(hier, params.q2, level) / params.qs;
  const double u3 = 0.5 + cfg.kappa1 * lambda_hat + 0.5 * M;
  const double d = stats.mean() - mu_hat;
  const double u4 =
      cfg.kappa1 + 0.5 * stats.m2() + cfg.kappa0 * M * d * d / (2.0 * (cfg.kappa0 + M));
  return u4 / (u3 - 0.5);
}

QwQsFit fit_qw_qs(std::span<const LevelStats> stats, const MeshHierarchy& hier, double q1,
                  double q2, int l0, int L) {
  check_range(stats, l0, L);
  const Sums s = weighted_sums(stats, hier, q1, q2, l0, L);
  if (!(s.mw2s > 0.0)) {
    throw Error(ErrorCode::calibration_unavailable,
                "no samples on levels " + std::to_string(l0) + ".." + std::to_string(L));
  }
  QwQsFit fit;
  fit.qw = s.wsmg / s.mw2s;
  fit.qs_raw = residual_sum(stats, hier, q1, q2, fit.qw, l0, L) / s.m;

  // Floor relative to the first populated level in range.
  double floor = 1e-100;
  for (int l = l0; l <= L; ++l) {
    const auto& st = stats[static_cast<std::size_t>(l)];
    if (st.count() == 0) continue;
    double base = st.m2() / static_cast<double>(st.count());
    if (!(base > 0.0)) base = 1e-6 * st.mean() * st.mean();
    if (!(base > 0.0)) base = 1e-100;
    floor = 1e-3 * strong_term(hier, q2, l) * base;
    break;
  }
  fit.floored = !(fit.qs_raw >= floor);
  fit.qs = fit.floored ? floor : fit.qs_raw;
  return fit;
}

double qw_posterior_sd(std::span<const LevelStats> stats, const MeshHierarchy& hier, double q1,
                       double q2, double qs, int l0, int L) {
  check_range(stats, l0, L);
  const Sums s = weighted_sums(stats, hier, q1, q2, l0, L);
  if (!(s.mw2s > 0.0)) {
    throw Error(ErrorCode::calibration_unavailable,
                "no samples on levels " + std::to_string(l0) + ".." + std::to_string(L));
  }
  return std::sqrt(qs / s.mw2s);
}

double qw_worst_case(double qw_star, double sd, double c_alpha) {
  const double sign = qw_star < 0.0 ? -1.0 : 1.0;
  return qw_star + sign * c_alpha * sd;
}

double rate_log_posterior(double x0, double x1, std::span<const LevelStats> stats,
                          const MeshHierarchy& hier, const RatePrior& prior, int l0, int L) {
  const double q1 = std::exp(x0);
  const double e1 = std::exp(x1);
  const double q2 = 2.0 * q1 - e1;
  if (!(q2 > 0.0) || !std::isfinite(q1)) {
    const double violation = std::isfinite(e1 - 2.0 * q1) ? e1 - 2.0 * q1 : 1e10;
    return -1e100 * (1.0 + violation);
  }
  const double p0 = (x0 - prior.x0_hat) / prior.sigma0;
  const double p1 = (x1 - prior.x1_hat) / prior.sigma1;
  const double log_prior = -0.5 * (p0 * p0 + p1 * p1);

  check_range(stats, l0, L);
  const Sums s = weighted_sums(stats, hier, q1, q2, l0, L);
  if (!(s.m > 0.0)) {
    throw Error(ErrorCode::calibration_unavailable, "rate posterior: no samples above level 0");
  }
  const double qw = s.wsmg / s.mw2s;
  const double S = std::max(residual_sum(stats, hier, q1, q2, qw, l0, L) / s.m, 1e-300);
  return -0.5 * s.m * std::log(S) + 0.5 * s.logs + log_prior;
}

RateFit fit_rates(std::span<const LevelStats> stats, const MeshHierarchy& hier,
                  const RatePrior& prior, int L) {
  prior.validate();
  RateFit out;
  const double q1p = std::exp(prior.x0_hat);
  out.q1 = q1p;
  out.q2 = 2.0 * q1p - std::exp(prior.x1_hat);

  bool has_data = false;
  for (int l = 1; l <= L && static_cast<std::size_t>(l) < stats.size(); ++l) {
    has_data = has_data || stats[static_cast<std::size_t>(l)].count() > 0;
  }
  if (!has_data) {
    out.prior_only = true;
    return out;
  }

  auto neg = [&](const std::vector<double>& x) {
    return -rate_log_posterior(x[0], x[1], stats, hier, prior, 1, L);
  };
  const double starts[3][2] = {{0.0, 0.0}, {0.25, -0.25}, {-0.25, 0.25}};
  SimplexResult best;
  bool have_best = false;
  bool any_converged = false;
  for (const auto& d : starts) {
    std::vector<double> x0 = {prior.x0_hat + d[0] * prior.sigma0,
                              prior.x1_hat + d[1] * prior.sigma1};
    SimplexResult r = nelder_mead(neg, x0, {200, 1e-4, 0.5});
    out.evals += r.evals;
    if (!r.converged) continue;
    any_converged = true;
    if (!have_best || r.f < best.f) {
      best = r;
      have_best = true;
    }
  }
  if (!any_converged) {
    out.warning = true;
    return out;
  }
  out.q1 = std::exp(best.x[0]);
  out.q2 = 2.0 * out.q1 - std::exp(best.x[1]);
  return out;
}

Calibration calibrate(std::span<const LevelStats> stats, const MeshHierarchy& hier,
                      const RatePrior& prior, const VariancePriorConfig& vprior, double c_alpha,
                      int frak_L) {
  // Highest populated level defines L for the fits.
  int L = -1;
  for (std::size_t l = 0; l < stats.size(); ++l) {
    if (stats[l].count() > 0) L = static_cast<int>(l);
  }
  if (L < 1) {
    throw Error(ErrorCode::calibration_unavailable, "calibration needs samples on level >= 1");
  }
  if (stats[0].count() < 2) {
    throw Error(ErrorCode::insufficient_samples, "level 0 needs at least 2 samples");
  }

  Calibration cal;
  const RateFit rates = fit_rates(stats, hier, prior, L);
  cal.rate_warning = rates.warning;

  const int l0 = std::max(1, L - frak_L);
  const QwQsFit fit = fit_qw_qs(stats, hier, rates.q1, rates.q2, l0, L);
  cal.qw_star = fit.qw;
  cal.qs_floored = fit.floored;
  cal.qw_sd = qw_posterior_sd(stats, hier, rates.q1, rates.q2, fit.qs, l0, L);

  ModelParams& p = cal.params;
  p.q1 = rates.q1;
  p.q2 = rates.q2;
  p.qs = fit.qs;
  p.qw = qw_worst_case(fit.qw, cal.qw_sd, c_alpha);
  p.v.resize(stats.size());
  p.v[0] = stats[0].variance();
  for (std::size_t l = 1; l < stats.size(); ++l) {
    p.v[l] = variance_posterior(stats[l], p, vprior, hier, static_cast<int>(l));
  }
  return cal;
}

}  // namespace mlmc
