#include "mlmc/cmlmc.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mlmc/error.hpp"
#include "mlmc/estimator.hpp"
#include "mlmc/sampling.hpp"

namespace mlmc {

void ContinuationConfig::validate() const {
  auto bad = [](const std::string& m) { throw Error(ErrorCode::config, m); };
  if (!(tol > 0.0)) bad("/algorithm/tol: must be positive");
  if (!(tol_max > 0.0)) bad("/algorithm/tol_max: must be positive");
  if (!(r2 > 1.0)) bad("/algorithm/r2: must exceed 1");
  if (!(r1 >= r2)) bad("/algorithm/r1: must be >= r2");
  if (!(c_alpha > 0.0)) bad("/algorithm/c_alpha: must be positive");
  if (L_inc < 1) bad("/algorithm/L_inc: must be positive");
  if (frak_L < 1) bad("/algorithm/frak_L: must be positive");
  if (L_max_abs < 2) bad("/algorithm/L_max_abs: must be at least 2");
  if (max_iterations < 1) bad("/algorithm/max_iterations: must be positive");
  if (!(theta_min > 0.0 && theta_min < 1.0)) bad("/algorithm/theta_min: must lie in (0,1)");
  if (!initial_hierarchy.empty() && initial_hierarchy.size() < 3) {
    bad("/algorithm/initial_hierarchy: needs at least three levels");
  }
  for (std::size_t l = 0; l < initial_hierarchy.size(); ++l) {
    if (!(initial_hierarchy[l].h > 0.0) || initial_hierarchy[l].M < 2) {
      bad("/algorithm/initial_hierarchy/" + std::to_string(l) + ": need h > 0 and M >= 2");
    }
  }
  if (rate_prior) {
    try {
      rate_prior->validate();
    } catch (const Error& e) {
      bad(std::string("/algorithm/rate_prior: ") + e.what());
    }
  }
  if (!(var_prior.kappa0 > 0.0)) bad("/algorithm/kappa0: must be positive");
  if (!(var_prior.kappa1 > 0.0)) bad("/algorithm/kappa1: must be positive");
}

ContinuationConfig ContinuationConfig::sde_defaults() {
  ContinuationConfig c;
  c.tol_max = 0.1;
  c.frak_L = 5;
  c.initial_hierarchy = {{1.0, 10}, {0.5, 10}, {0.25, 10}};
  return c;
}

ContinuationConfig ContinuationConfig::pde_defaults() {
  ContinuationConfig c;
  c.tol_max = 0.5;
  c.frak_L = 3;
  // initial hierarchy left empty: first three sampler levels, 10 samples each
  return c;
}

int schedule_iE(double tol, double tol_max, double r1, double r2) {
  const double v = (-std::log(tol) + std::log(r2) + std::log(tol_max)) / std::log(r1);
  // exact integer ratios can land a few ulps below the integer
  const double f = std::floor(v + 1e-9);
  return f < 0.0 ? 0 : static_cast<int>(f);
}

double iteration_tolerance(int i, int iE, double tol, double r1, double r2) {
  const double r = i < iE ? r1 : r2;
  return std::pow(r, static_cast<double>(iE - i)) * tol / r2;
}

LevelChoice select_num_levels(double tol_i, const ModelParams& params, const MeshHierarchy& hier,
                              int L_prev, double c_alpha, int L_inc, double theta_min,
                              int max_level) {
  const double lmin_real = (params.q1 * std::log(hier.h0) - std::log(tol_i / std::abs(params.qw))) /
                           (params.q1 * std::log(static_cast<double>(hier.beta)));
  int L_lo = L_prev;
  if (std::isfinite(lmin_real)) {
    const double c = std::ceil(lmin_real);
    if (c > static_cast<double>(max_level)) {
      throw Error(ErrorCode::tolerance_unreachable,
                  "bias constraint needs more than " + std::to_string(max_level) + " levels");
    }
    if (c > L_lo) L_lo = static_cast<int>(c);
  }
  const int L_hi = std::min(L_lo + L_inc, max_level);

  std::vector<double> V, W;
  LevelChoice best;
  bool found = false;
  for (int L = 0; L <= L_hi; ++L) {
    V.push_back(static_cast<std::size_t>(L) < params.v.size() ? params.v[static_cast<std::size_t>(L)]
                                                              : model_variance(params, hier, L));
    W.push_back(work_model(hier, L));
    if (L < L_lo) continue;
    const double theta = optimal_theta(tol_i, hier, params.qw, params.q1, L);
    if (!(theta >= theta_min) || !(theta < 1.0)) continue;
    const double w = predicted_work(tol_i, theta, c_alpha, V, W);
    if (!found || w < best.predicted_work) {
      best = {L, theta, w};
      found = true;
    }
  }
  if (!found) {
    throw Error(ErrorCode::tolerance_unreachable,
                "no level count in [" + std::to_string(L_lo) + ", " + std::to_string(L_hi) +
                    "] gives theta >= theta_min");
  }
  return best;
}

namespace {

void check_initial(const std::vector<InitialLevel>& init, const MeshHierarchy& hier) {
  for (std::size_t l = 0; l < init.size(); ++l) {
    const double h = mesh_size(hier, static_cast<int>(l));
    if (std::abs(init[l].h - h) > 1e-12 * h) {
      throw Error(ErrorCode::config, "/algorithm/initial_hierarchy/" + std::to_string(l) +
                                         "/h: mesh size does not match the sampler hierarchy (" +
                                         std::to_string(h) + ")");
    }
  }
}

void fill_params(IterationTrace& t, const Calibration& cal) {
  t.q1 = cal.params.q1;
  t.q2 = cal.params.q2;
  t.qw = cal.params.qw;
  t.qw_star = cal.qw_star;
  t.qw_sd = cal.qw_sd;
  t.qs = cal.params.qs;
  t.rate_warning = cal.rate_warning;
}

}  // namespace

RunRecord run_cmlmc(const CoupledSampler& sampler, const ContinuationConfig& cfg_in,
                    std::uint64_t seed, int threads) {
  cfg_in.validate();
  ContinuationConfig cfg = cfg_in;
  const MeshHierarchy& hier = sampler.hierarchy();
  if (cfg.initial_hierarchy.empty()) {
    for (int l = 0; l < 3; ++l) cfg.initial_hierarchy.push_back({mesh_size(hier, l), 10});
  }
  check_initial(cfg.initial_hierarchy, hier);
  const RatePrior prior = cfg.rate_prior.value_or(sampler.descriptor().rate_prior);
  const int max_level = std::min(cfg.L_max_abs, sampler.max_level());

  RunRecord rec;
  rec.algorithm = "cmlmc";
  rec.sampler = sampler.descriptor().name;
  rec.seed = seed;
  rec.tol = cfg.tol;

  SamplePool pool(sampler, seed, threads);
  try {
    // Initial hierarchy.
    IterationTrace init;
    init.index = -1;
    init.L = static_cast<int>(cfg.initial_hierarchy.size()) - 1;
    for (std::size_t l = 0; l < cfg.initial_hierarchy.size(); ++l) {
      pool.draw(static_cast<int>(l), cfg.initial_hierarchy[l].M);
      init.M.push_back(cfg.initial_hierarchy[l].M);
      init.M_bar.push_back(cfg.initial_hierarchy[l].M);
    }
    Calibration cal =
        calibrate(pool.cumulative(), hier, prior, cfg.var_prior, cfg.c_alpha, cfg.frak_L);
    fill_params(init, cal);
    init.V = cal.params.v;
    init.model_work = pool.model_work();
    init.measured_cost = pool.measured_cost();
    rec.iterations.push_back(init);

    const int iE = schedule_iE(cfg.tol, cfg.tol_max, cfg.r1, cfg.r2);
    int L_prev = init.L;
    for (int i = 0;; ++i) {
      if (i >= cfg.max_iterations) {
        throw Error(ErrorCode::iteration_limit,
                    "no convergence after " + std::to_string(cfg.max_iterations) + " iterations");
      }
      const double w0 = pool.model_work();
      const double c0 = pool.measured_cost();
      IterationTrace t;
      t.index = i;
      t.tol_i = iteration_tolerance(i, iE, cfg.tol, cfg.r1, cfg.r2);
      const LevelChoice choice = select_num_levels(t.tol_i, cal.params, hier, L_prev, cfg.c_alpha,
                                                   cfg.L_inc, cfg.theta_min, max_level);
      t.L = choice.L;
      t.theta = choice.theta;
      t.qw_theta = cal.params.qw;

      std::vector<double> V, W;
      for (int l = 0; l <= t.L; ++l) {
        V.push_back(static_cast<std::size_t>(l) < cal.params.v.size()
                        ? cal.params.v[static_cast<std::size_t>(l)]
                        : model_variance(cal.params, hier, l));
        W.push_back(work_model(hier, l));
      }
      t.M = optimal_samples(t.tol_i, t.theta, cfg.c_alpha, V, W);

      std::vector<LevelStats> est;
      pool.ensure_levels(t.L + 1);
      for (int l = 0; l <= t.L; ++l) {
        const auto ul = static_cast<std::size_t>(l);
        if (cfg.reuse_samples) {
          pool.top_up(l, t.M[ul]);
        } else {
          est.push_back(pool.draw(l, t.M[ul]));
        }
      }
      if (cfg.reuse_samples) est = pool.cumulative();

      cal = calibrate(pool.cumulative(), hier, prior, cfg.var_prior, cfg.c_alpha, cfg.frak_L);
      fill_params(t, cal);
      t.V = cal.params.v;
      t.V.resize(static_cast<std::size_t>(t.L) + 1);
      for (int l = 0; l <= t.L; ++l) t.M_bar.push_back(est[static_cast<std::size_t>(l)].count());
      t.estimate = estimator_value(est);
      const double var_a = estimator_variance(t.V, t.M_bar);
      t.bias = bias_model(hier, cal.params.qw, cal.params.q1, t.L);
      t.stat_error = cfg.c_alpha * std::sqrt(var_a);
      t.error_estimate = total_error_estimate(t.bias, var_a, cfg.c_alpha);
      t.model_work = pool.model_work() - w0;
      t.measured_cost = pool.measured_cost() - c0;
      rec.iterations.push_back(t);

      rec.estimate = t.estimate;
      rec.error_estimate = t.error_estimate;
      rec.estimator_variance = var_a;
      rec.bias = t.bias;
      rec.final_L = t.L;
      rec.theta_final = t.theta;
      rec.levels.clear();
      for (int l = 0; l <= t.L; ++l) {
        const auto ul = static_cast<std::size_t>(l);
        rec.levels.push_back({l, est[ul].count(), est[ul].mean(), t.V[ul]});
      }
      L_prev = t.L;
      if (i + 1 > iE && t.error_estimate <= cfg.tol) break;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::config) throw;
    rec.status = to_string(e.code());
    rec.message = e.what();
  }
  rec.total_model_work = pool.model_work();
  rec.total_measured_cost = pool.measured_cost();
  return rec;
}

}  // namespace mlmc
