#include "mlmc/smlmc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mlmc/error.hpp"
#include "mlmc/estimator.hpp"
#include "mlmc/sampling.hpp"

namespace mlmc {

void StandardConfig::validate() const {
  auto bad = [](const std::string& m) { throw Error(ErrorCode::config, m); };
  if (!(tol > 0.0)) bad("/algorithm/tol: must be positive");
  if (M_tilde < 1) bad("/algorithm/M_tilde: must be a positive integer");
  if (!(theta > 0.0 && theta < 1.0)) bad("/algorithm/theta: must lie in (0,1)");
  if (q1 && !(*q1 > 0.0)) bad("/algorithm/q1: must be positive");
  if (!(c_alpha > 0.0)) bad("/algorithm/c_alpha: must be positive");
  if (L_max_abs < 2) bad("/algorithm/L_max_abs: must be at least 2");
}

double qw_estimate_std(const LevelStats& last, const LevelStats& prev, const MeshHierarchy& hier,
                       double q1, int L) {
  if (L < 2) {
    throw Error(ErrorCode::estimate_undefined, "weak constant estimate needs L >= 2");
  }
  const double b = std::pow(static_cast<double>(hier.beta), -q1);
  return std::max(std::abs(last.mean()), std::abs(prev.mean()) * b) / weak_term(hier, q1, L);
}

double error_estimate_std(double qw_hat, const MeshHierarchy& hier, double q1, int L,
                          std::span<const LevelStats> stats, double c_alpha) {
  if (static_cast<int>(stats.size()) < L + 1) {
    throw Error(ErrorCode::insufficient_samples, "error estimate needs stats for levels 0..L");
  }
  double var = 0.0;
  for (int l = 0; l <= L; ++l) {
    const auto& s = stats[static_cast<std::size_t>(l)];
    var += s.variance() / static_cast<double>(s.count());
  }
  return total_error_estimate(bias_model(hier, qw_hat, q1, L), var, c_alpha);
}

RunRecord run_smlmc(const CoupledSampler& sampler, const StandardConfig& cfg, std::uint64_t seed,
                    int threads) {
  cfg.validate();
  const MeshHierarchy& hier = sampler.hierarchy();
  const double q1 = cfg.q1.value_or(sampler.descriptor().q1);
  const int max_level = std::min(cfg.L_max_abs, sampler.max_level());
  const std::int64_t pilot = std::max<std::int64_t>(2, cfg.M_tilde);

  RunRecord rec;
  rec.algorithm = "smlmc";
  rec.sampler = sampler.descriptor().name;
  rec.seed = seed;
  rec.tol = cfg.tol;

  SamplePool pool(sampler, seed, threads);
  try {
    for (int L = 0;; ++L) {
      if (L > max_level) {
        throw Error(ErrorCode::tolerance_unreachable,
                    "level cap " + std::to_string(max_level) + " reached");
      }
      const double w0 = pool.model_work();
      const double c0 = pool.measured_cost();
      IterationTrace t;
      t.index = L;
      t.tol_i = cfg.tol;
      t.L = L;
      t.theta = cfg.theta;
      t.q1 = q1;
      pool.draw(L, pilot);

      std::vector<double> V, W;
      for (int l = 0; l <= L; ++l) {
        V.push_back(pool.cumulative()[static_cast<std::size_t>(l)].variance());
        W.push_back(work_model(hier, l));
      }
      t.M = optimal_samples(cfg.tol, cfg.theta, cfg.c_alpha, V, W);

      std::vector<LevelStats> est;
      for (int l = 0; l <= L; ++l) {
        const auto ul = static_cast<std::size_t>(l);
        if (cfg.reuse_samples) {
          pool.top_up(l, t.M[ul]);
        } else {
          est.push_back(pool.draw(l, std::max<std::int64_t>(2, t.M[ul])));
        }
      }
      if (cfg.reuse_samples) est = pool.cumulative();

      for (int l = 0; l <= L; ++l) {
        const auto& s = est[static_cast<std::size_t>(l)];
        t.M_bar.push_back(s.count());
        t.V.push_back(s.variance());
      }
      t.estimate = estimator_value(est);
      const double var_a = estimator_variance(t.V, t.M_bar);
      t.stat_error = cfg.c_alpha * std::sqrt(var_a);
      bool done = false;
      if (L >= 2) {
        const double qw_hat = qw_estimate_std(est[static_cast<std::size_t>(L)],
                                              est[static_cast<std::size_t>(L - 1)], hier, q1, L);
        t.qw = qw_hat;
        t.qw_theta = qw_hat;
        t.bias = bias_model(hier, qw_hat, q1, L);
        t.error_estimate = error_estimate_std(qw_hat, hier, q1, L, est, cfg.c_alpha);
        done = t.error_estimate <= cfg.tol;
      } else {
        t.error_estimate = -1.0;  // undefined before L = 2
      }
      t.model_work = pool.model_work() - w0;
      t.measured_cost = pool.measured_cost() - c0;

      rec.estimate = t.estimate;
      rec.error_estimate = t.error_estimate;
      rec.estimator_variance = var_a;
      rec.bias = t.bias;
      rec.final_L = L;
      rec.theta_final = cfg.theta;
      rec.levels.clear();
      for (int l = 0; l <= L; ++l) {
        const auto ul = static_cast<std::size_t>(l);
        rec.levels.push_back({l, est[ul].count(), est[ul].mean(), t.V[ul]});
      }
      rec.iterations.push_back(t);
      if (done) break;
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
