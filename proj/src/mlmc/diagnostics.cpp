#include "mlmc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "mlmc/error.hpp"
#include "mlmc/rng.hpp"

namespace mlmc {

double percentile(std::vector<double> v, double p) {
  if (v.empty()) throw Error(ErrorCode::insufficient_samples, "percentile of empty set");
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double f = pos - static_cast<double>(lo);
  return v[lo] + f * (v[hi] - v[lo]);
}

Percentiles work_percentiles(std::span<const double> works) {
  std::vector<double> v(works.begin(), works.end());
  return {percentile(v, 0.05), percentile(v, 0.5), percentile(v, 0.95)};
}

double ks_statistic_normal(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double F = normal_cdf(v[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  return d;
}

NormalityResult normality_check(std::span<const RunRecord> records, double reference) {
  NormalityResult out;
  for (const auto& r : records) {
    if (!r.ok()) continue;
    if (!(r.estimator_variance > 0.0)) {
      ++out.excluded;
      continue;
    }
    out.sorted.push_back((r.estimate - reference) / std::sqrt(r.estimator_variance));
  }
  std::sort(out.sorted.begin(), out.sorted.end());
  out.degenerate = out.sorted.size() < 2 || out.sorted.front() == out.sorted.back();
  out.ks_statistic = ks_statistic_normal(out.sorted);
  return out;
}

EnsembleSummary confidence_table(std::span<const RunRecord> records, double reference, double tol) {
  EnsembleSummary s;
  s.tol = tol;
  int exceeded = 0;
  for (const auto& r : records) {
    if (!r.ok()) {
      ++s.failed;
      continue;
    }
    ++s.runs;
    const double e = r.estimate - reference;
    s.errors.push_back(e);
    s.error_estimates.push_back(r.error_estimate);
    s.works.push_back(r.total_model_work);
    s.costs.push_back(r.total_measured_cost);
    if (std::abs(e) > tol) ++exceeded;
  }
  if (s.runs > 0) {
    s.exceed_fraction = static_cast<double>(exceeded) / s.runs;
    s.work = work_percentiles(s.works);
  }
  const NormalityResult nr = normality_check(records, reference);
  s.ks_statistic = nr.ks_statistic;
  s.ks_excluded = nr.excluded;
  return s;
}

ComplexityFit complexity_fit(std::span<const double> tols, std::span<const double> works, double s2) {
  if (tols.size() != works.size()) {
    throw Error(ErrorCode::invalid_argument, "complexity fit: size mismatch");
  }
  std::set<double> distinct(tols.begin(), tols.end());
  if (distinct.size() < 3) {
    throw Error(ErrorCode::invalid_argument, "complexity fit needs at least 3 distinct tolerances");
  }
  const std::size_t n = tols.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(tols[i] > 0.0 && tols[i] < 1.0) || !(works[i] > 0.0)) {
      throw Error(ErrorCode::invalid_argument, "complexity fit: need 0 < tol < 1 and work > 0");
    }
    x[i] = -std::log(tols[i]);
    y[i] = std::log(works[i]) - s2 * std::log(std::abs(std::log(tols[i])));
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  ComplexityFit f;
  f.s2 = s2;
  f.s1_hat = sxy / sxx;
  f.intercept = my - f.s1_hat * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - f.intercept - f.s1_hat * x[i];
    rss += r * r;
  }
  f.residual = std::sqrt(rss / static_cast<double>(n));
  return f;
}

std::vector<LevelAccuracy> estimator_accuracy_diag(std::span<const LevelStats> stats,
                                                   const ModelParams& params,
                                                   const MeshHierarchy& hier) {
  std::vector<LevelAccuracy> out;
  for (std::size_t l = 0; l < stats.size(); ++l) {
    const auto& s = stats[l];
    if (s.count() < 4) {
      throw Error(ErrorCode::insufficient_samples,
                  "accuracy diagnostic needs 4 samples on level " + std::to_string(l));
    }
    const double M = static_cast<double>(s.count());
    const double V = s.m2() / M;
    const double m4 = s.m4() / M;
    LevelAccuracy a;
    a.level = static_cast<int>(l);
    a.count = s.count();
    a.kurtosis = V > 0.0 ? m4 / (V * V) : 0.0;
    a.variance_rel_error2 =
        (M - 1.0) * (M - 1.0) / (M * M * M) * (a.kurtosis - (M - 3.0) / (M - 1.0));
    a.qw_factor = std::pow(static_cast<double>(hier.beta),
                           static_cast<double>(l) * (2.0 * params.q1 - params.q2)) / M;
    out.push_back(a);
  }
  return out;
}

}  // namespace mlmc
