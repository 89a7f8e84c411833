#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "mlmc/diagnostics.hpp"
#include "mlmc/error.hpp"
#include "mlmc/rng.hpp"

using namespace mlmc;

namespace {

RunRecord record(double estimate, double var, double work = 1.0, const char* status = "ok") {
  RunRecord r;
  r.status = status;
  r.estimate = estimate;
  r.estimator_variance = var;
  r.total_model_work = work;
  return r;
}

}  // namespace

TEST_CASE("percentile interpolates order statistics") {
  const std::vector<double> v{4.0, 1.0, 3.0, 2.0};
  CHECK(percentile(v, 0.0) == 1.0);
  CHECK(percentile(v, 1.0) == 4.0);
  CHECK(percentile(v, 0.5) == 2.5);
  CHECK(percentile({7.0}, 0.95) == 7.0);
  CHECK_THROWS_AS(percentile({}, 0.5), Error);
  std::vector<double> w(100);
  for (int i = 0; i < 100; ++i) w[i] = i;
  const auto p = work_percentiles(w);
  CHECK(p.p5 == doctest::Approx(4.95));
  CHECK(p.p50 == doctest::Approx(49.5));
  CHECK(p.p95 == doctest::Approx(94.05));
}

TEST_CASE("confidence_table") {
  const double tol = 0.1, ref = 1.0;
  std::vector<RunRecord> zero{record(1.0, 1.0), record(1.0, 1.0)};
  CHECK(confidence_table(zero, ref, tol).exceed_fraction == 0.0);

  std::vector<RunRecord> half{record(1.05, 1.0, 10.0), record(0.85, 1.0, 30.0),
                              record(9.0, 1.0, 1.0, "tolerance_unreachable")};
  const auto s = confidence_table(half, ref, tol);
  CHECK(s.exceed_fraction == 0.5);
  CHECK(s.runs == 2);
  CHECK(s.failed == 1);
  CHECK(s.errors[0] == doctest::Approx(0.05));
  CHECK(s.errors[1] == doctest::Approx(-0.15));
  CHECK(s.work.p50 == 20.0);
  CHECK(s.work.p5 <= s.work.p50);
  CHECK(s.work.p50 <= s.work.p95);
}

TEST_CASE("complexity_fit recovers exact power laws") {
  const std::vector<double> tols{0.1, 0.03, 0.01, 0.003, 0.001};
  std::vector<double> w0, w2;
  for (double t : tols) {
    w0.push_back(5.0 * std::pow(t, -2.0));
    w2.push_back(3.0 * std::pow(t, -1.5) * std::pow(std::log(t), 2));
  }
  const auto f0 = complexity_fit(tols, w0, 0.0);
  CHECK(std::abs(f0.s1_hat - 2.0) < 1e-6);
  CHECK(f0.residual < 1e-9);
  CHECK(f0.intercept == doctest::Approx(std::log(5.0)).epsilon(1e-9));
  const auto f2 = complexity_fit(tols, w2, 2.0);
  CHECK(std::abs(f2.s1_hat - 1.5) < 1e-6);
  CHECK(f2.s2 == 2.0);

  const std::vector<double> same{0.1, 0.1, 0.1}, w{1.0, 2.0, 3.0};
  CHECK_THROWS_AS(complexity_fit(same, w, 0.0), Error);
  const std::vector<double> two{0.1, 0.01};
  CHECK_THROWS_AS(complexity_fit(two, std::vector<double>{1.0, 2.0}, 0.0), Error);
}

TEST_CASE("ks statistic small cases") {
  CHECK(ks_statistic_normal({0.0}) == doctest::Approx(0.5).epsilon(1e-15));
  const double d = ks_statistic_normal({-1.0, 1.0});
  CHECK(d == doctest::Approx(0.5 - normal_cdf(-1.0)).epsilon(1e-14));
  CHECK(ks_statistic_normal({1.0, -1.0}) == d);
}

TEST_CASE("ks statistic is calibrated on normal data") {
  std::mt19937_64 rng(123);
  std::normal_distribution<double> z;
  const int n = 100, trials = 400;
  int below = 0;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> v(n);
    for (auto& x : v) x = z(rng);
    if (ks_statistic_normal(v) < 1.63 / std::sqrt(static_cast<double>(n))) ++below;
  }
  CHECK(below >= 0.95 * trials);

  // a shifted sample is rejected
  std::vector<double> v(n);
  for (auto& x : v) x = z(rng) + 1.0;
  CHECK(ks_statistic_normal(v) > 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("normality_check") {
  std::vector<RunRecord> rs;
  for (int i = 0; i < 30; ++i) rs.push_back(record(2.0 + 0.1 * (i - 14.5), 0.01));
  rs.push_back(record(5.0, 0.0));
  rs.push_back(record(5.0, 1.0, 1.0, "iteration_limit"));
  const auto a = normality_check(rs, 2.0);
  CHECK(a.excluded == 1);
  CHECK(a.sorted.size() == 30);
  CHECK(std::is_sorted(a.sorted.begin(), a.sorted.end()));
  CHECK(a.sorted.front() == doctest::Approx(-14.5));
  CHECK(!a.degenerate);

  std::vector<RunRecord> shuffled = rs;
  std::mt19937_64 rng(1);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto b = normality_check(shuffled, 2.0);
  CHECK(b.ks_statistic == a.ks_statistic);
  CHECK(b.sorted == a.sorted);

  std::vector<RunRecord> flat(25, record(2.0, 0.5));
  const auto c = normality_check(flat, 2.0);
  CHECK(c.degenerate);
  CHECK(c.ks_statistic == doctest::Approx(0.5));
}

TEST_CASE("estimator_accuracy_diag") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> z(0.3, 2.0);
  std::vector<LevelStats> st;
  for (int l = 0; l < 4; ++l) {
    LevelStats s(l);
    for (int i = 0; i < 200000; ++i) s.add_sample(z(rng), 1.0);
    st.push_back(s);
  }
  ModelParams p;
  p.q1 = 1.0;
  p.q2 = 2.0;
  const MeshHierarchy h{1.0, 2, 1.0};
  const auto d = estimator_accuracy_diag(st, p, h);
  REQUIRE(d.size() == 4);
  for (const auto& a : d) {
    const double M = static_cast<double>(a.count);
    CHECK(a.kurtosis == doctest::Approx(3.0).epsilon(0.03));
    CHECK(a.variance_rel_error2 * M == doctest::Approx(2.0).epsilon(0.05));
    CHECK(a.qw_factor == doctest::Approx(1.0 / M).epsilon(1e-14));  // q2 = 2 q1
  }
  p.q2 = 1.0;
  const auto g = estimator_accuracy_diag(st, p, h);
  for (int l = 1; l < 4; ++l) CHECK(g[l].qw_factor == doctest::Approx(2.0 * g[l - 1].qw_factor));

  // squared relative error of the sample variance against a direct oracle
  const std::vector<double> xs{0.1, -0.4, 2.0, 0.7, 1.1, -0.3};
  LevelStats s;
  for (double x : xs) s.add_sample(x, 1.0);
  const double M = xs.size();
  double mean = 0.0;
  for (double x : xs) mean += x / M;
  double c2 = 0.0, c4 = 0.0;
  for (double x : xs) {
    c2 += std::pow(x - mean, 2) / M;
    c4 += std::pow(x - mean, 4) / M;
  }
  const double expect = (M - 1) * (M - 1) / (M * M * M) * (c4 / (c2 * c2) - (M - 3) / (M - 1));
  const std::vector<LevelStats> one{s};
  CHECK(estimator_accuracy_diag(one, p, h)[0].variance_rel_error2 ==
        doctest::Approx(expect).epsilon(1e-10));

  LevelStats thin;
  for (int i = 0; i < 3; ++i) thin.add_sample(i, 1.0);
  const std::vector<LevelStats> bad{thin};
  CHECK_THROWS_AS(estimator_accuracy_diag(bad, p, h), Error);
}
