#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "mlmc/error.hpp"
#include "mlmc/estimator.hpp"
#include "mlmc/level_stats.hpp"
#include "mlmc/synthetic_sampler.hpp"
#include "mlmc/sampling.hpp"

using namespace mlmc;

namespace {

LevelStats from(const std::vector<double>& xs, int level = 0) {
  LevelStats s(level);
  for (double x : xs) s.add_sample(x, 1.0);
  return s;
}

double direct_power_sum(const std::vector<double>& xs, int k) {
  double s = 0.0;
  for (double x : xs) s += std::pow(x, k);
  return s;
}

void check_rel(double a, double b, double tol) {
  CHECK(std::abs(a - b) <= tol * std::max(1.0, std::abs(b)));
}

}  // namespace

TEST_CASE("add_sample") {
  LevelStats s;
  s.add_sample(2.0, 1.0);
  CHECK(s.count() == 1);
  CHECK(s.s1() == 2.0);
  CHECK(s.s2() == 4.0);
  CHECK(s.cost() == 1.0);
  CHECK_THROWS_AS(s.add_sample(std::nan(""), 1.0), Error);
  CHECK_THROWS_AS(s.add_sample(INFINITY, 1.0), Error);
  CHECK(s.count() == 1);
}

TEST_CASE("non-finite sample reports sampling_failure") {
  LevelStats s(3);
  try {
    s.add_sample(INFINITY, 1.0);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::sampling_failure);
  }
}

TEST_CASE("empty stats") {
  LevelStats s;
  CHECK(s.count() == 0);
  CHECK(s.s1() == 0.0);
  CHECK(s.s2() == 0.0);
  CHECK(s.s4() == 0.0);
  CHECK_THROWS_AS(s.mean(), Error);
  s.add_sample(1.0, 1.0);
  CHECK_THROWS_AS(s.variance(), Error);
}

TEST_CASE("mean and variance examples") {
  const auto a = from({1.0, 3.0});
  CHECK(a.mean() == 2.0);
  CHECK(a.variance() == 1.0);
  const auto b = from({0.0, 0.0, 1.0, 1.0});
  CHECK(b.mean() == 0.5);
  CHECK(b.variance() == 0.25);
  const auto c = from(std::vector<double>(37, 0.3));
  CHECK(c.variance() == 0.0);
}

TEST_CASE("power sums match direct summation") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.7, 2.0);
  std::vector<double> xs(5000);
  for (auto& x : xs) x = n(rng);
  const auto s = from(xs);
  check_rel(s.s1(), direct_power_sum(xs, 1), 1e-10);
  check_rel(s.s2(), direct_power_sum(xs, 2), 1e-10);
  check_rel(s.s3(), direct_power_sum(xs, 3), 1e-10);
  check_rel(s.s4(), direct_power_sum(xs, 4), 1e-10);
}

TEST_CASE("merge equals single pass, associative and commutative") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(-1.0, 0.5);
  std::vector<double> a(300), b(17), c(1000);
  for (auto* v : {&a, &b, &c}) for (auto& x : *v) x = n(rng);
  std::vector<double> all = a;
  all.insert(all.end(), b.begin(), b.end());
  all.insert(all.end(), c.begin(), c.end());
  const auto one = from(all);

  auto ab_c = from(a);
  ab_c.merge(from(b));
  ab_c.merge(from(c));
  auto bc = from(b);
  bc.merge(from(c));
  auto a_bc = from(a);
  a_bc.merge(bc);
  auto c_ba = from(c);
  c_ba.merge(from(b));
  c_ba.merge(from(a));

  for (const auto* m : {&ab_c, &a_bc, &c_ba}) {
    CHECK(m->count() == one.count());
    check_rel(m->s1(), one.s1(), 1e-10);
    check_rel(m->s2(), one.s2(), 1e-10);
    check_rel(m->s3(), one.s3(), 1e-10);
    check_rel(m->s4(), one.s4(), 1e-10);
    check_rel(m->cost(), one.cost(), 1e-12);
  }
  LevelStats empty;
  auto copy = one;
  copy.merge(empty);
  CHECK(copy == one);
  empty.merge(one);
  CHECK(empty.count() == one.count());
}

TEST_CASE("variance is never negative") {
  LevelStats s;
  for (int i = 0; i < 1000; ++i) s.add_sample(1e8 + 1e-8, 1.0);
  CHECK(s.variance() >= 0.0);
}

TEST_CASE("optimal_theta examples") {
  const MeshHierarchy h{1.0, 2, 1.0};
  CHECK(optimal_theta(0.5, h, 1.0, 1.0, 3) == doctest::Approx(0.75).epsilon(1e-15));
  // bias = tol/2 and bias = tol
  CHECK(optimal_theta(1.0, h, 1.0, 1.0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(optimal_theta(0.5, h, 1.0, 1.0, 1) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(optimal_theta(0.1, h, 1.0, 1.0, 1) < 0.0);
}

TEST_CASE("optimal_samples examples") {
  const std::vector<double> one{1.0, 1.0};
  const auto M = optimal_samples(1.0, 0.5, 2.0, one, one);
  CHECK(M == std::vector<std::int64_t>{32, 32});
  const std::vector<double> v{3.0}, w{7.0};
  CHECK(optimal_samples(0.1, 0.4, 2.0, v, w)[0] ==
        static_cast<std::int64_t>(std::ceil(std::pow(2.0 / (0.4 * 0.1), 2) * 3.0)));
  CHECK_THROWS_AS(optimal_samples(1.0, 0.0, 2.0, one, one), Error);
  CHECK_THROWS_AS(optimal_samples(1.0, 1.0, 2.0, one, one), Error);
  try {
    optimal_samples(1.0, 1.5, 2.0, one, one);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_split);
  }
}

TEST_CASE("optimal_samples is invariant to scaling W") {
  const std::vector<double> V{1.3, 0.2, 0.05};
  const std::vector<double> W{1.0, 2.0, 4.0};
  std::vector<double> W7 = W;
  for (auto& w : W7) w *= 7.0;
  const auto a = optimal_samples_real(0.01, 0.6, 2.0, V, W);
  const auto b = optimal_samples_real(0.01, 0.6, 2.0, V, W7);
  for (std::size_t l = 0; l < a.size(); ++l) CHECK(a[l] == doctest::Approx(b[l]).epsilon(1e-13));
}

TEST_CASE("zero variance level gets one sample") {
  const std::vector<double> V{1.0, 0.0}, W{1.0, 2.0};
  const auto M = optimal_samples(0.1, 0.5, 2.0, V, W);
  CHECK(M[1] == 1);
}

TEST_CASE("predicted_work examples") {
  const std::vector<double> one{1.0, 1.0};
  CHECK(predicted_work(1.0, 0.5, 2.0, one, one) == doctest::Approx(64.0).epsilon(1e-14));
  const std::vector<double> v{2.0}, w{3.0};
  CHECK(predicted_work(0.2, 0.5, 2.0, v, w) == doctest::Approx(400.0 * 6.0).epsilon(1e-14));
  const std::vector<double> V{1.3, 0.2, 0.05}, W{1.0, 2.0, 4.0};
  CHECK(predicted_work(0.01, 0.6, 2.0, V, W) ==
        doctest::Approx(4.0 * predicted_work(0.02, 0.6, 2.0, V, W)).epsilon(1e-13));
}

TEST_CASE("ceiling keeps the variance constraint") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.01, 2.0), th(0.05, 0.95), lt(-4.0, -0.5);
  for (int trial = 0; trial < 500; ++trial) {
    const int L = static_cast<int>(rng() % 5);
    std::vector<double> V(L + 1), W(L + 1);
    for (int l = 0; l <= L; ++l) {
      V[l] = u(rng);
      W[l] = u(rng) * std::pow(2.0, l);
    }
    const double tol = std::pow(10.0, lt(rng)), theta = th(rng), C = 2.0;
    const auto M = optimal_samples(tol, theta, C, V, W);
    const double bound = std::pow(theta * tol / C, 2);
    CHECK(estimator_variance(V, M) <= bound * (1.0 + 1e-12));

    const auto Mr = optimal_samples_real(tol, theta, C, V, W);
    double work = 0.0;
    for (int l = 0; l <= L; ++l) work += Mr[l] * W[l];
    CHECK(work == doctest::Approx(predicted_work(tol, theta, C, V, W)).epsilon(1e-12));
  }
}

TEST_CASE("allocate bundles theta, M and work") {
  const std::vector<double> V{1.0, 0.5}, W{1.0, 2.0};
  const auto a = allocate(0.1, 0.7, 2.0, V, W);
  CHECK(a.theta == 0.7);
  CHECK(a.M == optimal_samples(0.1, 0.7, 2.0, V, W));
  CHECK(a.predicted_work == predicted_work(0.1, 0.7, 2.0, V, W));
}

TEST_CASE("estimator_value examples") {
  std::vector<LevelStats> one{from({5.0})};
  CHECK(estimator_value(one) == 5.0);
  std::vector<LevelStats> two{from({1.0, 1.0}), from({0.0, 0.5}, 1)};
  CHECK(estimator_value(two) == 1.25);
  std::vector<LevelStats> gap{from({1.0}), LevelStats(1)};
  try {
    estimator_value(gap);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::insufficient_samples);
    CHECK(std::string(e.what()).find('1') != std::string::npos);
  }
}

TEST_CASE("estimator_value converges to the exact level means") {
  SyntheticParams p;
  SyntheticSampler s(p);
  SamplePool pool(s, 4, 1);
  const int L = 3;
  const std::int64_t n = 100000;
  double exact = 0.0, se2 = 0.0;
  for (int l = 0; l <= L; ++l) {
    pool.draw(l, n);
    exact += s.level_mean(l);
    se2 += s.level_variance(l) / static_cast<double>(n);
  }
  const auto st = pool.cumulative();
  const double a = estimator_value(std::span<const LevelStats>(st.data(), L + 1));
  CHECK(std::abs(a - exact) <= 3.0 * std::sqrt(se2));
}

TEST_CASE("estimator_variance examples") {
  const std::vector<double> v4{4.0}, m16{16.0};
  CHECK(estimator_variance(v4, m16) == 0.25);
  const std::vector<double> V{1.0, 1.0};
  const std::vector<std::int64_t> M{2, 2}, M2{4, 4};
  CHECK(estimator_variance(V, M) == 1.0);
  CHECK(estimator_variance(V, M2) == 0.5);
}

TEST_CASE("total_error_estimate examples") {
  CHECK(total_error_estimate(0.0, 1.0, 2.0) == 2.0);
  CHECK(total_error_estimate(0.1, 0.0025, 2.0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(total_error_estimate(0.3, 0.0, 2.0) == 0.3);
}
