#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "mlmc/elliptic1d_sampler.hpp"
#include "mlmc/error.hpp"
#include "mlmc/gbm_sampler.hpp"
#include "mlmc/rng.hpp"
#include "mlmc/sampler.hpp"
#include "mlmc/sampling.hpp"
#include "mlmc/synthetic_sampler.hpp"
#include "mlmc/tridiagonal.hpp"

using namespace mlmc;

namespace {

std::vector<double> normals(std::uint64_t seed, std::size_t n) {
  Stream s(seed, 0, 0);
  std::vector<double> v(n);
  for (auto& x : v) x = s.normal();
  return v;
}

// least-squares slope of -log_beta |y| against level
double decay_rate(const std::vector<double>& y, int first, double beta) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double x = first + static_cast<double>(i);
    const double v = -std::log(std::abs(y[i])) / std::log(beta);
    sx += x;
    sy += v;
    sxx += x * x;
    sxy += x * v;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// mean and variance of g_l over n independent outcomes
std::pair<double, double> functional_moments(const CoupledSampler& c, int level, std::uint64_t seed,
                                             int n) {
  LevelStats st(level);
  std::vector<double> omega(c.outcome_size(level));
  for (int m = 0; m < n; ++m) {
    Stream s(seed, level, static_cast<std::uint64_t>(m));
    for (auto& x : omega) x = s.normal();
    st.add_sample(c.functional(level, omega), 1.0);
  }
  return {st.mean(), st.variance()};
}

}  // namespace

TEST_CASE("philox known answer") {
  const auto z = philox4x32({0, 0, 0, 0}, {0, 0});
  CHECK(z[0] == 0x6627e8d5u);
  CHECK(z[1] == 0xe169c58du);
  CHECK(z[2] == 0xbc57ac4cu);
  CHECK(z[3] == 0x9b00dbd8u);
  const auto f = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                            {0xffffffffu, 0xffffffffu});
  CHECK(f[0] == 0x408f276du);
  CHECK(f[1] == 0x41c83b0eu);
  CHECK(f[2] == 0xa20bc7c6u);
  CHECK(f[3] == 0x6d5451fdu);
  const auto pi = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                             {0xa4093822u, 0x299f31d0u});
  CHECK(pi[0] == 0xd16cfe09u);
  CHECK(pi[1] == 0x94fdccebu);
  CHECK(pi[2] == 0x5001e420u);
  CHECK(pi[3] == 0x24126ea1u);
}

TEST_CASE("normal quantile") {
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
  CHECK(normal_quantile(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-14));
  CHECK(normal_quantile(1e-10) == doctest::Approx(-6.361340902404056).epsilon(1e-13));
  for (double p = 0.001; p < 1.0; p += 0.0137) {
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-13));
  }
}

TEST_CASE("streams are pure functions of seed, level and index") {
  Stream a(7, 3, 11), b(7, 3, 11), c(7, 3, 12), d(7, 4, 11), e(8, 3, 11);
  for (int k = 0; k < 100; ++k) {
    const double x = a.uniform();
    CHECK(x > 0.0);
    CHECK(x < 1.0);
    CHECK(x == b.uniform());
    CHECK(x != c.uniform());
    CHECK(x != d.uniform());
    CHECK(x != e.uniform());
  }
}

TEST_CASE("stream normals have unit moments") {
  const auto v = normals(1, 200000);
  double m = 0, m2 = 0;
  for (double x : v) {
    m += x;
    m2 += x * x;
  }
  m /= v.size();
  m2 /= v.size();
  CHECK(std::abs(m) < 4.0 / std::sqrt(200000.0));
  CHECK(std::abs(m2 - 1.0) < 4.0 * std::sqrt(2.0 / 200000.0));
}

TEST_CASE("GBM closed form matches the reference value") {
  CHECK(GbmSampler::exact_mean(GbmParams{}) == doctest::Approx(1.04505835721856).epsilon(1e-13));
  GbmSampler g;
  CHECK(*g.descriptor().reference == doctest::Approx(1.04505835721856).epsilon(1e-13));
  CHECK(g.hierarchy().h0 == 1.0);
  CHECK(g.hierarchy().beta == 2);
  CHECK(g.hierarchy().gamma == 1.0);
}

TEST_CASE("GBM coarse increments are sums of fine ones") {
  GbmSampler g;
  const auto omega = normals(3, g.outcome_size(5));
  for (int l = 1; l <= 5; ++l) {
    const auto fine = g.increments(l, omega);
    const auto coarse = g.coarsen(fine);
    const auto direct = g.increments(l - 1, omega);
    REQUIRE(coarse.size() == direct.size());
    for (std::size_t i = 0; i < coarse.size(); ++i) {
      CHECK(coarse[i] == fine[2 * i] + fine[2 * i + 1]);
      CHECK(coarse[i] == doctest::Approx(direct[i]).epsilon(1e-14));
    }
    const double sd = std::sqrt(std::accumulate(fine.begin(), fine.end(), 0.0,
                                                [](double s, double x) { return s + x * x; }));
    CHECK(sd > 0.0);
  }
}

TEST_CASE("GBM without volatility is the deterministic Euler difference") {
  GbmParams p;
  p.volatility = 0.0;
  GbmSampler g(p);
  const double disc = std::exp(-p.drift);
  auto euler = [&](int n) { return 10.0 * std::max(std::pow(1.0 + p.drift / n, n) - 1.0, 0.0) * disc; };
  for (int l = 0; l <= 6; ++l) {
    const auto stats = sample_level(g, l, 1, 0, 50).stats;
    CHECK(stats.variance() == doctest::Approx(0.0).epsilon(1e-24));
    const double expect = l == 0 ? euler(1) : euler(1 << l) - euler(1 << (l - 1));
    CHECK(stats.mean() == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("GBM level rates") {
  GbmSampler g;
  std::vector<double> means, vars;
  for (int l = 1; l <= 6; ++l) {
    const auto s = sample_level(g, l, 2024, 0, 100000).stats;
    means.push_back(s.mean());
    vars.push_back(s.variance());
  }
  CHECK(decay_rate(means, 1, 2.0) == doctest::Approx(1.0).epsilon(0.2));
  CHECK(decay_rate(vars, 1, 2.0) == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("sample cost is the model work") {
  GbmSampler g;
  Elliptic1dSampler e;
  std::vector<double> scratch;
  for (int l = 0; l < 5; ++l) {
    Stream s(1, l, 0);
    CHECK(g.sample(l, s, scratch).cost == work_model(g.hierarchy(), l));
    Stream t(1, l, 0);
    CHECK(e.sample(l, t, scratch).cost == work_model(e.hierarchy(), l));
  }
}

TEST_CASE("coupled values telescope to the fine functional") {
  GbmSampler g;
  Elliptic1dSampler e;
  SyntheticSampler s;
  for (const CoupledSampler* c : {static_cast<const CoupledSampler*>(&g),
                                  static_cast<const CoupledSampler*>(&e),
                                  static_cast<const CoupledSampler*>(&s)}) {
    for (int L : {0, 2, 5}) {
      const auto omega = normals(17 + L, c->outcome_size(L));
      double sum = 0.0;
      for (int l = 0; l <= L; ++l) sum += c->coupled(l, omega);
      CHECK(sum == doctest::Approx(c->functional(L, omega)).epsilon(1e-12));
      if (c == &s) CHECK(sum == c->functional(L, omega));
    }
  }
}

TEST_CASE("synthetic sampler follows the error models") {
  SyntheticParams p;
  p.qw = -0.7;
  p.qs = 0.3;
  p.q1 = 1.5;
  p.q2 = 2.0;
  p.h0 = 0.5;
  SyntheticSampler s(p);
  const MeshHierarchy& h = s.hierarchy();
  for (int l = 1; l <= 4; ++l) {
    CHECK(s.level_mean(l) == doctest::Approx(p.qw * weak_term(h, p.q1, l)).epsilon(1e-14));
    CHECK(s.level_variance(l) == doctest::Approx(p.qs / strong_term(h, p.q2, l)).epsilon(1e-14));
    const std::int64_t n = 1000000;
    const auto st = sample_level(s, l, 99, 0, n).stats;
    CHECK(std::abs(st.mean() - s.level_mean(l)) <= 4.0 * std::sqrt(s.level_variance(l) / n));
  }
  // tail of the level means sums to the bias model
  for (int L = 0; L < 6; ++L) {
    double tail = 0.0;
    for (int l = L + 1; l < 60; ++l) tail += s.level_mean(l);
    CHECK(std::abs(tail) == doctest::Approx(bias_model(h, p.qw, p.q1, L)).epsilon(1e-12));
  }
  SyntheticParams z = p;
  z.qs = 0.0;
  SyntheticSampler zs(z);
  const auto st = sample_level(zs, 3, 1, 0, 10).stats;
  CHECK(st.mean() == doctest::Approx(zs.level_mean(3)).epsilon(1e-15));
  CHECK(st.variance() == 0.0);
}

TEST_CASE("tridiagonal solver") {
  const std::vector<double> sub{0, -1, -1}, diag{2, 2, 2}, sup{-1, -1, 0}, rhs{1, 0, 1};
  const auto x = solve_tridiagonal(sub, diag, sup, rhs);
  for (double v : x) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS(solve_tridiagonal(sub, diag, sup, {1.0}));
}

TEST_CASE("elliptic solve has a tiny residual") {
  Elliptic1dSampler e;
  for (int k = 0; k < 5; ++k) {
    const auto omega = normals(100 + k, e.outcome_size(0));
    for (int n : {8, 64, 1024}) {
      const auto sys = e.assemble(n, omega);
      const auto u = e.solve(n, omega);
      REQUIRE(u.size() == static_cast<std::size_t>(n) + 1);
      CHECK(u.front() == 0.0);
      CHECK(u.back() == 0.0);
      double rmax = 0.0, bmax = 0.0;
      for (int i = 1; i < n; ++i) {
        const auto j = static_cast<std::size_t>(i - 1);
        const double r = sys.sub[j] * u[i - 1] + sys.diag[j] * u[i] + sys.sup[j] * u[i + 1] - sys.rhs[j];
        rmax = std::max(rmax, std::abs(r));
        bmax = std::max(bmax, std::abs(sys.rhs[j]));
      }
      CHECK(rmax <= 1e-10 * bmax);
    }
  }
}

TEST_CASE("elliptic constant coefficients are resolved exactly") {
  EllipticParams p;
  p.c1 = 0.0;
  p.c2 = 0.0;
  p.fhat = 0.0;
  Elliptic1dSampler e(p);
  const auto omega = normals(5, e.outcome_size(0));
  for (int n : {8, 32, 256}) {
    const auto u = e.solve(n, omega);
    const double a = p.a0 + 1.0;
    for (int i = 0; i <= n; ++i) {
      const double x = static_cast<double>(i) / n;
      CHECK(u[i] == doctest::Approx(p.f0 * x * (1.0 - x) / (2.0 * a)).epsilon(1e-12));
    }
  }
  for (int l = 1; l <= 5; ++l) CHECK(std::abs(e.coupled(l, omega)) <= 1e-10);
}

TEST_CASE("elliptic coefficient stays positive") {
  Elliptic1dSampler e;
  std::vector<double> omega(e.outcome_size(0), 0.0);
  omega[0] = -40.0;
  omega[1] = 40.0;
  for (double x = 0.0; x <= 1.0; x += 0.01) CHECK(e.coefficient(x, omega) >= 0.5);
}

TEST_CASE("elliptic level rates") {
  Elliptic1dSampler e;
  std::vector<double> means, vars;
  for (int l = 1; l <= 5; ++l) {
    const auto s = sample_level(e, l, 77, 0, 10000).stats;
    means.push_back(s.mean());
    vars.push_back(s.variance());
  }
  CHECK(decay_rate(means, 1, 2.0) == doctest::Approx(2.0).epsilon(0.2));
  CHECK(decay_rate(vars, 1, 2.0) == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("elliptic reference value") {
  Elliptic1dSampler e;
  const double ref = *e.descriptor().reference;
  CHECK(e.reference_value(32, 1 << 12) == doctest::Approx(ref).epsilon(1e-10));
  CHECK(std::abs(e.reference_value(24, 1 << 11) - ref) < 1e-6);
  // plain Monte Carlo on a fine grid
  const auto st = functional_moments(e, 7, 13, 40000);
  CHECK(std::abs(st.first - ref) <= 4.0 * std::sqrt(st.second / 40000.0));
}

TEST_CASE("make_sampler") {
  CHECK(make_sampler({{"name", "gbm"}})->descriptor().name == "gbm");
  CHECK(make_sampler({{"name", "elliptic1d"}, {"params", {{"modes", 2}}}})->outcome_size(0) == 4);
  CHECK(make_sampler({{"name", "synthetic"}, {"params", {{"q1", 2.0}}}})->descriptor().q1 == 2.0);
  auto path = [](const nlohmann::json& j) {
    try {
      make_sampler(j);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::config);
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(path({{"name", "heston"}}).find("/sampler/name") != std::string::npos);
  CHECK(path({{"name", "gbm"}, {"extra", 1}}).find("/sampler/extra") != std::string::npos);
  CHECK(path({{"name", "gbm"}, {"params", {{"drft", 1}}}}).find("drft") != std::string::npos);
  CHECK(path({{"name", "gbm"}, {"params", {{"volatility", "x"}}}}).find("volatility") !=
        std::string::npos);
  CHECK(path(nlohmann::json::array()).find("/sampler") != std::string::npos);
}
