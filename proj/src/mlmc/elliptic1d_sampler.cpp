#include "mlmc/elliptic1d_sampler.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mlmc/error.hpp"
#include "mlmc/tridiagonal.hpp"

namespace mlmc {

nlohmann::json EllipticParams::to_json() const {
  return {{"a0", a0},         {"c1", c1},       {"c2", c2},         {"f0", f0},
          {"fhat", fhat},     {"modes", modes}, {"decay", decay},   {"x0", x0},
          {"sigma2", sigma2}, {"cells0", cells0}};
}

EllipticParams EllipticParams::from_json(const nlohmann::json& j) {
  EllipticParams p;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const auto& v = it.value();
    const std::string path = "/sampler/params/" + k;
    if (k == "modes" || k == "cells0") {
      if (!v.is_number_integer()) throw Error(ErrorCode::config, path + ": expected integer");
      const long long n = v.get<long long>();
      if (k == "modes" && (n < 0 || n > 64)) throw Error(ErrorCode::config, path + ": must be in [0, 64]");
      if (k == "cells0" && (n < 2 || n % 2 != 0 || n > 4096)) {
        throw Error(ErrorCode::config, path + ": must be an even integer in [2, 4096]");
      }
      (k == "modes" ? p.modes : p.cells0) = static_cast<int>(n);
      continue;
    }
    if (!v.is_number()) throw Error(ErrorCode::config, path + ": expected number");
    const double x = v.get<double>();
    if (k == "a0") p.a0 = x;
    else if (k == "c1") p.c1 = x;
    else if (k == "c2") p.c2 = x;
    else if (k == "f0") p.f0 = x;
    else if (k == "fhat") p.fhat = x;
    else if (k == "decay") p.decay = x;
    else if (k == "x0") p.x0 = x;
    else if (k == "sigma2") p.sigma2 = x;
    else throw Error(ErrorCode::config, path + ": unknown parameter");
  }
  if (!(p.a0 > 0.0)) throw Error(ErrorCode::config, "/sampler/params/a0: must be positive");
  if (!(p.sigma2 > 0.0)) throw Error(ErrorCode::config, "/sampler/params/sigma2: must be positive");
  if (!(p.decay >= 0.0)) throw Error(ErrorCode::config, "/sampler/params/decay: must be >= 0");
  return p;
}

void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "gauss_hermite: n must be positive");
  const double pim4 = 0.7511255444649425;  // pi^-1/4
  std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    else if (i == 1) z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2) z = 1.86 * z - 0.86 * x[0];
    else if (i == 3) z = 1.91 * z - 0.91 * x[1];
    else z = 2.0 * z - x[static_cast<std::size_t>(i - 2)];
    double pp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    x[static_cast<std::size_t>(i)] = z;
    x[static_cast<std::size_t>(n - 1 - i)] = -z;
    w[static_cast<std::size_t>(i)] = 2.0 / (pp * pp);
    w[static_cast<std::size_t>(n - 1 - i)] = w[static_cast<std::size_t>(i)];
  }
  nodes.resize(x.size());
  weights.resize(w.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    nodes[i] = std::numbers::sqrt2 * x[i];
    weights[i] = w[i] / std::sqrt(std::numbers::pi);
  }
}

Elliptic1dSampler::Elliptic1dSampler(EllipticParams p) : p_(p) {
  desc_.name = "elliptic1d";
  desc_.q1 = 2.0;
  desc_.q2 = 4.0;
  desc_.hier = {1.0 / p_.cells0, 2, 1.0};
  desc_.rate_prior = {std::log(2.0), std::log(0.4), 1.0, 1.0};
  nominal_complexity(desc_.q1, desc_.q2, desc_.hier.gamma, desc_.s1, desc_.s2);
  desc_.reference = reference_value(24, 1 << 12);
}

double Elliptic1dSampler::coefficient(double x, std::span<const double> omega) const {
  const double pi = std::numbers::pi;
  return p_.a0 + std::exp(omega[0] * p_.c1 * std::cos(pi * x) + omega[1] * p_.c2 * std::sin(2.0 * pi * x));
}

double Elliptic1dSampler::forcing(double x, std::span<const double> omega) const {
  double s = 0.0;
  for (int k = 0; k < p_.modes; ++k) {
    s += std::sqrt(std::exp(-p_.decay * k * k)) * std::cos(k * std::numbers::pi * x) *
         omega[2 + static_cast<std::size_t>(k)];
  }
  return p_.f0 + p_.fhat * s;
}

EllipticSystem Elliptic1dSampler::assemble(int n, std::span<const double> omega) const {
  if (omega.size() < outcome_size(0)) {
    throw Error(ErrorCode::invalid_argument, "elliptic1d: outcome too short");
  }
  EllipticSystem sys;
  sys.h = 1.0 / n;
  const std::size_t m = static_cast<std::size_t>(n - 1);
  sys.sub.assign(m, 0.0);
  sys.diag.assign(m, 0.0);
  sys.sup.assign(m, 0.0);
  sys.rhs.assign(m, 0.0);
  std::vector<double> amid(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double a = coefficient((i + 0.5) * sys.h, omega);
    if (!(a > 0.0)) throw Error(ErrorCode::sampling_failure, "elliptic1d: non-positive coefficient");
    amid[static_cast<std::size_t>(i)] = a;
  }
  for (std::size_t i = 0; i < m; ++i) {
    const double aw = amid[i], ae = amid[i + 1];
    sys.sub[i] = -aw;
    sys.diag[i] = aw + ae;
    sys.sup[i] = -ae;
    sys.rhs[i] = sys.h * sys.h * forcing(static_cast<double>(i + 1) * sys.h, omega);
  }
  return sys;
}

std::vector<double> Elliptic1dSampler::solve(int n, std::span<const double> omega) const {
  const EllipticSystem sys = assemble(n, omega);
  const auto inner = solve_tridiagonal(sys.sub, sys.diag, sys.sup, sys.rhs);
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0);
  for (std::size_t i = 0; i < inner.size(); ++i) u[i + 1] = inner[i];
  return u;
}

double Elliptic1dSampler::qoi(const std::vector<double>& u) const {
  const std::size_t n = u.size() - 1;
  const double h = 1.0 / static_cast<double>(n);
  const double sigma = std::sqrt(p_.sigma2);
  // Work in t = (x - x0)/sigma; the kernel becomes the standard normal pdf.
  double total = 0.0;
  for (std::size_t j = 0; j + 2 <= n; j += 2) {
    const double t0 = (static_cast<double>(j) * h - p_.x0) / sigma;
    const double t1 = (static_cast<double>(j + 1) * h - p_.x0) / sigma;
    const double t2 = (static_cast<double>(j + 2) * h - p_.x0) / sigma;
    if (t0 > 40.0 || t2 < -40.0) continue;
    const double d1 = (u[j + 1] - u[j]) / (t1 - t0);
    const double d12 = (u[j + 2] - u[j + 1]) / (t2 - t1);
    const double d2 = (d12 - d1) / (t2 - t0);
    const double c2 = d2;
    const double c1 = d1 - d2 * (t0 + t1);
    const double c0 = u[j] - d1 * t0 + d2 * t0 * t1;
    const double pa = normal_pdf(t0), pb = normal_pdf(t2);
    const double i0 = normal_cdf(t2) - normal_cdf(t0);
    const double i1 = pa - pb;
    const double i2 = i0 + t0 * pa - t2 * pb;
    total += c0 * i0 + c1 * i1 + c2 * i2;
  }
  return total;
}

double Elliptic1dSampler::functional(int level, std::span<const double> omega) const {
  return qoi(solve(cells(level), omega));
}

double Elliptic1dSampler::coupled(int level, std::span<const double> omega) const {
  const double gf = functional(level, omega);
  return level == 0 ? gf : gf - functional(level - 1, omega);
}

double Elliptic1dSampler::reference_value(int points, int n) const {
  std::vector<double> x, w;
  gauss_hermite(points, x, w);
  std::vector<double> omega(outcome_size(0), 0.0);
  double e = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t k = 0; k < x.size(); ++k) {
      omega[0] = x[i];
      omega[1] = x[k];
      e += w[i] * w[k] * qoi(solve(n, omega));
    }
  }
  return e;
}

}  // namespace mlmc
