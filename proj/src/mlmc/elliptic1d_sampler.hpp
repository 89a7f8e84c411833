#pragma once

#include <vector>

#include "mlmc/sampler.hpp"

namespace mlmc {

struct EllipticParams {
  double a0 = 0.5;       // a(x) = a0 + exp(Y1 c1 cos(pi x) + Y2 c2 sin(2 pi x))
  double c1 = 0.5;
  double c2 = 0.25;
  double f0 = 10.0;      // f(x) = f0 + fhat sum_k sqrt(lambda_k) cos(k pi x) Z_k
  double fhat = 1.0;
  int modes = 4;
  double decay = 0.125;  // lambda_k = exp(-decay k^2)
  double x0 = 0.5;       // kernel centre
  double sigma2 = 0.01;  // kernel variance
  int cells0 = 8;        // cells on level 0, h0 = 1/cells0

  nlohmann::json to_json() const;
  static EllipticParams from_json(const nlohmann::json& j);
};

// Interior system of the scaled finite-difference operator, unknowns
// u_1..u_{n-1}: sub = -a_{i-1/2}, diag = a_{i-1/2} + a_{i+1/2},
// sup = -a_{i+1/2}, rhs = h^2 f(x_i).
struct EllipticSystem {
  std::vector<double> sub, diag, sup, rhs;
  double h = 0.0;
};

// -(a u')' = f on (0,1), u(0) = u(1) = 0, second-order central differences.
// The quantity of interest is the integral of u against a normalised Gaussian
// kernel, evaluated exactly on the piecewise quadratic interpolant of the
// nodal solution over pairs of cells. omega = (Y1, Y2, Z_0..Z_{K-1}) and does
// not depend on the level.
class Elliptic1dSampler final : public CoupledSampler {
 public:
  explicit Elliptic1dSampler(EllipticParams p = {});

  const SamplerDescriptor& descriptor() const override { return desc_; }
  std::size_t outcome_size(int) const override { return 2 + static_cast<std::size_t>(p_.modes); }
  double functional(int level, std::span<const double> omega) const override;
  double coupled(int level, std::span<const double> omega) const override;
  int max_level() const override { return 16; }
  nlohmann::json params_json() const override { return p_.to_json(); }

  int cells(int level) const { return p_.cells0 << level; }
  double coefficient(double x, std::span<const double> omega) const;
  double forcing(double x, std::span<const double> omega) const;

  EllipticSystem assemble(int cells, std::span<const double> omega) const;
  // Nodal values u_0..u_n including the boundary zeros.
  std::vector<double> solve(int cells, std::span<const double> omega) const;
  double qoi(const std::vector<double>& nodal) const;

  // E[g] by Gauss-Hermite quadrature in (Y1, Y2) with Z = 0 (g is linear in
  // Z) on a grid of the given number of cells.
  double reference_value(int points, int cells) const;

 private:
  EllipticParams p_;
  SamplerDescriptor desc_;
};

// Probabilists' Gauss-Hermite rule: sum w_i f(x_i) ~ E[f(Y)], Y ~ N(0,1).
void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace mlmc
