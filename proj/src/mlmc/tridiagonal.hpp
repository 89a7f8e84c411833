#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace mlmc {

// Thomas algorithm for sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i].
// sub[0] and sup[n-1] are ignored. No pivoting; intended for the diagonally
// dominant systems produced by the elliptic discretisation.
inline std::vector<double> solve_tridiagonal(const std::vector<double>& sub,
                                             const std::vector<double>& diag,
                                             const std::vector<double>& sup,
                                             const std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  if (sub.size() != n || sup.size() != n || rhs.size() != n) {
    throw std::invalid_argument("solve_tridiagonal: size mismatch");
  }
  std::vector<double> c(n), d(n), x(n);
  if (n == 0) return x;
  double m = diag[0];
  c[0] = sup[0] / m;
  d[0] = rhs[0] / m;
  for (std::size_t i = 1; i < n; ++i) {
    m = diag[i] - sub[i] * c[i - 1];
    c[i] = sup[i] / m;
    d[i] = (rhs[i] - sub[i] * d[i - 1]) / m;
  }
  x[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

}  // namespace mlmc
