#pragma once

#include <functional>
#include <vector>

namespace mlmc {

struct SimplexOptions {
  int max_evals = 200;
  double diameter_tol = 1e-4;
  double initial_step = 0.5;
};

struct SimplexResult {
  std::vector<double> x;
  double f = 0.0;
  int evals = 0;
  bool converged = false;
};

// Nelder-Mead minimization (reflection, expansion, contraction, shrink).
// Stops when the simplex diameter drops below diameter_tol or the
// evaluation budget is spent.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x0, const SimplexOptions& opt = {});

}  // namespace mlmc
