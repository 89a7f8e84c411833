#include "mlmc/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mlmc {

namespace {

double diameter(const std::vector<std::vector<double>>& pts) {
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < pts[i].size(); ++k) {
        const double t = pts[i][k] - pts[j][k];
        s += t * t;
      }
      d = std::max(d, std::sqrt(s));
    }
  }
  return d;
}

}  // namespace

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x0, const SimplexOptions& opt) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> pts(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += opt.initial_step;

  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    const double v = f(x);
    return std::isnan(v) ? HUGE_VAL : v;
  };
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(pts[i]);

  std::vector<std::size_t> order(n + 1);
  bool converged = false;
  auto sort_pts = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
    std::vector<std::vector<double>> p2(n + 1);
    std::vector<double> f2(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      p2[i] = pts[order[i]];
      f2[i] = fv[order[i]];
    }
    pts.swap(p2);
    fv.swap(f2);
  };

  auto affine = [&](const std::vector<double>& c, const std::vector<double>& w, double t) {
    std::vector<double> r(n);
    for (std::size_t k = 0; k < n; ++k) r[k] = c[k] + t * (w[k] - c[k]);
    return r;
  };

  while (true) {
    sort_pts();
    if (diameter(pts) < opt.diameter_tol) {
      converged = true;
      break;
    }
    // A step costs at most n + 2 evaluations (reflect, contract, shrink).
    if (evals + static_cast<int>(n) + 2 > opt.max_evals) break;

    std::vector<double> c(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) c[k] += pts[i][k] / static_cast<double>(n);

    const auto xr = affine(c, pts[n], -1.0);
    const double fr = eval(xr);
    if (fr < fv[0]) {
      const auto xe = affine(c, pts[n], -2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[n] = xe;
        fv[n] = fe;
      } else {
        pts[n] = xr;
        fv[n] = fr;
      }
      continue;
    }
    if (fr < fv[n - 1]) {
      pts[n] = xr;
      fv[n] = fr;
      continue;
    }
    const bool outside = fr < fv[n];
    const auto xc = outside ? affine(c, xr, 0.5) : affine(c, pts[n], 0.5);
    const double fc = eval(xc);
    if (fc < (outside ? fr : fv[n])) {
      pts[n] = xc;
      fv[n] = fc;
      continue;
    }
    for (std::size_t i = 1; i <= n; ++i) {
      pts[i] = affine(pts[0], pts[i], 0.5);
      fv[i] = eval(pts[i]);
    }
  }

  return {pts[0], fv[0], evals, converged};
}

}  // namespace mlmc
