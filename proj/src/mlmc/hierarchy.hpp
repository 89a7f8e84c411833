#pragma once

#include <vector>

namespace mlmc {

// Geometric mesh family h_l = h0 * beta^-l with per-sample work model
// W_l = h_l^-gamma. Levels are 0-indexed. All exponents are real-valued and
// evaluated through std::pow.
struct MeshHierarchy {
  double h0 = 1.0;
  int beta = 2;
  double gamma = 1.0;

  // Throws Error(invalid_argument) unless h0 > 0, beta > 1, gamma > 0.
  void validate() const;

  friend bool operator==(const MeshHierarchy&, const MeshHierarchy&) = default;
};

double mesh_size(const MeshHierarchy& hier, int level);

// Model work per sample, h_l^-gamma.
double work_model(const MeshHierarchy& hier, int level);

// w_l(q1) = h0^q1 beta^(-l q1) (beta^q1 - 1); E[G_l] ~ QW w_l(q1) for l > 0.
double weak_term(const MeshHierarchy& hier, double q1, int level);

// s_l(q2) = h0^-q2 beta^(l q2); Var[G_l] ~ QS / s_l(q2) for l > 0.
double strong_term(const MeshHierarchy& hier, double q2, int level);

// |QW| h0^q1 beta^(-L q1).
double bias_model(const MeshHierarchy& hier, double qw, double q1, int num_levels);

// Calibrated problem parameters. qw is signed; v holds per-level variance
// estimates V_0..V_L.
struct ModelParams {
  double q1 = 1.0;
  double q2 = 1.0;
  double qw = 1.0;
  double qs = 1.0;
  std::vector<double> v;

  // Checks 0 < q2 <= 2 q1, qw != 0 and qs > 0.
  void validate() const;
};

}  // namespace mlmc
