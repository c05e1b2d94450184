#pragma once

#include <optional>
#include <vector>

#include "magic/linalg.hpp"

namespace magic {

// Potts model on a degree-k regular graph with the product ansatz
// |phi> = alpha |Z=1> + sqrt(1 - alpha^2) |perp>.
struct MeanFieldConfig {
  int q = 3;
  int k = 2;
  double alpha_step = 1e-4;
  double alpha_tol = 1e-10;
  double theta_step = 1e-4;

  void validate() const;
};

struct MeanFieldPoint {
  double theta = 0.0;
  double alpha_star = 0.0;
  double z_expect = 0.0;
  double x_expect = 0.0;
  double energy_per_vertex = 0.0;
  bool tie = false;  // a second basin reached the same energy; the larger alpha was kept
  std::optional<double> mana_per_vertex;
};

// Real q-dimensional state; |Z=1> is basis state 0 and |X=1> the uniform state.
RVec ansatz_state(double alpha, int q);

struct Expectations {
  double z;  // (q alpha^2 - 1) / (q - 1) = <phi| (Z + Z^dag) / 2 |phi>
  double x;  // <phi| (X + X^dag) / 2 |phi>
};
Expectations expectations(double alpha, int q);
// Same quantities by dense inner products with the clock and shift matrices.
Expectations expectations_direct(double alpha, int q);

double energy_per_vertex(double alpha, double theta, int q, int k);

MeanFieldPoint optimize_alpha(double theta, const MeanFieldConfig& cfg);

enum class TransitionOrder { first, second };
struct Transition {
  double theta_c = 0.0;
  TransitionOrder order = TransitionOrder::second;
  double jump = 0.0;         // <Z> across the refined bracket
  double bracket_width = 0.0;
};
// Throws NumericalError if no onset is found in (0, pi/2).
Transition transition_theta(const MeanFieldConfig& cfg);

// Per-vertex mana of the optimal single-site state; q must be an odd prime.
double meanfield_mana(const MeanFieldPoint& point, int q);

// Whole scan: one point per theta, with mana when q is an odd prime.
std::vector<MeanFieldPoint> meanfield_scan(const MeanFieldConfig& cfg, const std::vector<double>& thetas,
                                           int threads = 1);

// arccot(k / 2), the large-q limit of the transition.
double large_q_theta_c(int k);

}  // namespace magic
