#pragma once

#include <cstdint>
#include <vector>

#include "magic/linalg.hpp"

namespace magic {

// Past domain of dependence after k layer pairs: the newest isometry and
// disentangler rows, the totals over all rows, and the number of covered sites.
struct MERACount {
  int k = 0;
  std::int64_t n_tri = 0;  // isometries in layer 2k - 1 (0 for k = 0)
  std::int64_t n_sq = 0;   // disentanglers in layer 2k
  std::int64_t ell = 0;
  std::int64_t total_tri = 0;
  std::int64_t total_sq = 0;

  friend bool operator==(const MERACount&, const MERACount&) = default;
};

// Closed-form solution of the layer recursion.
MERACount domain_counts(int k);
// Builds the binary MERA graph, grows the domain row by row and checks, tensor by
// tensor, that exactly the grown set has its whole downward light cone inside the
// region. Throws ValidationError for k > 12 and NumericalError if the check fails.
MERACount mera_graph_oracle(int k);

// Gate-count mana M = m_sq * total_sq + m_tri * total_tri for the k-th domain.
double domain_mana(int k, double m_sq, double m_tri);

struct MERAManaParams {
  double m_sq = 0.4;
  double m_tri = 0.3;
  double m_max = 0.5 * 1.0986122886681098;  // ln 3 / 2
  double nu = 0.0;                          // no default; must be set for the quasi-MERA curve

  void validate() const;
};

// m(ell) for ell >= 2, clamped at 0; ell = +infinity gives m_sq + m_tri.
double finite_mana_prediction(double ell, const MERAManaParams& p);
// min(m_max, (m_tri + m_sq)(1 - |theta - pi/4|^nu)), clamped at 0. Needs nu > 0.
double quasi_mera_prediction(double theta, const MERAManaParams& p);

struct MERAFit {
  double m_sq = 0.0;
  double m_tri = 0.0;
  double rms = 0.0;
};
// Unclamped least squares of finite_mana_prediction against (ell, density) samples.
MERAFit fit_mera_params(const std::vector<int>& ells, const std::vector<double>& densities);

// ---- Descending channel on two-qudit operators ----

// vec(X)[i * D + j] = X(i, j) with D = d^2; the superoperator acts as vec(D[X]) = S vec(X).
struct ChannelSpec {
  int d = 3;
  Mat superop;
  Mat rho1;  // single-site fixed-point hint

  // Trace preservation (1e-10) and Choi positivity (1e-9); throws ValidationError.
  void validate() const;
  Mat apply(const Mat& x) const;
  Mat fixed_point() const;  // rho1 x rho1
};

Mat vectorize(const Mat& x);
Mat unvectorize(const Mat& v, int dim);
Mat choi_matrix(const ChannelSpec& c);

// Illustrative example, not a Potts MERA channel: X -> (1 - p) X + p Tr(X) rho1 on
// each site independently.
ChannelSpec depolarizing_product_channel(double p, const Mat& rho1);
ChannelSpec identity_channel(int d);

struct ChannelSpectrum {
  std::vector<cplx> eigenvalues;  // sorted by decreasing modulus
  double lambda1 = 0.0;           // largest modulus below the leading eigenvalue
  double two_delta = 0.0;         // -lg lambda1
  double fixed_point_residual = 0.0;
  bool degenerate = false;        // leading eigenvalue 1 is not isolated: no decay
};
ChannelSpectrum channel_spectrum(const ChannelSpec& c);

// D^k[rho]; throws NumericalError if trace or positivity drifts beyond 1e-9.
Mat iterate_channel(const ChannelSpec& c, const Mat& rho, int k);

// -slope of lg ||D^k[rho] - rho1 x rho1||_F against k over [k_min, k_max].
double fitted_decay_rate(const ChannelSpec& c, const Mat& rho, int k_min, int k_max);

}  // namespace magic
