#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "magic/linalg.hpp"
#include "magic/qudit.hpp"

namespace magic {

// Tolerances that define a valid density matrix.
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kNegEigenTol = 1e-9;
// Mana below this counts as numerically zero (sudden-death detection).
inline constexpr double kManaZero = 1e-12;

// Number of q-dimensional sites in a Hilbert space of dimension `dim`; throws if not a power of q.
int sites_for_dim(std::int64_t dim, int q);

class DensityMatrix {
 public:
  enum class Check { full, structural };

  // Validates Hermiticity and unit trace. With Check::full, also the spectrum:
  // eigenvalues in [-1e-9, 0) are clipped to 0 and the matrix renormalized.
  DensityMatrix(Mat rho, int q, Check check = Check::full);

  static DensityMatrix pure(const Vec& psi, int q);

  const Mat& matrix() const { return rho_; }
  int q() const { return q_; }
  int n() const { return n_; }
  Eigen::Index dim() const { return rho_.rows(); }

 private:
  Mat rho_;
  int q_;
  int n_;
};

// Discrete Wigner function: one real coefficient per phase point, row-major
// over (a_1, a_1', ..., a_n, a_n').
class WignerTable {
 public:
  WignerTable(PrimeDim q, int n, std::vector<double> w);

  const PrimeDim& q() const { return q_; }
  int n() const { return n_; }
  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  double at(const PhasePoint& u) const { return w_[u.index(q_)]; }
  std::span<const double> values() const { return w_; }

  double sum() const;
  double min() const;

 private:
  PrimeDim q_;
  int n_;
  std::vector<double> w_;
};

struct ManaReport {
  double mana = 0.0;          // natural log of the negativity sum
  double neg_sum = 1.0;       // sum_u |W(u)|
  int n_sites = 0;
  double mana_density = 0.0;  // mana / n_sites
  double min_w = 0.0;
  double renyi2 = 0.0;        // -log(q^n sum_u W(u)^2)
};

WignerTable wigner_of(const DensityMatrix& rho);
WignerTable wigner_of(const DensityMatrix& rho, const PhaseSpace& space);

// Normalizes by sum(W), so mana is log of the L1/L0 ratio and is >= 0.
ManaReport mana(const WignerTable& w);

double renyi2(const DensityMatrix& rho);
double entanglement_entropy(const DensityMatrix& rho);

// Trace out all sites not in `keep` (0-based, sorted). Site 0 is the most significant digit.
Mat partial_trace(const Mat& rho, int d, int n, std::span<const int> keep);

struct MonotonicityReport {
  int clifford_trials = 0;
  int measurement_trials = 0;
  double max_clifford_deviation = 0.0;
  double max_measurement_increase = 0.0;
  std::vector<std::string> failures;
  bool passed() const { return failures.empty(); }
};

// Random Clifford circuit on n qutrits built from K, H on each site and S on each ordered pair.
Mat random_clifford(int n, int depth, std::mt19937_64& rng);

// rho -> sum_k P_k rho P_k over the eigenprojectors of the Pauli string `u`.
Mat pauli_measurement_channel(const Mat& rho, const PrimeDim& q, const PhasePoint& u);

MonotonicityReport monotonicity_suite(const DensityMatrix& rho, int trials, std::mt19937_64& rng);

struct HullDistance {
  double distance = 0.0;  // Frobenius distance to the nearest point of STAB
  double gap = 0.0;       // duality gap on the squared distance at termination
  int iterations = 0;
  std::vector<double> weights;  // convex weights over stabilizer_states(q, n)
};

// Pairwise conditional-gradient solve over the convex hull of pure stabilizer states (n <= 2).
HullDistance stab_hull_distance(const DensityMatrix& rho, double gap_tol = 1e-12,
                                int max_iterations = 2'000'000);

}  // namespace magic
