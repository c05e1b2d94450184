#pragma once

#include <random>
#include <span>
#include <utility>
#include <vector>

#include "magic/linalg.hpp"

namespace magic {

// Sites are 0-based. Intervals are inclusive [first, last], sorted and disjoint.
struct SubsystemSpec {
  std::vector<std::pair<int, int>> intervals;

  static SubsystemSpec contiguous(int first, int length);
  static SubsystemSpec blocks(int first_a, int len_a, int first_b, int len_b);

  std::vector<int> sites() const;
  int size() const;
  // Throws ValidationError unless sorted, disjoint and inside [0, n_sites).
  void validate(int n_sites) const;
};

// Open-boundary MPS. Site tensor j is stored as a (d * Dl) x Dr matrix whose
// row s * Dl + a holds M^s[a, :]; bond dimensions at both ends are 1.
struct Mps {
  int d = 3;
  std::vector<Mat> tensors;
  int center = 0;          // orthogonality center
  double cutoff = 0.0;     // truncation cutoff used to produce the state

  int size() const { return static_cast<int>(tensors.size()); }
  Eigen::Index left_dim(int j) const { return tensors[j].rows() / d; }
  Eigen::Index right_dim(int j) const { return tensors[j].cols(); }
  int max_bond() const;

  auto block(int j, int s) { return tensors[j].middleRows(s * left_dim(j), left_dim(j)); }
  auto block(int j, int s) const { return tensors[j].middleRows(s * left_dim(j), left_dim(j)); }
};

Mps product_mps(std::span<const Vec> local_states);
// Random MPS of maximal bond dimension chi, normalized, center at site 0.
Mps random_mps(int n_sites, int d, int chi, std::mt19937_64& rng);

void move_center(Mps& psi, int target);
// Bring into mixed-canonical form at `center` from scratch (left QR sweep, right QR sweep).
void canonicalize(Mps& psi, int center);
double norm(const Mps& psi);
// Largest deviation from the isometry conditions left/right of the center, plus |norm - 1|.
double canonical_residual(const Mps& psi);

Vec to_dense(const Mps& psi);

// <psi| O_{j1} O_{j2} ... |psi> / <psi|psi> for single-site operators at distinct sites.
cplx expectation(const Mps& psi, std::span<const std::pair<int, Mat>> ops);

// Von Neumann entropies across every bond (N - 1 values).
std::vector<double> bond_entropies(const Mps& psi);

// C_ij = Re[<Z_i Z_j^dag> - <Z_i><Z_j^dag>] for all j > i.
std::vector<double> correlation_row(const Mps& psi, int i);
double correlation(const Mps& psi, int i, int j);
// xi = C_{i,i+1}^{-1} sum_{j > i} C_ij. Throws NumericalError if C_{i,i+1} < 1e-14.
double correlation_length(const Mps& psi, int i);
double correlation_length(const Mps& psi);  // i = N / 4

// Sum of the q cyclically shifted copies prod_j X_j^n |psi>, normalized and compressed.
Mps cat_state(const Mps& omega0);

// Table T[u_1 ... u_l] = <psi| B_{u_1} x ... x B_{u_l} |psi> over the region, row-major
// in the region's site order, identity on gap sites. Never forms a q^l x q^l matrix.
std::vector<cplx> product_basis_table(const Mps& psi, const SubsystemSpec& region,
                                      std::span<const Mat> basis);

// Dense reduced density matrix (at most 8 sites), via product_basis_table.
Mat rdm(const Mps& psi, const SubsystemSpec& region);
// RDM of the uniform mixture of the q shifted copies of omega0 (instead of their superposition).
Mat rdm_mixture(const Mps& omega0, const SubsystemSpec& region);

}  // namespace magic
