#pragma once

#include <array>
#include <string>
#include <vector>

#include "magic/linalg.hpp"

namespace magic {

// H = -sin(theta) sum_j (Z_j^dag Z_{j+1} + h.c.) - cos(theta) sum_j (X_j + X_j^dag)
//     - lambda sum_j (Z_j + Z_j^dag), open chain, q = 3.
struct PottsParams {
  int N = 8;
  double theta = 0.0;
  double lambda = 0.0;

  void validate() const;
};

inline constexpr double kThetaCritical = 0.78539816339744830962;  // pi / 4

// Real local operators: Z^dag Z' + h.c. = 2 (C C' + S S'), X + X^dag = F, Z + Z^dag = 2 C.
struct PottsLocalOps {
  RMat C, S, F;
};
PottsLocalOps potts_local_ops();

// Dense Hamiltonian in the computational basis (real). N <= 8.
RMat potts_hamiltonian_dense(const PottsParams& p);

// Real MPO with bond dimension 4: W[wl][wr] is a 3x3 operator (bra, ket).
struct PottsMpo {
  int bond = 4;
  std::vector<std::array<RMat, 16>> sites;  // index wl * 4 + wr, empty matrix == zero
  const RMat& at(int j, int wl, int wr) const { return sites[j][wl * 4 + wr]; }
};
PottsMpo potts_mpo(const PottsParams& p);

struct ExactGroundState {
  double energy = 0.0;
  Vec state;
  int sector = 0;  // eigenvalue omega^sector of prod_j X_j
};

// Lowest eigenvector by dense diagonalization of each Z_3 charge sector (N <= 8).
// With `symmetric` the result is restricted to the charge-0 sector.
ExactGroundState exact_ground_state(const PottsParams& p, bool symmetric);

// Full spectrum over all sectors, sorted ascending (N <= 6).
RVec potts_spectrum(const PottsParams& p);

struct DualityReport {
  int checked = 0;
  double max_residual = 0.0;
  cplx diagonal_phase{0.0, 0.0};  // measured phase of the j = l case
  std::vector<std::string> failures;
  bool passed() const { return failures.empty(); }
};

// Dense check of the domain-wall operators Xt_j = Z_j Z_{j+1}^dag and Zt_j = prod_{k>j} X_k.
DualityReport duality_checks(int n_sites);

}  // namespace magic
