#pragma once

#include <functional>
#include <vector>

#include "magic/mps.hpp"
#include "magic/potts.hpp"

namespace magic {

struct DMRGConfig {
  double svd_cutoff = 1e-7;   // relative discarded weight per bond
  double energy_tol = 1e-7;   // stop when |E_sweep - E_prev| < energy_tol
  int max_sweeps = 40;
  int min_sweeps = 3;
  int max_bond = 512;
  int init_bias = 0;          // Z-eigenstate label seeding the product state for theta > pi/4
  int lanczos_max_iter = 60;
  double lanczos_tol = 1e-12;

  void validate() const;
};

struct DMRGResult {
  Mps state;                          // symmetry-broken ground state, center at site 0
  double energy = 0.0;
  std::vector<double> sweep_energies;
  double max_discarded = 0.0;         // largest discarded weight in the final sweep
  double max_canonical_residual = 0.0;
  int sweeps = 0;
};

// Optional per-sweep observer (sweep index, energy, max bond).
using SweepObserver = std::function<void(int, double, int)>;

// Two-site DMRG for the open Potts chain. Throws NumericalError if not converged.
DMRGResult dmrg_ground_state(const PottsParams& p, const DMRGConfig& cfg, const SweepObserver& observer = {});

}  // namespace magic
