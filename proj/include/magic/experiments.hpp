#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "magic/mps_wigner.hpp"
#include "magic/potts.hpp"

namespace magic {

enum class StateKind { cat, mixture };

// Supplies the symmetry-broken ground state for a parameter point (DMRG, cache, ...).
using GroundStateProvider = std::function<Mps(const PottsParams&)>;

struct ScanSpec {
  int N = 32;
  double lambda = 0.0;
  std::vector<double> thetas;
  std::vector<int> ells{1, 2, 3, 4, 5};
  std::vector<int> dxs;
  int base_site = -1;  // two-point scans; -1 means N / 4
  int block = 1;       // two-point block size (1 or 2)
  StateKind kind = StateKind::cat;
  int threads = 1;

  void validate_subsystem() const;
  void validate_twopoint() const;
};

// The state whose reduced density matrices are analysed: the cat state built from
// omega0, or omega0 itself when the mixture of shifted copies is requested.
struct PreparedState {
  Mps mps;
  StateKind kind = StateKind::cat;
};
PreparedState prepare_state(const Mps& omega0, StateKind kind);

ManaReport region_mana(const PreparedState& st, const SubsystemSpec& region);

struct SubsystemRow {
  double theta;
  int ell;
  double mana;
  double mana_density;
};
// Contiguous regions centered on the middle of the chain.
std::vector<SubsystemRow> subsystem_scan(const ScanSpec& spec, const GroundStateProvider& provider);
SubsystemSpec centered_region(int n_sites, int ell);

struct TwopointRow {
  double theta;
  int dx;
  double mcc;
  bool dead;  // mcc below the numerical-zero threshold
};
std::vector<TwopointRow> twopoint_scan(const ScanSpec& spec, const GroundStateProvider& provider);
ConnectedMana twopoint_cell(const PreparedState& st, int base_site, int block, int dx);
// First separation at which m_cc is numerically zero for the given theta, if any.
std::optional<int> sudden_death_distance(const std::vector<TwopointRow>& rows, double theta);

// Whole-system mana density of the symmetric exact ground state (N <= 8).
double exact_mana_density(int n_sites, double theta);

// ---- Two-qutrit toy model ----

// (2|00> - |11> - |22>) / sqrt(6).
Vec norrell_state();
// sum_n (X x X)^n (2|00> - |11> - |22>), which vanishes identically.
Vec norrell_orbit_sum();

struct ToyModel {
  double alpha = 0.0;
  Mat rho1 = Mat::Identity(3, 3) / 3.0;
};
// (1 - alpha) rho1 x rho1 + alpha |N2><N2|.
DensityMatrix toy_density(const ToyModel& t);

struct SuddenDeath {
  double alpha0 = 0.0;  // largest alpha known to give zero mana
  double lo = 0.0, hi = 0.0;
  int iterations = 0;
  bool window = true;   // false when alpha = 0 is already magical
};
SuddenDeath sudden_death_alpha(const Mat& rho1, double width = 1e-6);
// W is affine in alpha, so when rho1 x rho1 has W >= 0 the zero-mana set is [0, a*] with
// a* = min over points with W1 < W0 of W0 / (W0 - W1). Returns nullopt if rho1 x rho1
// already has negative entries.
std::optional<double> toy_alpha_exact(const Mat& rho1);

struct AlphaFit {
  double b = 0.0;
  double c = 1.0;
  double xi = 1.0;
  double two_delta = 4.0 / 15.0;
};
double alpha_profile(double theta, double delta_x, const AlphaFit& fit);

// ---- Fits ----

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_rel_residual = 0.0;  // max |y - fit| / |y|
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
// S(N) = a + (c / 6) ln N; returns c and the fit.
double fit_central_charge(const std::vector<int>& sizes, const std::vector<double>& entropies, LineFit* fit = nullptr);
// C(x) ~ x^{-p}; returns p.
double fit_power_law_exponent(const std::vector<double>& x, const std::vector<double>& c);

struct FieldRow {
  double lambda;
  double energy;
  double mid_entropy;
  double z_plus_zdag;  // site-averaged <Z + Z^dag>
};
FieldRow field_response(const Mps& omega0, double lambda, double energy);

// Relative distance |1 - theta / theta_c| on each side where 2 xi(theta) crosses ell,
// by linear interpolation of sampled correlation lengths.
struct RoundingWindow {
  std::optional<double> below;
  std::optional<double> above;
};
RoundingWindow rounding_window(const std::vector<double>& thetas, const std::vector<double>& xis, double ell);

}  // namespace magic
