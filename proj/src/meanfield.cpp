#include "magic/meanfield.hpp"

#include <cmath>
#include <limits>

#include "magic/errors.hpp"
#include "magic/parallel.hpp"
#include "magic/qudit.hpp"
#include "magic/wigner.hpp"

namespace magic {

namespace {

constexpr double kGolden = 0.6180339887498949;
// <Z> above this counts as ordered when locating the onset.
constexpr double kOnset = 1e-6;
constexpr double kJumpThreshold = 1e-3;
constexpr double kBracketWidth = 1e-9;

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in [0, 1]");
}

}  // namespace

void MeanFieldConfig::validate() const {
  if (q < 2) throw ValidationError("q must be >= 2");
  if (k < 1) throw ValidationError("degree k must be >= 1");
  if (!(alpha_step > 0.0 && alpha_step <= 0.1)) throw ValidationError("alpha_step must lie in (0, 0.1]");
  if (!(alpha_tol > 0.0 && alpha_tol < alpha_step)) throw ValidationError("alpha_tol must lie in (0, alpha_step)");
  if (!(theta_step > 0.0 && theta_step <= 0.1)) throw ValidationError("theta_step must lie in (0, 0.1]");
}

RVec ansatz_state(double alpha, int q) {
  check_alpha(alpha);
  if (q < 2) throw ValidationError("q must be >= 2");
  // |perp> = (sqrt(q) |X=1> - |Z=1>) / sqrt(q - 1) is uniform on states 1 .. q-1.
  RVec v = RVec::Constant(q, std::sqrt((1.0 - alpha * alpha) / (q - 1)));
  v(0) = alpha;
  return v;
}

Expectations expectations(double alpha, int q) {
  check_alpha(alpha);
  const double a2 = alpha * alpha, qm1 = q - 1.0;
  return {(q * a2 - 1.0) / qm1, 2.0 * alpha * std::sqrt(1.0 - a2) / std::sqrt(qm1) + (1.0 - a2) * (q - 2.0) / qm1};
}

Expectations expectations_direct(double alpha, int q) {
  const RVec phi = ansatz_state(alpha, q);
  Mat z = Mat::Zero(q, q), x = Mat::Zero(q, q);
  for (int n = 0; n < q; ++n) {
    z(n, n) = std::polar(1.0, 2.0 * kPi * n / q);
    x((n + 1) % q, n) = 1.0;
  }
  const Vec v = phi.cast<cplx>();
  const cplx ez = v.dot(0.5 * (z + z.adjoint()) * v);
  const cplx ex = v.dot(0.5 * (x + x.adjoint()) * v);
  return {ez.real(), ex.real()};
}

namespace {

// Energy per vertex plus 2 cos(theta), i.e. measured from the paramagnet. Uses
// 1 - <X> = (sqrt(q - 1) alpha - sqrt(1 - alpha^2))^2 / (q - 1) so that the flat
// landscape near a continuous onset is resolved without cancellation.
double excess_energy(double alpha, double theta, int q, int k) {
  const double z = (q * alpha * alpha - 1.0) / (q - 1.0);
  const double d = std::sqrt(q - 1.0) * alpha - std::sqrt(1.0 - alpha * alpha);
  return -k * std::sin(theta) * z * z + 2.0 * std::cos(theta) * d * d / (q - 1.0);
}

}  // namespace

double energy_per_vertex(double alpha, double theta, int q, int k) {
  check_alpha(alpha);
  return excess_energy(alpha, theta, q, k) - 2.0 * std::cos(theta);
}

MeanFieldPoint optimize_alpha(double theta, const MeanFieldConfig& cfg) {
  cfg.validate();
  const int q = cfg.q, k = cfg.k;
  auto f = [&](double a) { return excess_energy(a, theta, q, k); };

  const auto n = static_cast<long>(std::ceil(1.0 / cfg.alpha_step));
  auto at = [&](long i) { return std::min(1.0, i * cfg.alpha_step); };
  std::vector<double> grid(n + 1);
  double grid_min = std::numeric_limits<double>::infinity();
  for (long i = 0; i <= n; ++i) grid_min = std::min(grid_min, grid[i] = f(at(i)));

  auto refine = [&](long i) {
    double lo = at(std::max(0L, i - 1)), hi = at(std::min(n, i + 1));
    double c = hi - kGolden * (hi - lo), d = lo + kGolden * (hi - lo);
    double fc = f(c), fd = f(d);
    while (hi - lo > cfg.alpha_tol) {
      if (fc < fd) {
        hi = d;
        d = c;
        fd = fc;
        c = hi - kGolden * (hi - lo);
        fc = f(c);
      } else {
        lo = c;
        c = d;
        fc = fd;
        d = lo + kGolden * (hi - lo);
        fd = f(d);
      }
    }
    double a = 0.5 * (lo + hi);
    if (i == n && f(1.0) <= f(a)) a = 1.0;
    // Snap onto the stabilizer endpoints when the refinement lands on them.
    for (double special : {1.0 / std::sqrt(static_cast<double>(q)), 1.0})
      if (std::abs(a - special) < 1e-6 && f(special) <= f(a)) a = special;
    return a;
  };

  // Refine every grid basin that could hold the global minimum; degenerate
  // basins (e.g. the two signs of the q = 2 order parameter) go to the larger alpha.
  struct Cand {
    double alpha, e;
  };
  std::vector<Cand> cands;
  for (long i = 0; i <= n; ++i) {
    const bool local = (i == 0 || grid[i] <= grid[i - 1]) && (i == n || grid[i] < grid[i + 1]);
    if (local && grid[i] <= grid_min + 1e-6) {
      const double a = refine(i);
      cands.push_back({a, f(a)});
    }
  }
  // Rounding of <Z> from alpha leaves ~1e-16 |<Z>| noise in the energy, so
  // mirror-image basins only agree to about 1e-9 relative.
  const double tol = 1e-8 * std::abs(grid_min) + 1e-18;
  Cand win = cands.front();
  for (const auto& c : cands)
    if (c.e < win.e - tol || (std::abs(c.e - win.e) <= tol && c.alpha > win.alpha)) win = c;
  bool tie = false;
  for (const auto& c : cands)
    if (std::abs(c.alpha - win.alpha) > 2 * cfg.alpha_step && std::abs(c.e - win.e) <= tol) tie = true;
  const double alpha = win.alpha, e = win.e;

  MeanFieldPoint p;
  p.theta = theta;
  p.alpha_star = alpha;
  const auto ex = expectations(alpha, q);
  p.z_expect = ex.z;
  p.x_expect = ex.x;
  p.energy_per_vertex = e - 2.0 * std::cos(theta);
  p.tie = tie;
  return p;
}

Transition transition_theta(const MeanFieldConfig& cfg) {
  cfg.validate();
  auto z = [&](double t) { return optimize_alpha(t, cfg).z_expect; };
  const auto steps = static_cast<long>(std::floor((kPi / 2) / cfg.theta_step));
  double prev = 0.0;
  for (long i = 1; i <= steps; ++i) {
    const double t = i * cfg.theta_step;
    if (z(t) > kOnset) {
      double lo = prev, hi = t;
      while (hi - lo > kBracketWidth) {
        const double mid = 0.5 * (lo + hi);
        (z(mid) > kOnset ? hi : lo) = mid;
      }
      Transition tr;
      tr.theta_c = 0.5 * (lo + hi);
      tr.jump = z(hi) - z(lo);
      tr.bracket_width = hi - lo;
      tr.order = tr.jump > kJumpThreshold ? TransitionOrder::first : TransitionOrder::second;
      return tr;
    }
    prev = t;
  }
  throw NumericalError("no ordering transition found in (0, pi/2)");
}

double meanfield_mana(const MeanFieldPoint& point, int q) {
  if (q < 3 || q % 2 == 0 || !is_prime(q)) throw ValidationError("mana needs an odd prime q");
  const Vec phi = ansatz_state(point.alpha_star, q).cast<cplx>();
  return mana(wigner_of(DensityMatrix::pure(phi, q))).mana;
}

std::vector<MeanFieldPoint> meanfield_scan(const MeanFieldConfig& cfg, const std::vector<double>& thetas,
                                           int threads) {
  cfg.validate();
  for (double t : thetas)
    if (!(t >= 0.0 && t <= kPi / 2 + 1e-12)) throw ValidationError("theta outside [0, pi/2]");
  const bool with_mana = cfg.q >= 3 && is_prime(cfg.q);
  std::vector<MeanFieldPoint> out(thetas.size());
  parallel_for(thetas.size(), threads, [&](std::size_t i) {
    out[i] = optimize_alpha(thetas[i], cfg);
    if (with_mana) out[i].mana_per_vertex = meanfield_mana(out[i], cfg.q);
  });
  return out;
}

double large_q_theta_c(int k) {
  if (k < 1) throw ValidationError("degree k must be >= 1");
  return std::atan2(2.0, static_cast<double>(k));
}

}  // namespace magic
