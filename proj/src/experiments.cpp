#include "magic/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "magic/errors.hpp"
#include "magic/parallel.hpp"
#include "magic/qudit.hpp"

namespace magic {

namespace {

void check_thetas(const std::vector<double>& thetas) {
  if (thetas.empty()) throw ValidationError("theta grid is empty");
  for (double t : thetas)
    if (!std::isfinite(t) || t < 0.0 || t > kPi / 2 + 1e-12) throw ValidationError("theta outside [0, pi/2]");
}

}  // namespace

void ScanSpec::validate_subsystem() const {
  if (N < 2) throw ValidationError("N must be >= 2");
  check_thetas(thetas);
  if (ells.empty()) throw ValidationError("subsystem size list is empty");
  for (int l : ells)
    if (l < 1 || l > 7 || l > N) throw ValidationError("subsystem sizes must lie in [1, min(7, N)]");
}

void ScanSpec::validate_twopoint() const {
  if (N < 2) throw ValidationError("N must be >= 2");
  check_thetas(thetas);
  if (block != 1 && block != 2) throw ValidationError("two-point block size must be 1 or 2");
  if (dxs.empty()) throw ValidationError("separation list is empty");
  const int base = base_site < 0 ? N / 4 : base_site;
  for (int dx : dxs)
    if (dx < block || base + dx + block - 1 >= N)
      throw ValidationError("separation " + std::to_string(dx) + " does not fit the chain");
}

PreparedState prepare_state(const Mps& omega0, StateKind kind) {
  PreparedState st;
  st.kind = kind;
  st.mps = kind == StateKind::cat ? cat_state(omega0) : omega0;
  return st;
}

ManaReport region_mana(const PreparedState& st, const SubsystemSpec& region) {
  if (st.kind == StateKind::cat) return mana(wigner_of_mps_rdm(st.mps, region));
  if (region.size() > 7) throw ValidationError("mixture path limited to 7 sites");
  return mana(wigner_of(DensityMatrix(rdm_mixture(st.mps, region), st.mps.d)));
}

SubsystemSpec centered_region(int n_sites, int ell) {
  return SubsystemSpec::contiguous(n_sites / 2 - ell / 2, ell);
}

std::vector<SubsystemRow> subsystem_scan(const ScanSpec& spec, const GroundStateProvider& provider) {
  spec.validate_subsystem();
  const auto nt = spec.thetas.size(), nl = spec.ells.size();
  std::vector<SubsystemRow> rows(nt * nl);
  parallel_for(nt, spec.threads, [&](std::size_t t) {
    const double theta = spec.thetas[t];
    const auto st = prepare_state(provider(PottsParams{spec.N, theta, spec.lambda}), spec.kind);
    for (std::size_t l = 0; l < nl; ++l) {
      const int ell = spec.ells[l];
      const auto rep = region_mana(st, centered_region(spec.N, ell));
      rows[t * nl + l] = {theta, ell, rep.mana, rep.mana_density};
    }
  });
  return rows;
}

ConnectedMana twopoint_cell(const PreparedState& st, int base_site, int block, int dx) {
  const auto a = SubsystemSpec::contiguous(base_site, block);
  const auto b = SubsystemSpec::contiguous(base_site + dx, block);
  if (st.kind == StateKind::cat) return connected_mana(st.mps, a, b);

  ConnectedMana out;
  SubsystemSpec both = dx == block ? SubsystemSpec::contiguous(base_site, 2 * block)
                                   : SubsystemSpec::blocks(base_site, block, base_site + dx, block);
  out.m_ab = region_mana(st, both).mana_density;
  out.m_a = region_mana(st, a).mana_density;
  out.m_b = region_mana(st, b).mana_density;
  out.m_cc = out.m_ab - 0.5 * (out.m_a + out.m_b);
  return out;
}

std::vector<TwopointRow> twopoint_scan(const ScanSpec& spec, const GroundStateProvider& provider) {
  spec.validate_twopoint();
  const int base = spec.base_site < 0 ? spec.N / 4 : spec.base_site;
  const auto nt = spec.thetas.size(), nd = spec.dxs.size();
  std::vector<TwopointRow> rows(nt * nd);
  parallel_for(nt, spec.threads, [&](std::size_t t) {
    const double theta = spec.thetas[t];
    const auto st = prepare_state(provider(PottsParams{spec.N, theta, spec.lambda}), spec.kind);
    for (std::size_t k = 0; k < nd; ++k) {
      const auto c = twopoint_cell(st, base, spec.block, spec.dxs[k]);
      rows[t * nd + k] = {theta, spec.dxs[k], c.m_cc, c.m_cc < kManaZero};
    }
  });
  return rows;
}

std::optional<int> sudden_death_distance(const std::vector<TwopointRow>& rows, double theta) {
  std::optional<int> best;
  for (const auto& r : rows)
    if (r.theta == theta && r.dead && (!best || r.dx < *best)) best = r.dx;
  return best;
}

double exact_mana_density(int n_sites, double theta) {
  const auto gs = exact_ground_state(PottsParams{n_sites, theta, 0.0}, true);
  return mana(wigner_of(DensityMatrix::pure(gs.state.normalized(), 3))).mana_density;
}

Vec norrell_state() {
  Vec v = Vec::Zero(9);
  v(0) = 2.0;
  v(4) = -1.0;
  v(8) = -1.0;
  return v / std::sqrt(6.0);
}

Vec norrell_orbit_sum() {
  const PrimeDim q(3);
  const Mat xx = kron(shift(q), shift(q));
  const Vec seed = norrell_state() * std::sqrt(6.0);
  Vec sum = Vec::Zero(9);
  Vec cur = seed;
  for (int n = 0; n < 3; ++n) {
    sum += cur;
    cur = xx * cur;
  }
  return sum;
}

DensityMatrix toy_density(const ToyModel& t) {
  if (!(t.alpha >= 0.0 && t.alpha <= 1.0)) throw ValidationError("toy model alpha must lie in [0, 1]");
  const DensityMatrix one(t.rho1, 3);
  if (one.n() != 1) throw ValidationError("toy model rho1 must be a single-qutrit state");
  const Vec n2 = norrell_state();
  Mat rho = (1.0 - t.alpha) * kron(one.matrix(), one.matrix()) + t.alpha * (n2 * n2.adjoint());
  return DensityMatrix(std::move(rho), 3);
}

SuddenDeath sudden_death_alpha(const Mat& rho1, double width) {
  auto m = [&](double a) { return mana(wigner_of(toy_density({a, rho1}))).mana; };
  SuddenDeath out;
  if (m(0.0) >= kManaZero) {
    out.window = false;
    return out;
  }
  if (m(1.0) < kManaZero) throw NumericalError("toy model mana never becomes positive on [0, 1]");
  double lo = 0.0, hi = 1.0;
  while (hi - lo >= width) {
    const double mid = 0.5 * (lo + hi);
    (m(mid) < kManaZero ? lo : hi) = mid;
    ++out.iterations;
  }
  out.lo = lo;
  out.hi = hi;
  out.alpha0 = lo;
  return out;
}

std::optional<double> toy_alpha_exact(const Mat& rho1) {
  const auto w0 = wigner_of(toy_density({0.0, rho1}));
  const auto w1 = wigner_of(toy_density({1.0, rho1}));
  if (w0.min() < 0.0) return std::nullopt;
  double a = 1.0;
  for (std::size_t u = 0; u < w0.size(); ++u)
    if (w1[u] < w0[u]) a = std::min(a, w0[u] / (w0[u] - w1[u]));
  return a;
}

double alpha_profile(double theta, double delta_x, const AlphaFit& fit) {
  if (!(delta_x > 0.0)) throw ValidationError("alpha_profile needs delta_x > 0");
  if (std::abs(theta - kThetaCritical) <= 1e-12) return std::pow(delta_x, -fit.two_delta);
  if (theta < kThetaCritical) return std::exp(-delta_x / fit.xi);
  return fit.b + fit.c * std::exp(-delta_x / fit.xi);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("fit needs at least two matching points");
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw NumericalError("degenerate abscissae in line fit");
  LineFit f;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = std::abs(y[i] - (f.intercept + f.slope * x[i]));
    f.max_rel_residual = std::max(f.max_rel_residual, y[i] != 0.0 ? r / std::abs(y[i]) : r);
  }
  return f;
}

double fit_central_charge(const std::vector<int>& sizes, const std::vector<double>& entropies, LineFit* fit) {
  std::vector<double> x;
  for (int n : sizes) x.push_back(std::log(static_cast<double>(n)));
  const auto f = fit_line(x, entropies);
  if (fit) *fit = f;
  return 6.0 * f.slope;
}

double fit_power_law_exponent(const std::vector<double>& x, const std::vector<double>& c) {
  std::vector<double> lx, lc;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(c[i] > 0.0)) throw NumericalError("power-law fit needs positive data");
    lx.push_back(std::log(x[i]));
    lc.push_back(std::log(c[i]));
  }
  return -fit_line(lx, lc).slope;
}

FieldRow field_response(const Mps& omega0, double lambda, double energy) {
  const PrimeDim q(3);
  const Mat zz = clock(q) + clock(q).adjoint();
  double acc = 0.0;
  for (int j = 0; j < omega0.size(); ++j) {
    const std::pair<int, Mat> op{j, zz};
    acc += expectation(omega0, std::span(&op, 1)).real();
  }
  const auto ent = bond_entropies(omega0);
  return {lambda, energy, ent.empty() ? 0.0 : ent[omega0.size() / 2 - 1], acc / omega0.size()};
}

RoundingWindow rounding_window(const std::vector<double>& thetas, const std::vector<double>& xis, double ell) {
  if (thetas.size() != xis.size() || thetas.size() < 2) throw ValidationError("rounding_window: bad samples");
  RoundingWindow w;
  for (std::size_t i = 0; i + 1 < thetas.size(); ++i) {
    const double f0 = 2.0 * xis[i] - ell, f1 = 2.0 * xis[i + 1] - ell;
    if ((f0 < 0.0) == (f1 < 0.0)) continue;
    const double t = thetas[i] + (thetas[i + 1] - thetas[i]) * f0 / (f0 - f1);
    const double rel = std::abs(1.0 - t / kThetaCritical);
    if (t < kThetaCritical) {
      if (!w.below || rel < *w.below) w.below = rel;
    } else if (!w.above || rel < *w.above) {
      w.above = rel;
    }
  }
  return w;
}

}  // namespace magic
