#include "magic/mera.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include <Eigen/Eigenvalues>

#include "magic/errors.hpp"

namespace magic {

namespace {

std::int64_t floor_div2(std::int64_t x) { return x >= 0 ? x / 2 : -((-x + 1) / 2); }

// Graph conventions, read top to bottom. Scale-s wire x feeds isometry I(s - 1, x),
// whose outputs are wires 2x and 2x + 1 one scale down; disentangler D(s, m) then
// acts on wires 2m + 1 and 2m + 2 of scale s. Physical sites are scale-0 wires
// after the disentanglers.
struct Interval {
  std::int64_t lo, hi;
};

// Physical sites reached from the scale-s post-disentangler wires [a, b].
Interval light_cone(int s, Interval w) {
  for (; s > 0; --s) w = {2 * w.lo - 1, 2 * w.hi + 2};
  return w;
}

Interval disentangler_cone(int s, std::int64_t m) { return light_cone(s, {2 * m + 1, 2 * m + 2}); }
Interval isometry_cone(int s, std::int64_t x) {
  // I(s, x) outputs wires 2x, 2x + 1, which enter D(s, x - 1) and D(s, x).
  return light_cone(s, {2 * x - 1, 2 * x + 2});
}

bool inside(Interval in, Interval region) { return in.lo >= region.lo && in.hi <= region.hi; }

}  // namespace

MERACount domain_counts(int k) {
  if (k < 0) throw ValidationError("layer index must be >= 0");
  if (k > 40) throw ValidationError("layer index too large");
  MERACount c;
  c.k = k;
  const std::int64_t p = std::int64_t{1} << (k + 1);
  c.n_sq = p - 1;
  c.n_tri = k == 0 ? 0 : p - 2;
  c.ell = 2 * (p - 1);
  c.total_sq = 2 * p - 2 - (k + 1);
  c.total_tri = 2 * p - 4 - 2 * k;
  return c;
}

MERACount mera_graph_oracle(int k) {
  if (k < 0 || k > 12) throw ValidationError("graph oracle supports 0 <= k <= 12");
  MERACount c;
  c.k = k;

  // Row-by-row growth from a single disentangler at scale k.
  std::set<std::int64_t> wires{1, 2};
  c.n_sq = 1;
  c.total_sq = 1;
  std::vector<std::set<std::int64_t>> iso_rows(k), dis_rows(k + 1);
  dis_rows[k] = {0};
  for (int s = k - 1; s >= 0; --s) {
    std::set<std::int64_t> pre, dis;
    for (auto x : wires) {
      iso_rows[s].insert(x);
      pre.insert(2 * x);
      pre.insert(2 * x + 1);
    }
    for (auto p : pre) dis.insert(floor_div2(p - 1));
    wires.clear();
    for (auto m : dis) {
      wires.insert(2 * m + 1);
      wires.insert(2 * m + 2);
    }
    dis_rows[s] = dis;
    c.n_tri = static_cast<std::int64_t>(iso_rows[s].size());
    c.n_sq = static_cast<std::int64_t>(dis.size());
    c.total_tri += c.n_tri;
    c.total_sq += c.n_sq;
  }
  c.ell = static_cast<std::int64_t>(wires.size());
  const Interval region{*wires.begin(), *wires.rbegin()};
  if (region.hi - region.lo + 1 != c.ell) throw NumericalError("grown region is not contiguous");

  // Independent check: every tensor near the region, at every scale up to k + 2,
  // belongs to the domain iff its light cone lies inside the region.
  for (int s = 0; s <= k + 2; ++s) {
    const std::int64_t lo = (region.lo >> s) - 3, hi = (region.hi >> s) + 3;
    for (std::int64_t m = lo; m <= hi; ++m) {
      const bool in_dom = s <= k && dis_rows[s].count(m);
      if (inside(disentangler_cone(s, m), region) != in_dom)
        throw NumericalError("disentangler (" + std::to_string(s) + ", " + std::to_string(m) +
                             ") disagrees with the domain of dependence");
      const bool iso_in = s < k && iso_rows[s].count(m);
      if (inside(isometry_cone(s, m), region) != iso_in)
        throw NumericalError("isometry (" + std::to_string(s) + ", " + std::to_string(m) +
                             ") disagrees with the domain of dependence");
    }
  }
  return c;
}

double domain_mana(int k, double m_sq, double m_tri) {
  const auto c = domain_counts(k);
  return m_sq * static_cast<double>(c.total_sq) + m_tri * static_cast<double>(c.total_tri);
}

void MERAManaParams::validate() const {
  if (!(m_sq >= 0.0) || !(m_tri >= 0.0) || !(m_max >= 0.0) || !(nu >= 0.0))
    throw ValidationError("MERA mana parameters must be non-negative");
  if (m_max > 0.5 * std::log(3.0) + 1e-12) throw ValidationError("m_max exceeds ln 3 / 2");
}

double finite_mana_prediction(double ell, const MERAManaParams& p) {
  p.validate();
  if (!(ell >= 2.0)) throw ValidationError("subsystem size must be >= 2");
  const double asym = p.m_sq + p.m_tri;
  if (std::isinf(ell)) return asym;
  const double m = asym - (p.m_sq + 2.0 * p.m_tri) * (std::log2((ell + 2.0) / 4.0) + 1.0) / ell;
  return std::max(0.0, m);
}

double quasi_mera_prediction(double theta, const MERAManaParams& p) {
  p.validate();
  if (!(p.nu > 0.0)) throw ValidationError("quasi-MERA prediction needs nu > 0");
  if (!(theta >= 0.0 && theta <= kPi / 2 + 1e-12)) throw ValidationError("theta outside [0, pi/2]");
  const double dist = std::abs(theta - kPi / 4);
  const double m = (p.m_tri + p.m_sq) * (1.0 - std::pow(dist, p.nu));
  return std::max(0.0, std::min(p.m_max, m));
}

MERAFit fit_mera_params(const std::vector<int>& ells, const std::vector<double>& densities) {
  if (ells.size() != densities.size() || ells.size() < 2) throw ValidationError("need at least two (ell, m) samples");
  RMat a(ells.size(), 2);
  RVec y(ells.size());
  for (std::size_t i = 0; i < ells.size(); ++i) {
    if (ells[i] < 2) throw ValidationError("subsystem size must be >= 2");
    const double l = ells[i], g = (std::log2((l + 2.0) / 4.0) + 1.0) / l;
    a(i, 0) = 1.0 - g;
    a(i, 1) = 1.0 - 2.0 * g;
    y(i) = densities[i];
  }
  const RVec x = a.colPivHouseholderQr().solve(y);
  MERAFit f{x(0), x(1), 0.0};
  f.rms = std::sqrt((a * x - y).squaredNorm() / static_cast<double>(ells.size()));
  return f;
}

Mat vectorize(const Mat& x) {
  Mat v(x.size(), 1);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) v(i * x.cols() + j, 0) = x(i, j);
  return v;
}

Mat unvectorize(const Mat& v, int dim) {
  Mat x(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) x(i, j) = v(i * dim + j, 0);
  return x;
}

Mat ChannelSpec::apply(const Mat& x) const { return unvectorize(superop * vectorize(x), d * d); }

Mat ChannelSpec::fixed_point() const { return kron(rho1, rho1); }

Mat choi_matrix(const ChannelSpec& c) {
  const int dim = c.d * c.d;
  Mat j = Mat::Zero(dim * dim, dim * dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) {
      Mat e = Mat::Zero(dim, dim);
      e(a, b) = 1.0;
      j.block(a * dim, b * dim, dim, dim) = c.apply(e);
    }
  return j;
}

void ChannelSpec::validate() const {
  const int dim = d * d;
  if (d < 2 || superop.rows() != dim * dim || superop.cols() != dim * dim)
    throw ValidationError("superoperator must be (d^4) x (d^4)");
  if (rho1.rows() != d || rho1.cols() != d) throw ValidationError("fixed-point hint must be d x d");
  double tp = 0.0;
  for (int col = 0; col < dim * dim; ++col) {
    cplx tr = 0.0;
    for (int i = 0; i < dim; ++i) tr += superop(i * dim + i, col);
    const int a = col / dim, b = col % dim;
    tp = std::max(tp, std::abs(tr - (a == b ? 1.0 : 0.0)));
  }
  if (tp > 1e-10) throw ValidationError("channel is not trace preserving (residual " + std::to_string(tp) + ")");
  const Mat j = choi_matrix(*this);
  if (hermiticity_residual(j) > 1e-9) throw ValidationError("Choi matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (j + j.adjoint()), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9) throw ValidationError("channel is not completely positive");
}

ChannelSpec depolarizing_product_channel(double p, const Mat& rho1) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("depolarizing rate must lie in [0, 1]");
  const auto d = static_cast<int>(rho1.rows());
  const int dd = d * d;
  // Single site: vec(X) -> (1 - p) vec(X) + p vec(rho1) Tr(X).
  Mat one = (1.0 - p) * Mat::Identity(dd, dd);
  const Mat r = vectorize(rho1);
  for (int a = 0; a < d; ++a) one.col(a * d + a) += p * r;
  // Two sites: reorder (i1 i2, j1 j2) <-> (i1 j1, i2 j2) around the product map.
  ChannelSpec c;
  c.d = d;
  c.rho1 = rho1;
  const int dim = dd;
  c.superop = Mat::Zero(dim * dim, dim * dim);
  auto idx2 = [&](int i1, int i2, int j1, int j2) { return (i1 * d + i2) * dim + (j1 * d + j2); };
  for (int i1 = 0; i1 < d; ++i1)
    for (int i2 = 0; i2 < d; ++i2)
      for (int j1 = 0; j1 < d; ++j1)
        for (int j2 = 0; j2 < d; ++j2)
          for (int k1 = 0; k1 < d; ++k1)
            for (int k2 = 0; k2 < d; ++k2)
              for (int l1 = 0; l1 < d; ++l1)
                for (int l2 = 0; l2 < d; ++l2)
                  c.superop(idx2(i1, i2, j1, j2), idx2(k1, k2, l1, l2)) =
                      one(i1 * d + j1, k1 * d + l1) * one(i2 * d + j2, k2 * d + l2);
  c.validate();
  return c;
}

ChannelSpec identity_channel(int d) {
  ChannelSpec c;
  c.d = d;
  c.superop = Mat::Identity(d * d * d * d, d * d * d * d);
  c.rho1 = Mat::Identity(d, d) / static_cast<double>(d);
  return c;
}

ChannelSpectrum channel_spectrum(const ChannelSpec& c) {
  c.validate();
  Eigen::ComplexEigenSolver<Mat> es(c.superop, false);
  if (es.info() != Eigen::Success) throw NumericalError("superoperator eigensolver failed");
  ChannelSpectrum out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.eigenvalues.push_back(es.eigenvalues()(i));
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(),
            [](cplx a, cplx b) { return std::abs(a) > std::abs(b); });
  if (std::abs(out.eigenvalues[0] - 1.0) > 1e-8) throw NumericalError("leading eigenvalue of channel is not 1");
  const Mat fp = c.fixed_point();
  out.fixed_point_residual = (c.apply(fp) - fp).norm();
  if (out.fixed_point_residual > 1e-8) throw NumericalError("rho1 x rho1 is not a fixed point of the channel");
  out.lambda1 = out.eigenvalues.size() > 1 ? std::abs(out.eigenvalues[1]) : 0.0;
  out.degenerate = out.lambda1 > 1.0 - 1e-10;
  out.two_delta = out.degenerate ? 0.0
                  : out.lambda1 == 0.0 ? std::numeric_limits<double>::infinity()
                                       : -std::log2(out.lambda1);
  return out;
}

Mat iterate_channel(const ChannelSpec& c, const Mat& rho, int k) {
  if (k < 0) throw ValidationError("iteration count must be >= 0");
  const int dim = c.d * c.d;
  if (rho.rows() != dim || rho.cols() != dim) throw ValidationError("state does not match channel dimension");
  Mat v = vectorize(rho);
  for (int step = 0; step < k; ++step) {
    v = c.superop * v;
    const Mat x = unvectorize(v, dim);
    if (std::abs(x.trace() - rho.trace()) > 1e-9) throw NumericalError("channel iteration lost trace");
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (x + x.adjoint()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9) throw NumericalError("channel iteration lost positivity");
  }
  return unvectorize(v, dim);
}

double fitted_decay_rate(const ChannelSpec& c, const Mat& rho, int k_min, int k_max) {
  if (k_min < 0 || k_max <= k_min) throw ValidationError("need 0 <= k_min < k_max");
  const Mat fp = c.fixed_point();
  Mat x = iterate_channel(c, rho, k_min);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = k_max - k_min + 1;
  for (int k = k_min; k <= k_max; ++k) {
    const double dist = (x - fp).norm();
    if (!(dist > 0.0)) throw NumericalError("iterate reached the fixed point exactly");
    const double y = std::log2(dist);
    sx += k;
    sy += y;
    sxx += double(k) * k;
    sxy += k * y;
    if (k < k_max) x = iterate_channel(c, x, 1);
  }
  return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace magic
