#include "magic/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "magic/errors.hpp"

namespace magic {

int sites_for_dim(std::int64_t dim, int q) {
  int n = 0;
  std::int64_t d = 1;
  while (d < dim) {
    d *= q;
    ++n;
  }
  if (d != dim || dim < 1) throw ValidationError("dimension is not a power of q");
  return n;
}

DensityMatrix::DensityMatrix(Mat rho, int q, Check check) : rho_(std::move(rho)), q_(q) {
  if (rho_.rows() != rho_.cols()) throw ValidationError("density matrix must be square");
  n_ = sites_for_dim(rho_.rows(), q);
  if (hermiticity_residual(rho_) > kHermitianTol)
    throw ValidationError("density matrix is not Hermitian");
  if (std::abs(rho_.trace() - cplx(1.0)) > kTraceTol)
    throw ValidationError("density matrix trace differs from 1");
  rho_ = 0.5 * (rho_ + rho_.adjoint()).eval();
  if (check == Check::structural) return;

  Eigen::SelfAdjointEigenSolver<Mat> es(rho_);
  const double lo = es.eigenvalues().minCoeff();
  if (lo < -kNegEigenTol) throw ValidationError("density matrix has a negative eigenvalue");
  if (lo < 0.0) {
    RVec ev = es.eigenvalues().cwiseMax(0.0);
    ev /= ev.sum();
    rho_ = es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  }
}

DensityMatrix DensityMatrix::pure(const Vec& psi, int q) {
  const double nrm = psi.norm();
  if (std::abs(nrm - 1.0) > 1e-12) throw ValidationError("pure state is not normalized");
  return DensityMatrix(psi * psi.adjoint(), q, Check::structural);
}

WignerTable::WignerTable(PrimeDim q, int n, std::vector<double> w)
    : q_(q), n_(n), w_(std::move(w)) {
  if (static_cast<std::int64_t>(w_.size()) != ipow(q.value(), 2 * n))
    throw ValidationError("Wigner table size is not q^(2n)");
  if (std::abs(sum() - 1.0) > 1e-8) throw NumericalError("Wigner table does not sum to 1");
}

double WignerTable::sum() const {
  // Pairwise-ish accumulation via long double keeps large tables stable.
  long double s = 0.0L;
  for (double x : w_) s += x;
  return static_cast<double>(s);
}

double WignerTable::min() const { return *std::min_element(w_.begin(), w_.end()); }

WignerTable wigner_of(const DensityMatrix& rho) {
  return wigner_of(rho, PhaseSpace::standard(PrimeDim(rho.q())));
}

WignerTable wigner_of(const DensityMatrix& rho, const PhaseSpace& space) {
  const int q = space.q();
  if (q != rho.q()) throw ValidationError("phase space and density matrix disagree on q");
  const int n = rho.n();
  const int qq = q * q;
  const std::int64_t dim = rho.dim();
  const std::int64_t total = ipow(qq, n);

  // Interleave (i_k, j_k) pairs so each site owns one q^2-sized axis.
  std::vector<std::int64_t> row_spread(dim), col_spread(dim);
  for (std::int64_t i = 0; i < dim; ++i) {
    std::int64_t r = 0, c = 0;
    std::int64_t rem = i;
    std::int64_t stride = 1;
    for (int k = n - 1; k >= 0; --k) {
      const int digit = static_cast<int>(rem % q);
      rem /= q;
      r += static_cast<std::int64_t>(digit) * q * stride;
      c += static_cast<std::int64_t>(digit) * stride;
      stride *= qq;
    }
    row_spread[i] = r;
    col_spread[i] = c;
  }
  std::vector<cplx> t(total);
  const Mat& m = rho.matrix();
  for (std::int64_t j = 0; j < dim; ++j)
    for (std::int64_t i = 0; i < dim; ++i) t[row_spread[i] + col_spread[j]] = m(i, j);

  // transform[u][(i, j)] = A_u[j, i], so that Tr(rho A_u) is a contraction over (i, j).
  Mat transform(qq, qq);
  for (int u = 0; u < qq; ++u)
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) transform(u, i * q + j) = space.site_operator(u)(j, i);

  using RowMajorMap = Eigen::Map<Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  constexpr std::int64_t kChunk = 4096;
  Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> tmp;
  for (int k = 0; k < n; ++k) {
    const std::int64_t stride = ipow(qq, n - 1 - k);
    const std::int64_t outer = ipow(qq, k);
    for (std::int64_t o = 0; o < outer; ++o) {
      RowMajorMap block(t.data() + o * qq * stride, qq, stride);
      for (std::int64_t c0 = 0; c0 < stride; c0 += kChunk) {
        const std::int64_t w = std::min(kChunk, stride - c0);
        tmp.noalias() = transform * block.middleCols(c0, w);
        block.middleCols(c0, w) = tmp;
      }
    }
  }

  const double scale = 1.0 / static_cast<double>(dim);
  std::vector<double> w(total);
  double worst_imag = 0.0;
  for (std::int64_t x = 0; x < total; ++x) {
    w[x] = t[x].real() * scale;
    worst_imag = std::max(worst_imag, std::abs(t[x].imag()) * scale);
  }
  if (worst_imag > 1e-10) throw NumericalError("Wigner coefficients have imaginary parts above 1e-10");
  return WignerTable(space.dim(), n, std::move(w));
}

ManaReport mana(const WignerTable& w) {
  long double l1 = 0.0L, total = 0.0L, l2 = 0.0L;
  double lo = INFINITY;
  for (double x : w.values()) {
    l1 += std::abs(x);
    total += x;
    l2 += static_cast<long double>(x) * x;
    lo = std::min(lo, x);
  }
  ManaReport r;
  r.n_sites = w.n();
  r.neg_sum = static_cast<double>(l1 / total);
  r.mana = std::max(0.0, static_cast<double>(std::log(l1) - std::log(total)));
  r.mana_density = r.mana / w.n();
  r.min_w = lo;
  const double dim = static_cast<double>(ipow(w.q().value(), w.n()));
  r.renyi2 = -std::log(dim * static_cast<double>(l2 / (total * total)));
  return r;
}

double renyi2(const DensityMatrix& rho) {
  const double purity = (rho.matrix() * rho.matrix()).trace().real();
  return -std::log(purity);
}

double entanglement_entropy(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Mat> es(rho.matrix(), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (double p : es.eigenvalues())
    if (p > 0.0) s -= p * std::log(p);
  return s;
}

Mat partial_trace(const Mat& rho, int d, int n, std::span<const int> keep) {
  std::vector<int> traced;
  for (int s = 0; s < n; ++s)
    if (std::find(keep.begin(), keep.end(), s) == keep.end()) traced.push_back(s);
  const auto nk = static_cast<int>(keep.size());
  const auto nt = static_cast<int>(traced.size());
  const std::int64_t dk = ipow(d, nk), dt = ipow(d, nt);
  Mat out = Mat::Zero(dk, dk);
  std::vector<int> full(n);
  auto compose = [&](std::int64_t ki, std::int64_t ti) {
    const auto kd = digits(ki, d, nk);
    const auto td = digits(ti, d, nt);
    for (int a = 0; a < nk; ++a) full[keep[a]] = kd[a];
    for (int a = 0; a < nt; ++a) full[traced[a]] = td[a];
    return from_digits(full, d);
  };
  for (std::int64_t t = 0; t < dt; ++t)
    for (std::int64_t i = 0; i < dk; ++i) {
      const auto r = compose(i, t);
      for (std::int64_t j = 0; j < dk; ++j) out(i, j) += rho(r, compose(j, t));
    }
  return out;
}

Mat random_clifford(int n, int depth, std::mt19937_64& rng) {
  const PrimeDim q(3);
  const auto g = clifford_generators(q);
  const auto dim = static_cast<int>(ipow(3, n));
  Mat u = Mat::Identity(dim, dim);
  std::uniform_int_distribution<int> site(0, n - 1);
  std::uniform_int_distribution<int> kind(0, n > 1 ? 2 : 1);
  for (int step = 0; step < depth; ++step) {
    const int k = kind(rng);
    Mat gate;
    if (k < 2) {
      gate = embed(k == 0 ? g.K : g.H, site(rng), n, 3);
    } else {
      int a = site(rng), b = site(rng);
      while (b == a) b = site(rng);
      // S on (a, b): |x_a, x_b> -> |x_a, x_a + x_b>
      gate = Mat::Zero(dim, dim);
      for (int idx = 0; idx < dim; ++idx) {
        auto ds = digits(idx, 3, n);
        ds[b] = (ds[a] + ds[b]) % 3;
        gate(from_digits(ds, 3), idx) = 1.0;
      }
    }
    u = gate * u;
  }
  return u;
}

Mat pauli_measurement_channel(const Mat& rho, const PrimeDim& q, const PhasePoint& u) {
  const Mat p = pauli_string(q, u);
  Mat out = Mat::Zero(rho.rows(), rho.cols());
  Mat pm = Mat::Identity(rho.rows(), rho.cols());
  for (int m = 0; m < q.value(); ++m) {
    out += pm * rho * pm.adjoint();
    pm = p * pm;
  }
  return out / static_cast<double>(q.value());
}

MonotonicityReport monotonicity_suite(const DensityMatrix& rho, int trials, std::mt19937_64& rng) {
  if (rho.q() != 3 || rho.n() > 3) throw ValidationError("monotonicity_suite: qutrits, n <= 3");
  const PrimeDim q(3);
  const int n = rho.n();
  const double base = mana(wigner_of(rho)).mana;
  MonotonicityReport rep;
  for (int t = 0; t < trials; ++t) {
    const Mat u = random_clifford(n, 8 * n + 4, rng);
    const DensityMatrix out(u * rho.matrix() * u.adjoint(), 3, DensityMatrix::Check::structural);
    const double dev = std::abs(mana(wigner_of(out)).mana - base);
    rep.max_clifford_deviation = std::max(rep.max_clifford_deviation, dev);
    ++rep.clifford_trials;
    if (dev > 1e-10)
      rep.failures.push_back("Clifford trial " + std::to_string(t) + " changed mana by " +
                             std::to_string(dev));
  }
  std::uniform_int_distribution<std::int64_t> pick(1, ipow(9, n) - 1);
  for (int t = 0; t < trials; ++t) {
    const PhasePoint u = PhasePoint::from_index(pick(rng), q, n);
    const DensityMatrix out(pauli_measurement_channel(rho.matrix(), q, u), 3,
                            DensityMatrix::Check::structural);
    const double inc = mana(wigner_of(out)).mana - base;
    rep.max_measurement_increase = std::max(rep.max_measurement_increase, inc);
    ++rep.measurement_trials;
    if (inc > 1e-9)
      rep.failures.push_back("Pauli measurement trial " + std::to_string(t) + " increased mana by " +
                             std::to_string(inc));
  }
  return rep;
}

HullDistance stab_hull_distance(const DensityMatrix& rho, double gap_tol, int max_iterations) {
  if (rho.q() != 3 || rho.n() > 2) throw ValidationError("stab_hull_distance: qutrits, n <= 2");
  const auto states = stabilizer_states(PrimeDim(3), rho.n());
  const auto m = static_cast<int>(states.size());
  RMat gram(m, m);
  RVec c(m);
  for (int i = 0; i < m; ++i) {
    c(i) = (states[i].adjoint() * rho.matrix() * states[i])(0, 0).real();
    for (int j = 0; j < m; ++j) gram(i, j) = std::norm(states[i].dot(states[j]));
  }
  const double purity = (rho.matrix() * rho.matrix()).trace().real();

  // f(p) = purity - 2 c.p + p^T G p, minimized over the simplex.
  RVec p = RVec::Zero(m);
  int start = 0;
  c.maxCoeff(&start);
  p(start) = 1.0;
  RVec gp = gram * p;
  HullDistance out;
  int it = 0;
  double gap = INFINITY;
  for (; it < max_iterations; ++it) {
    const RVec grad = 2.0 * (gp - c);
    int s = 0;
    grad.minCoeff(&s);
    int v = -1;
    double worst = -INFINITY;
    for (int i = 0; i < m; ++i)
      if (p(i) > 0.0 && grad(i) > worst) {
        worst = grad(i);
        v = i;
      }
    gap = grad.dot(p) - grad(s);
    if (gap < gap_tol || s == v) break;
    // Pairwise step: move weight from the away vertex v to the toward vertex s.
    const double slope = grad(s) - grad(v);
    const double curv = gram(s, s) + gram(v, v) - 2.0 * gram(s, v);
    double step = curv > 0.0 ? -slope / (2.0 * curv) : p(v);
    step = std::clamp(step, 0.0, p(v));
    if (step <= 0.0) break;
    p(s) += step;
    p(v) -= step;
    if (p(v) < 1e-15) p(v) = 0.0;
    gp += step * (gram.col(s) - gram.col(v));
  }
  const double f = std::max(0.0, purity - 2.0 * c.dot(p) + p.dot(gp));
  out.distance = std::sqrt(f);
  out.gap = std::max(0.0, gap);
  out.iterations = it;
  out.weights.assign(p.data(), p.data() + m);
  return out;
}

}  // namespace magic
