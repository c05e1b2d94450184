#include "magic/potts.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "magic/errors.hpp"
#include "magic/qudit.hpp"

namespace magic {

void PottsParams::validate() const {
  if (N < 2) throw ValidationError("Potts chain needs N >= 2");
  if (!std::isfinite(theta) || theta < -1e-12 || theta > kPi / 2 + 1e-12)
    throw ValidationError("theta must lie in [0, pi/2]");
  if (!std::isfinite(lambda) || lambda < 0.0) throw ValidationError("lambda must be >= 0");
}

PottsLocalOps potts_local_ops() {
  PottsLocalOps ops;
  ops.C = RMat::Zero(3, 3);
  ops.S = RMat::Zero(3, 3);
  for (int n = 0; n < 3; ++n) {
    ops.C(n, n) = std::cos(2.0 * kPi * n / 3.0);
    ops.S(n, n) = std::sin(2.0 * kPi * n / 3.0);
  }
  ops.F = RMat::Ones(3, 3) - RMat::Identity(3, 3);
  return ops;
}

namespace {

// H|c> for a computational basis state, as (diagonal, list of off-diagonal targets).
struct Row {
  double diag = 0.0;
  std::vector<std::pair<std::int64_t, double>> off;
};

Row hamiltonian_row(const PottsParams& p, std::int64_t index) {
  const auto ds = digits(index, 3, p.N);
  const double st = std::sin(p.theta), ct = std::cos(p.theta);
  Row row;
  for (int j = 0; j + 1 < p.N; ++j)
    row.diag -= 2.0 * st * std::cos(2.0 * kPi * (ds[j + 1] - ds[j]) / 3.0);
  for (int j = 0; j < p.N; ++j) row.diag -= 2.0 * p.lambda * std::cos(2.0 * kPi * ds[j] / 3.0);
  if (ct != 0.0) {
    const std::int64_t base = ipow(3, p.N);
    for (int j = 0; j < p.N; ++j) {
      const std::int64_t stride = ipow(3, p.N - 1 - j);
      for (int shift = 1; shift <= 2; ++shift) {
        const int nd = (ds[j] + shift) % 3;
        const std::int64_t target = index + (nd - ds[j]) * stride;
        if (target >= 0 && target < base) row.off.emplace_back(target, -ct);
      }
    }
  }
  return row;
}

// Sector Hamiltonian for charge k in the basis of shift-orbit representatives (first digit 0).
Mat sector_hamiltonian(const PottsParams& p, int k) {
  const std::int64_t reps = ipow(3, p.N - 1);
  const std::int64_t top = ipow(3, p.N - 1);
  const PrimeDim q(3);
  Mat h = Mat::Zero(reps, reps);
  auto locate = [&](std::int64_t c, std::int64_t& rep, int& m) {
    auto ds = digits(c, 3, p.N);
    m = ds[0];
    for (auto& x : ds) x = (x - m + 3) % 3;
    rep = from_digits(ds, 3);
  };
  for (std::int64_t o = 0; o < reps; ++o) {
    const Row row = hamiltonian_row(p, o);
    h(o, o) += row.diag;
    for (const auto& [c, v] : row.off) {
      std::int64_t rep;
      int m;
      if (c < top) {
        rep = c;
        m = 0;
      } else {
        locate(c, rep, m);
      }
      h(rep, o) += v * q.omega(static_cast<std::int64_t>(k) * m);
    }
  }
  return h;
}

Vec sector_to_full(const Vec& x, int k, int n) {
  const PrimeDim q(3);
  Vec psi(ipow(3, n));
  const std::int64_t reps = ipow(3, n - 1);
  for (std::int64_t o = 0; o < reps; ++o) {
    auto ds = digits(o, 3, n);
    for (int m = 0; m < 3; ++m) {
      std::vector<int> shifted(ds);
      for (auto& v : shifted) v = (v + m) % 3;
      psi(from_digits(shifted, 3)) = x(o) * q.omega(-static_cast<std::int64_t>(k) * m) / std::sqrt(3.0);
    }
  }
  return psi;
}

}  // namespace

RMat potts_hamiltonian_dense(const PottsParams& p) {
  p.validate();
  if (p.N > 8) throw ValidationError("dense Hamiltonian limited to N <= 8");
  const std::int64_t dim = ipow(3, p.N);
  RMat h = RMat::Zero(dim, dim);
  for (std::int64_t c = 0; c < dim; ++c) {
    const Row row = hamiltonian_row(p, c);
    h(c, c) += row.diag;
    for (const auto& [t, v] : row.off) h(t, c) += v;
  }
  return h;
}

PottsMpo potts_mpo(const PottsParams& p) {
  p.validate();
  const auto ops = potts_local_ops();
  const double st = std::sin(p.theta), ct = std::cos(p.theta);
  const RMat id = RMat::Identity(3, 3);
  std::array<RMat, 16> w;
  w[0 * 4 + 0] = id;
  w[1 * 4 + 0] = ops.C;
  w[2 * 4 + 0] = ops.S;
  const RMat onsite = -ct * ops.F - 2.0 * p.lambda * ops.C;
  if (onsite.cwiseAbs().maxCoeff() > 0.0) w[3 * 4 + 0] = onsite;
  if (st != 0.0) {
    w[3 * 4 + 1] = -2.0 * st * ops.C;
    w[3 * 4 + 2] = -2.0 * st * ops.S;
  }
  w[3 * 4 + 3] = id;
  PottsMpo mpo;
  mpo.sites.assign(p.N, w);
  return mpo;
}

ExactGroundState exact_ground_state(const PottsParams& p, bool symmetric) {
  p.validate();
  if (p.N > 8) throw ValidationError("exact diagonalization limited to N <= 8");
  ExactGroundState best;
  best.energy = INFINITY;
  {
    // Charge 0 is real in the orbit basis.
    Eigen::SelfAdjointEigenSolver<RMat> es(sector_hamiltonian(p, 0).real());
    best.energy = es.eigenvalues()(0);
    best.state = sector_to_full(es.eigenvectors().col(0).cast<cplx>(), 0, p.N);
  }
  if (!symmetric) {
    Eigen::SelfAdjointEigenSolver<Mat> es(sector_hamiltonian(p, 1));
    const double e = es.eigenvalues()(0);
    if (e < best.energy - 1e-10) {
      best.energy = e;
      best.sector = 1;
      best.state = sector_to_full(es.eigenvectors().col(0), 1, p.N);
    }
  }
  best.state = canonical_phase(best.state);
  return best;
}

RVec potts_spectrum(const PottsParams& p) {
  p.validate();
  if (p.N > 8) throw ValidationError("spectrum limited to N <= 8");
  std::vector<double> all;
  for (int k = 0; k < 2; ++k) {
    const Mat h = sector_hamiltonian(p, k);
    const RVec ev = k == 0 ? RVec(Eigen::SelfAdjointEigenSolver<RMat>(h.real(), Eigen::EigenvaluesOnly).eigenvalues())
                           : RVec(Eigen::SelfAdjointEigenSolver<Mat>(h, Eigen::EigenvaluesOnly).eigenvalues());
    for (double e : ev) {
      all.push_back(e);
      if (k == 1) all.push_back(e);  // charge 2 is the complex conjugate of charge 1
    }
  }
  std::sort(all.begin(), all.end());
  return Eigen::Map<RVec>(all.data(), static_cast<Eigen::Index>(all.size()));
}

DualityReport duality_checks(int n) {
  if (n < 2 || n > 6) throw ValidationError("duality checks run on 2 <= N <= 6");
  const PrimeDim q(3);
  const Mat z = clock(q), x = shift(q);
  const auto dim = ipow(3, n);
  std::vector<Mat> xt, zt;
  for (int j = 0; j + 1 < n; ++j) xt.push_back(embed(z, j, n, 3) * embed(z.adjoint(), j + 1, n, 3));
  for (int l = 0; l < n; ++l) {
    Mat m = Mat::Identity(dim, dim);
    for (int k = l + 1; k < n; ++k) m = m * embed(x, k, n, 3);
    zt.push_back(m);
  }
  DualityReport rep;
  const Mat id = Mat::Identity(dim, dim);
  auto record = [&](double res, const std::string& what) {
    ++rep.checked;
    rep.max_residual = std::max(rep.max_residual, res);
    if (res > 1e-12) rep.failures.push_back(what + " (residual " + std::to_string(res) + ")");
  };
  for (std::size_t j = 0; j < xt.size(); ++j) {
    record((xt[j] * xt[j] * xt[j] - id).cwiseAbs().maxCoeff(), "Xt_" + std::to_string(j) + "^3 != I");
    for (std::size_t l = 0; l < zt.size(); ++l) {
      const cplx expect = (j == l) ? q.omega(-1) : cplx(1.0);
      const Mat lhs = xt[j] * zt[l];
      const Mat rhs = zt[l] * xt[j];
      if (j == l) rep.diagonal_phase = (rhs.adjoint() * lhs).trace() / static_cast<double>(dim);
      record((lhs - expect * rhs).cwiseAbs().maxCoeff(),
             "Xt_" + std::to_string(j) + " Zt_" + std::to_string(l) + " ordering relation");
    }
  }
  for (std::size_t l = 0; l < zt.size(); ++l)
    record((zt[l] * zt[l] * zt[l] - id).cwiseAbs().maxCoeff(), "Zt_" + std::to_string(l) + "^3 != I");
  return rep;
}

}  // namespace magic
