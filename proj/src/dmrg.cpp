#include "magic/dmrg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "magic/errors.hpp"

namespace magic {

void DMRGConfig::validate() const {
  if (!(svd_cutoff > 0.0) || !(energy_tol > 0.0)) throw ValidationError("DMRG cutoffs must be positive");
  if (max_sweeps < 1 || max_bond < 1 || lanczos_max_iter < 2)
    throw ValidationError("DMRG iteration limits must be positive");
  if (init_bias < 0 || init_bias > 2) throw ValidationError("init_bias must be 0, 1 or 2");
}

namespace {

constexpr int kD = 3;
constexpr int kW = 4;

using Env = std::array<RMat, kW>;  // one (bra x ket) block per MPO bond index; empty == zero

Eigen::Index left_dim(const RMat& a) { return a.rows() / kD; }

auto blk(const RMat& a, int s) { return a.middleRows(s * left_dim(a), left_dim(a)); }

Env update_left(const Env& l, const RMat& a, const PottsMpo& mpo, int j) {
  const Eigen::Index dr = a.cols();
  Env out;
  std::array<RMat, kD * kD> h;
  for (int wl = 0; wl < kW; ++wl) {
    if (l[wl].size() == 0) continue;
    bool used = false;
    for (int wr = 0; wr < kW; ++wr) used = used || mpo.at(j, wl, wr).size() > 0;
    if (!used) continue;
    for (int s = 0; s < kD; ++s) {
      const RMat f = l[wl] * blk(a, s);
      for (int sp = 0; sp < kD; ++sp) h[sp * kD + s].noalias() = blk(a, sp).transpose() * f;
    }
    for (int wr = 0; wr < kW; ++wr) {
      const RMat& w = mpo.at(j, wl, wr);
      if (w.size() == 0) continue;
      if (out[wr].size() == 0) out[wr] = RMat::Zero(dr, dr);
      for (int sp = 0; sp < kD; ++sp)
        for (int s = 0; s < kD; ++s)
          if (w(sp, s) != 0.0) out[wr] += w(sp, s) * h[sp * kD + s];
    }
  }
  return out;
}

Env update_right(const Env& r, const RMat& a, const PottsMpo& mpo, int j) {
  const Eigen::Index dl = left_dim(a);
  Env out;
  std::array<RMat, kD * kD> h;
  for (int wr = 0; wr < kW; ++wr) {
    if (r[wr].size() == 0) continue;
    bool used = false;
    for (int wl = 0; wl < kW; ++wl) used = used || mpo.at(j, wl, wr).size() > 0;
    if (!used) continue;
    for (int s = 0; s < kD; ++s) {
      const RMat g = r[wr] * blk(a, s).transpose();
      for (int sp = 0; sp < kD; ++sp) h[sp * kD + s].noalias() = blk(a, sp) * g;
    }
    for (int wl = 0; wl < kW; ++wl) {
      const RMat& w = mpo.at(j, wl, wr);
      if (w.size() == 0) continue;
      if (out[wl].size() == 0) out[wl] = RMat::Zero(dl, dl);
      for (int sp = 0; sp < kD; ++sp)
        for (int s = 0; s < kD; ++s)
          if (w(sp, s) != 0.0) out[wl] += w(sp, s) * h[sp * kD + s];
    }
  }
  return out;
}

// Two-site effective Hamiltonian acting on psi, a (d Dl) x (d Dr) matrix with
// block (s1, s2) = Theta^{s1 s2}.
class TwoSiteOperator {
 public:
  TwoSiteOperator(const Env& l, const Env& r, const PottsMpo& mpo, int j, Eigen::Index dl, Eigen::Index dr)
      : l_(l), r_(r), mpo_(mpo), j_(j), dl_(dl), dr_(dr) {}

  RMat apply(const RMat& psi) const {
    // t1[w2][s1][s2] = Theta^{s1 s2} R[w2]^T
    std::array<std::array<RMat, kD * kD>, kW> t1;
    for (int w2 = 0; w2 < kW; ++w2) {
      if (r_[w2].size() == 0) continue;
      for (int s1 = 0; s1 < kD; ++s1)
        for (int s2 = 0; s2 < kD; ++s2)
          t1[w2][s1 * kD + s2].noalias() = psi.block(s1 * dl_, s2 * dr_, dl_, dr_) * r_[w2].transpose();
    }
    // t2[w1][s1][t2] = sum_{w2, s2} W2[w1][w2](t2, s2) t1[w2][s1][s2]
    std::array<std::array<RMat, kD * kD>, kW> t2;
    for (int w1 = 0; w1 < kW; ++w1)
      for (int w2 = 0; w2 < kW; ++w2) {
        const RMat& w = mpo_.at(j_ + 1, w1, w2);
        if (w.size() == 0 || r_[w2].size() == 0) continue;
        for (int s1 = 0; s1 < kD; ++s1)
          for (int o2 = 0; o2 < kD; ++o2)
            for (int s2 = 0; s2 < kD; ++s2) {
              const double c = w(o2, s2);
              if (c == 0.0) continue;
              RMat& dst = t2[w1][s1 * kD + o2];
              if (dst.size() == 0) dst = RMat::Zero(dl_, dr_);
              dst += c * t1[w2][s1 * kD + s2];
            }
      }
    RMat out = RMat::Zero(kD * dl_, kD * dr_);
    for (int w0 = 0; w0 < kW; ++w0) {
      if (l_[w0].size() == 0) continue;
      for (int o1 = 0; o1 < kD; ++o1)
        for (int o2 = 0; o2 < kD; ++o2) {
          RMat t3;
          for (int w1 = 0; w1 < kW; ++w1) {
            const RMat& w = mpo_.at(j_, w0, w1);
            if (w.size() == 0) continue;
            for (int s1 = 0; s1 < kD; ++s1) {
              const double c = w(o1, s1);
              const RMat& src = t2[w1][s1 * kD + o2];
              if (c == 0.0 || src.size() == 0) continue;
              if (t3.size() == 0) t3 = RMat::Zero(dl_, dr_);
              t3 += c * src;
            }
          }
          if (t3.size() > 0) out.block(o1 * dl_, o2 * dr_, dl_, dr_).noalias() += l_[w0] * t3;
        }
    }
    return out;
  }

 private:
  const Env& l_;
  const Env& r_;
  const PottsMpo& mpo_;
  int j_;
  Eigen::Index dl_, dr_;
};

struct Eigenpair {
  double value;
  RMat vector;
};

Eigenpair lanczos(const TwoSiteOperator& op, const RMat& start, int max_iter, double tol) {
  const Eigen::Index rows = start.rows(), cols = start.cols();
  std::vector<RMat> basis;
  std::vector<double> alpha, beta;
  RMat v = start / start.norm();
  double prev = INFINITY;
  RVec ritz;
  double value = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    basis.push_back(v);
    RMat w = op.apply(v);
    alpha.push_back((w.array() * v.array()).sum());
    // Full reorthogonalization, applied twice for stability.
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) w -= (w.array() * b.array()).sum() * b;
    const double bnorm = w.norm();

    const auto m = static_cast<Eigen::Index>(alpha.size());
    RMat tri = RMat::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      tri(i, i) = alpha[i];
      if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<RMat> es(tri);
    value = es.eigenvalues()(0);
    ritz = es.eigenvectors().col(0);
    if (bnorm < 1e-12 || std::abs(value - prev) < tol) break;
    prev = value;
    beta.push_back(bnorm);
    v = w / bnorm;
  }
  RMat out = RMat::Zero(rows, cols);
  for (Eigen::Index i = 0; i < ritz.size(); ++i) out += ritz(i) * basis[i];
  out /= out.norm();
  return {value, out};
}

RMat two_site(const RMat& a, const RMat& b) {
  const Eigen::Index dl = left_dim(a), dm = a.cols(), dr = b.cols();
  RMat psi(kD * dl, kD * dr);
  for (int s1 = 0; s1 < kD; ++s1)
    for (int s2 = 0; s2 < kD; ++s2)
      psi.block(s1 * dl, s2 * dr, dl, dr).noalias() = blk(a, s1) * b.middleRows(s2 * dm, dm);
  return psi;
}

struct Split {
  RMat left, right;  // left: (d Dl) x k, right: (d k) x Dr
  double discarded;
};

// SVD split; the singular values go to the right factor if `move_right`, else to the left.
Split split(const RMat& psi, Eigen::Index dl, Eigen::Index dr, double cutoff, int max_bond, bool move_right) {
  Eigen::JacobiSVD<RMat> svd(psi, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVec s = svd.singularValues();
  const double total = s.squaredNorm();
  Eigen::Index keep = s.size();
  double discarded = 0.0;
  while (keep > 1) {
    const double w = s(keep - 1) * s(keep - 1);
    if (discarded + w > cutoff * total) break;
    discarded += w;
    --keep;
  }
  // Do not cut through a degenerate multiplet; that would break the Z_3 symmetry.
  while (keep < s.size() && keep < max_bond && s(keep) > s(keep - 1) * (1.0 - 1e-7)) ++keep;
  keep = std::min<Eigen::Index>(keep, max_bond);
  discarded = (total - s.head(keep).squaredNorm()) / total;
  const RVec sk = s.head(keep) / s.head(keep).norm();

  RMat u = svd.matrixU().leftCols(keep);
  RMat vt = svd.matrixV().leftCols(keep).transpose();  // keep x (d Dr)
  if (move_right)
    vt = sk.asDiagonal() * vt;
  else
    u = u * sk.asDiagonal();
  // u rows are already (s1, a); reshape vt columns (s2, b) into rows (s2, k).
  RMat right(kD * keep, dr);
  for (int s2 = 0; s2 < kD; ++s2) right.middleRows(s2 * keep, keep) = vt.middleCols(s2 * dr, dr);
  (void)dl;
  return {u, right, std::max(0.0, discarded)};
}

Env left_boundary() {
  Env e;
  e[3] = RMat::Ones(1, 1);
  return e;
}

Env right_boundary() {
  Env e;
  e[0] = RMat::Ones(1, 1);
  return e;
}

}  // namespace

DMRGResult dmrg_ground_state(const PottsParams& p, const DMRGConfig& cfg, const SweepObserver& observer) {
  p.validate();
  cfg.validate();
  const int n = p.N;
  const PottsMpo mpo = potts_mpo(p);

  std::vector<RMat> a(n);
  RVec local = RVec::Zero(kD);
  if (p.theta <= kThetaCritical)
    local.setConstant(1.0 / std::sqrt(3.0));
  else
    local(cfg.init_bias) = 1.0;
  for (auto& t : a) t = local;

  std::vector<Env> left(n), right(n);
  left[0] = left_boundary();
  right[n - 1] = right_boundary();
  for (int j = n - 1; j > 0; --j) right[j - 1] = update_right(right[j], a[j], mpo, j);

  DMRGResult res;
  double last = INFINITY, delta = INFINITY, energy = 0.0;
  for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    double discarded = 0.0;
    for (int j = 0; j + 1 < n; ++j) {
      const Eigen::Index dl = left_dim(a[j]), dr = a[j + 1].cols();
      TwoSiteOperator op(left[j], right[j + 1], mpo, j, dl, dr);
      const auto eig = lanczos(op, two_site(a[j], a[j + 1]), cfg.lanczos_max_iter, cfg.lanczos_tol);
      energy = eig.value;
      auto sp = split(eig.vector, dl, dr, cfg.svd_cutoff, cfg.max_bond, true);
      discarded = std::max(discarded, sp.discarded);
      a[j] = std::move(sp.left);
      a[j + 1] = std::move(sp.right);
      left[j + 1] = update_left(left[j], a[j], mpo, j);
    }
    for (int j = n - 2; j >= 0; --j) {
      const Eigen::Index dl = left_dim(a[j]), dr = a[j + 1].cols();
      TwoSiteOperator op(left[j], right[j + 1], mpo, j, dl, dr);
      const auto eig = lanczos(op, two_site(a[j], a[j + 1]), cfg.lanczos_max_iter, cfg.lanczos_tol);
      energy = eig.value;
      auto sp = split(eig.vector, dl, dr, cfg.svd_cutoff, cfg.max_bond, false);
      discarded = std::max(discarded, sp.discarded);
      a[j] = std::move(sp.left);
      a[j + 1] = std::move(sp.right);
      right[j] = update_right(right[j + 1], a[j + 1], mpo, j + 1);
    }
    res.sweep_energies.push_back(energy);
    res.max_discarded = discarded;
    res.sweeps = sweep + 1;
    int chi = 1;
    for (const auto& t : a) chi = std::max<int>(chi, static_cast<int>(t.cols()));
    if (observer) observer(sweep, energy, chi);
    delta = std::abs(energy - last);
    last = energy;
    if (sweep + 1 >= cfg.min_sweeps && delta < cfg.energy_tol) break;
  }
  if (!(delta < cfg.energy_tol)) {
    std::ostringstream msg;
    msg << "DMRG did not converge in " << cfg.max_sweeps << " sweeps; last energy change " << delta;
    throw NumericalError(msg.str());
  }

  res.energy = energy;
  res.state.d = kD;
  res.state.center = 0;
  res.state.cutoff = cfg.svd_cutoff;
  for (const auto& t : a) res.state.tensors.push_back(t.cast<cplx>());
  res.state.tensors[0] /= res.state.tensors[0].norm();
  res.max_canonical_residual = canonical_residual(res.state);
  return res;
}

}  // namespace magic
