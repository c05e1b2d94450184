#include "magic/mps.hpp"

#include <algorithm>
#include <cmath>

#include "magic/errors.hpp"
#include "magic/qudit.hpp"

namespace magic {

SubsystemSpec SubsystemSpec::contiguous(int first, int length) {
  if (length < 1) throw ValidationError("subsystem length must be positive");
  return SubsystemSpec{{{first, first + length - 1}}};
}

SubsystemSpec SubsystemSpec::blocks(int first_a, int len_a, int first_b, int len_b) {
  if (len_a < 1 || len_b < 1) throw ValidationError("block lengths must be positive");
  return SubsystemSpec{{{first_a, first_a + len_a - 1}, {first_b, first_b + len_b - 1}}};
}

std::vector<int> SubsystemSpec::sites() const {
  std::vector<int> out;
  for (const auto& [a, b] : intervals)
    for (int s = a; s <= b; ++s) out.push_back(s);
  return out;
}

int SubsystemSpec::size() const {
  int n = 0;
  for (const auto& [a, b] : intervals) n += b - a + 1;
  return n;
}

void SubsystemSpec::validate(int n_sites) const {
  if (intervals.empty()) throw ValidationError("empty subsystem");
  int prev = -1;
  for (const auto& [a, b] : intervals) {
    if (a > b) throw ValidationError("subsystem interval has first > last");
    if (a <= prev) throw ValidationError("subsystem intervals overlap or are unsorted");
    if (a < 0 || b >= n_sites) throw ValidationError("subsystem interval outside the chain");
    prev = b;
  }
}

int Mps::max_bond() const {
  Eigen::Index m = 1;
  for (const auto& t : tensors) m = std::max(m, t.cols());
  return static_cast<int>(m);
}

namespace {

// Dl x (d * Dr) view with column s * Dr + b.
Mat right_matrix(const Mat& a, int d) {
  const Eigen::Index dl = a.rows() / d, dr = a.cols();
  Mat b(dl, d * dr);
  for (int s = 0; s < d; ++s) b.middleCols(s * dr, dr) = a.middleRows(s * dl, dl);
  return b;
}

Mat from_right_matrix(const Mat& b, int d) {
  const Eigen::Index dl = b.rows(), dr = b.cols() / d;
  Mat a(d * dl, dr);
  for (int s = 0; s < d; ++s) a.middleRows(s * dl, dl) = b.middleCols(s * dr, dr);
  return a;
}

void thin_qr(const Mat& m, Mat& q, Mat& r) {
  const Eigen::Index k = std::min(m.rows(), m.cols());
  Eigen::HouseholderQR<Mat> qr(m);
  q = qr.householderQ() * Mat::Identity(m.rows(), k);
  r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
}

Mat left_multiply_blocks(const Mat& r, const Mat& a, int d) {
  const Eigen::Index dl = a.rows() / d;
  Mat out(d * r.rows(), a.cols());
  for (int s = 0; s < d; ++s) out.middleRows(s * r.rows(), r.rows()) = r * a.middleRows(s * dl, dl);
  return out;
}

Mat right_multiply_blocks(const Mat& a, const Mat& l, int d) {
  const Eigen::Index dl = a.rows() / d;
  Mat out(a.rows(), l.cols());
  for (int s = 0; s < d; ++s) out.middleRows(s * dl, dl) = a.middleRows(s * dl, dl) * l;
  return out;
}

Mat transfer_left(const Mps& psi, int j, const Mat& e, const Mat* op) {
  const int d = psi.d;
  Mat out = Mat::Zero(psi.right_dim(j), psi.right_dim(j));
  std::vector<Mat> f(d);
  for (int s = 0; s < d; ++s) f[s] = e * psi.block(j, s);
  for (int sp = 0; sp < d; ++sp) {
    Mat g = Mat::Zero(e.rows(), psi.right_dim(j));
    bool any = false;
    for (int s = 0; s < d; ++s) {
      const cplx c = op ? (*op)(sp, s) : cplx(sp == s ? 1.0 : 0.0);
      if (c == cplx(0.0)) continue;
      g += c * f[s];
      any = true;
    }
    if (any) out.noalias() += psi.block(j, sp).adjoint() * g;
  }
  return out;
}

Mat transfer_right(const Mps& psi, int j, const Mat& r, const Mat* op) {
  const int d = psi.d;
  Mat out = Mat::Zero(psi.left_dim(j), psi.left_dim(j));
  std::vector<Mat> g(d);
  for (int s = 0; s < d; ++s) g[s] = r * psi.block(j, s).transpose();
  for (int sp = 0; sp < d; ++sp) {
    Mat h = Mat::Zero(r.rows(), psi.left_dim(j));
    bool any = false;
    for (int s = 0; s < d; ++s) {
      const cplx c = op ? (*op)(sp, s) : cplx(sp == s ? 1.0 : 0.0);
      if (c == cplx(0.0)) continue;
      h += c * g[s];
      any = true;
    }
    if (any) out.noalias() += psi.block(j, sp).conjugate() * h;
  }
  return out;
}

cplx contract(const Mat& e, const Mat& r) { return e.cwiseProduct(r).sum(); }

// Apply every basis operator at site j to every left environment.
std::vector<Mat> basis_transfer_left(const Mps& psi, int j, const std::vector<Mat>& envs,
                                     std::span<const Mat> basis) {
  const int d = psi.d;
  const auto k = basis.size();
  std::vector<Mat> out(envs.size() * k);
  std::vector<Mat> h(d * d);
  for (std::size_t e = 0; e < envs.size(); ++e) {
    for (int s = 0; s < d; ++s) {
      const Mat f = envs[e] * psi.block(j, s);
      for (int sp = 0; sp < d; ++sp) h[sp * d + s] = psi.block(j, sp).adjoint() * f;
    }
    for (std::size_t u = 0; u < k; ++u) {
      Mat acc = Mat::Zero(psi.right_dim(j), psi.right_dim(j));
      for (int sp = 0; sp < d; ++sp)
        for (int s = 0; s < d; ++s) {
          const cplx c = basis[u](sp, s);
          if (c != cplx(0.0)) acc += c * h[sp * d + s];
        }
      out[e * k + u] = std::move(acc);
    }
  }
  return out;
}

// Same on the right; the new site's index becomes the most significant one.
std::vector<Mat> basis_transfer_right(const Mps& psi, int j, const std::vector<Mat>& envs,
                                      std::span<const Mat> basis) {
  const int d = psi.d;
  const auto k = basis.size();
  std::vector<Mat> out(envs.size() * k);
  std::vector<Mat> h(d * d);
  for (std::size_t e = 0; e < envs.size(); ++e) {
    for (int s = 0; s < d; ++s) {
      const Mat g = envs[e] * psi.block(j, s).transpose();
      for (int sp = 0; sp < d; ++sp) h[sp * d + s] = psi.block(j, sp).conjugate() * g;
    }
    for (std::size_t u = 0; u < k; ++u) {
      Mat acc = Mat::Zero(psi.left_dim(j), psi.left_dim(j));
      for (int sp = 0; sp < d; ++sp)
        for (int s = 0; s < d; ++s) {
          const cplx c = basis[u](sp, s);
          if (c != cplx(0.0)) acc += c * h[sp * d + s];
        }
      out[u * envs.size() + e] = std::move(acc);
    }
  }
  return out;
}

std::size_t keep_count(const RVec& s, double cutoff, int max_bond) {
  const double total = s.squaredNorm();
  std::size_t keep = s.size();
  double discarded = 0.0;
  while (keep > 1) {
    const double w = s(keep - 1) * s(keep - 1);
    if (discarded + w > cutoff * total) break;
    discarded += w;
    --keep;
  }
  if (max_bond > 0) keep = std::min<std::size_t>(keep, max_bond);
  return keep;
}

}  // namespace

Mps product_mps(std::span<const Vec> local_states) {
  if (local_states.empty()) throw ValidationError("product state needs at least one site");
  Mps psi;
  psi.d = static_cast<int>(local_states.front().size());
  for (const auto& v : local_states) {
    if (v.size() != psi.d) throw ValidationError("product state sites disagree on dimension");
    psi.tensors.push_back(v.normalized());
  }
  psi.center = 0;
  return psi;
}

Mps random_mps(int n_sites, int d, int chi, std::mt19937_64& rng) {
  if (n_sites < 1 || chi < 1) throw ValidationError("random_mps: bad size");
  std::normal_distribution<double> g(0.0, 1.0);
  Mps psi;
  psi.d = d;
  std::vector<Eigen::Index> bond(n_sites + 1, 1);
  for (int b = 1; b < n_sites; ++b)
    bond[b] = std::min<Eigen::Index>({chi, ipow(d, std::min(b, 12)), ipow(d, std::min(n_sites - b, 12))});
  for (int j = 0; j < n_sites; ++j) {
    Mat t(d * bond[j], bond[j + 1]);
    for (Eigen::Index c = 0; c < t.cols(); ++c)
      for (Eigen::Index r = 0; r < t.rows(); ++r) t(r, c) = cplx(g(rng), g(rng));
    psi.tensors.push_back(std::move(t));
  }
  canonicalize(psi, 0);
  return psi;
}

void move_center(Mps& psi, int target) {
  if (target < 0 || target >= psi.size()) throw ValidationError("move_center: site out of range");
  const int d = psi.d;
  Mat q, r;
  while (psi.center < target) {
    const int c = psi.center;
    thin_qr(psi.tensors[c], q, r);
    psi.tensors[c] = q;
    psi.tensors[c + 1] = left_multiply_blocks(r, psi.tensors[c + 1], d);
    ++psi.center;
  }
  while (psi.center > target) {
    const int c = psi.center;
    thin_qr(right_matrix(psi.tensors[c], d).adjoint(), q, r);
    psi.tensors[c] = from_right_matrix(q.adjoint(), d);
    psi.tensors[c - 1] = right_multiply_blocks(psi.tensors[c - 1], r.adjoint(), d);
    --psi.center;
  }
}

void canonicalize(Mps& psi, int center) {
  psi.center = 0;
  move_center(psi, psi.size() - 1);
  move_center(psi, center);
  const double nrm = psi.tensors[center].norm();
  if (nrm < 1e-300) throw NumericalError("cannot normalize a zero MPS");
  psi.tensors[center] /= nrm;
}

double norm(const Mps& psi) {
  Mat e = Mat::Ones(1, 1);
  for (int j = 0; j < psi.size(); ++j) e = transfer_left(psi, j, e, nullptr);
  return std::sqrt(std::abs(e(0, 0)));
}

double canonical_residual(const Mps& psi) {
  double worst = 0.0;
  for (int j = 0; j < psi.size(); ++j) {
    const Mat& a = psi.tensors[j];
    if (j < psi.center) {
      worst = std::max(worst, (a.adjoint() * a - Mat::Identity(a.cols(), a.cols())).cwiseAbs().maxCoeff());
    } else if (j > psi.center) {
      const Mat b = right_matrix(a, psi.d);
      worst = std::max(worst, (b * b.adjoint() - Mat::Identity(b.rows(), b.rows())).cwiseAbs().maxCoeff());
    }
  }
  return std::max(worst, std::abs(psi.tensors[psi.center].norm() - 1.0));
}

Vec to_dense(const Mps& psi) {
  if (psi.size() > 12) throw ValidationError("to_dense: too many sites");
  Mat acc = Mat::Ones(1, 1);
  for (int j = 0; j < psi.size(); ++j) {
    Mat next(acc.rows() * psi.d, psi.right_dim(j));
    for (Eigen::Index r = 0; r < acc.rows(); ++r)
      for (int s = 0; s < psi.d; ++s) next.row(r * psi.d + s) = acc.row(r) * psi.block(j, s);
    acc = std::move(next);
  }
  return acc.col(0);
}

cplx expectation(const Mps& psi, std::span<const std::pair<int, Mat>> ops) {
  Mat e = Mat::Ones(1, 1), n = Mat::Ones(1, 1);
  for (int j = 0; j < psi.size(); ++j) {
    const Mat* op = nullptr;
    for (const auto& [site, m] : ops)
      if (site == j) op = &m;
    e = transfer_left(psi, j, e, op);
    n = transfer_left(psi, j, n, nullptr);
  }
  return e(0, 0) / n(0, 0);
}

std::vector<double> bond_entropies(const Mps& psi_in) {
  Mps psi = psi_in;
  move_center(psi, 0);
  std::vector<double> out;
  for (int j = 0; j + 1 < psi.size(); ++j) {
    Eigen::JacobiSVD<Mat> svd(psi.tensors[j]);
    const RVec s = svd.singularValues();
    const double total = s.squaredNorm();
    double ent = 0.0;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
      const double p = s(k) * s(k) / total;
      if (p > 0.0) ent -= p * std::log(p);
    }
    out.push_back(ent);
    move_center(psi, j + 1);
  }
  return out;
}

std::vector<double> correlation_row(const Mps& psi, int i) {
  const int n = psi.size();
  if (i < 0 || i >= n - 1) throw ValidationError("correlation_row: site out of range");
  const PrimeDim q(psi.d);
  const Mat z = clock(q);
  const Mat zd = z.adjoint();

  std::vector<Mat> right(n);
  right[n - 1] = Mat::Ones(1, 1);
  for (int j = n - 1; j > i; --j) right[j - 1] = transfer_right(psi, j, right[j], nullptr);
  Mat left = Mat::Ones(1, 1);
  for (int j = 0; j < i; ++j) left = transfer_left(psi, j, left, nullptr);

  Mat e1 = transfer_left(psi, i, left, nullptr);
  Mat ez = transfer_left(psi, i, left, &z);
  const cplx nrm = contract(e1, right[i]);
  const cplx zi = contract(ez, right[i]) / nrm;
  std::vector<double> row;
  for (int j = i + 1; j < n; ++j) {
    const cplx zz = contract(transfer_left(psi, j, ez, &zd), right[j]) / nrm;
    const cplx zj = contract(transfer_left(psi, j, e1, &zd), right[j]) / nrm;
    row.push_back((zz - zi * zj).real());
    ez = transfer_left(psi, j, ez, nullptr);
    e1 = transfer_left(psi, j, e1, nullptr);
  }
  return row;
}

double correlation(const Mps& psi, int i, int j) {
  if (j <= i) throw ValidationError("correlation requires i < j");
  return correlation_row(psi, i).at(j - i - 1);
}

double correlation_length(const Mps& psi, int i) {
  const auto row = correlation_row(psi, i);
  if (row.front() < 1e-14) throw NumericalError("correlation length undefined: C_{i,i+1} < 1e-14");
  double sum = 0.0;
  for (double c : row) sum += c;
  return sum / row.front();
}

double correlation_length(const Mps& psi) { return correlation_length(psi, psi.size() / 4); }

Mps cat_state(const Mps& omega0) {
  const int d = omega0.d;
  const int n = omega0.size();
  Mps cat;
  cat.d = d;
  cat.cutoff = omega0.cutoff;
  for (int j = 0; j < n; ++j) {
    const Eigen::Index dl = omega0.left_dim(j), dr = omega0.right_dim(j);
    const Eigen::Index nl = (j == 0) ? 1 : d * dl;
    const Eigen::Index nr = (j == n - 1) ? 1 : d * dr;
    Mat t = Mat::Zero(d * nl, nr);
    for (int s = 0; s < d; ++s)
      for (int copy = 0; copy < d; ++copy) {
        const auto src = omega0.block(j, ((s - copy) % d + d) % d);
        const Eigen::Index r0 = (j == 0) ? 0 : copy * dl;
        const Eigen::Index c0 = (j == n - 1) ? 0 : copy * dr;
        if (n == 1)
          t.middleRows(s * nl, nl) += src;
        else
          t.block(s * nl + r0, c0, dl, dr) = src;
      }
    cat.tensors.push_back(std::move(t));
  }

  cat.center = 0;
  move_center(cat, n - 1);
  const double nrm = cat.tensors[n - 1].norm();
  if (nrm < 1e-12) throw NumericalError("symmetrized state vanishes");
  cat.tensors[n - 1] /= nrm;
  // Compress with a right-to-left SVD sweep, dropping only numerically null weight.
  for (int c = n - 1; c > 0; --c) {
    Eigen::JacobiSVD<Mat> svd(right_matrix(cat.tensors[c], d), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVec s = svd.singularValues();
    const auto keep = static_cast<Eigen::Index>(keep_count(s, 1e-24, 0));
    cat.tensors[c] = from_right_matrix(svd.matrixV().leftCols(keep).adjoint(), d);
    const Mat us = svd.matrixU().leftCols(keep) * s.head(keep).cast<cplx>().asDiagonal();
    cat.tensors[c - 1] = right_multiply_blocks(cat.tensors[c - 1], us, d);
  }
  cat.center = 0;
  cat.tensors[0] /= cat.tensors[0].norm();
  return cat;
}

std::vector<cplx> product_basis_table(const Mps& psi_in, const SubsystemSpec& region,
                                      std::span<const Mat> basis) {
  region.validate(psi_in.size());
  const auto sites = region.sites();
  const int ell = static_cast<int>(sites.size());
  const auto k = static_cast<std::int64_t>(basis.size());
  for (const auto& b : basis)
    if (b.rows() != psi_in.d || b.cols() != psi_in.d)
      throw ValidationError("basis operator has wrong dimension");
  if (canonical_residual(psi_in) > 1e-8) throw ValidationError("MPS is not in canonical form");

  Mps psi = psi_in;
  move_center(psi, sites.front());

  const int m = std::max(1, ell / 2);
  std::vector<Mat> left{Mat::Identity(psi.left_dim(sites[0]), psi.left_dim(sites[0]))};
  for (int t = 0; t < m; ++t) {
    if (t > 0)
      for (int g = sites[t - 1] + 1; g < sites[t]; ++g)
        for (auto& e : left) e = transfer_left(psi, g, e, nullptr);
    left = basis_transfer_left(psi, sites[t], left, basis);
  }
  std::vector<cplx> out(ipow(k, ell));
  if (m == ell) {
    for (std::size_t i = 0; i < left.size(); ++i) out[i] = left[i].trace();
    return out;
  }
  for (int g = sites[m - 1] + 1; g < sites[m]; ++g)
    for (auto& e : left) e = transfer_left(psi, g, e, nullptr);

  const Eigen::Index chi = psi.left_dim(sites[m]);
  Mat lmat(static_cast<Eigen::Index>(left.size()), chi * chi);
  for (std::size_t i = 0; i < left.size(); ++i)
    lmat.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXcd>(left[i].data(), chi * chi);
  left.clear();
  left.shrink_to_fit();

  const int last = sites[ell - 1];
  std::vector<Mat> right{Mat::Identity(psi.right_dim(last), psi.right_dim(last))};
  for (int t = ell - 1; t > m; --t) {
    if (t < ell - 1)
      for (int g = sites[t + 1] - 1; g > sites[t]; --g)
        for (auto& r : right) r = transfer_right(psi, g, r, nullptr);
    right = basis_transfer_right(psi, sites[t], right, basis);
  }
  if (m + 1 < ell)
    for (int g = sites[m + 1] - 1; g > sites[m]; --g)
      for (auto& r : right) r = transfer_right(psi, g, r, nullptr);

  const auto n_rest = static_cast<std::int64_t>(right.size());
  const auto n_left = lmat.rows();
  Mat rmat(chi * chi, n_rest);
  for (std::int64_t u = 0; u < k; ++u) {
    const auto chunk = basis_transfer_right(psi, sites[m], right, basis.subspan(u, 1));
    for (std::int64_t r = 0; r < n_rest; ++r) rmat.col(r) = Eigen::Map<const Eigen::VectorXcd>(chunk[r].data(), chi * chi);
    const Mat v = lmat * rmat;
    for (Eigen::Index a = 0; a < n_left; ++a)
      for (std::int64_t r = 0; r < n_rest; ++r) out[(a * k + u) * n_rest + r] = v(a, r);
  }
  return out;
}

Mat rdm(const Mps& psi, const SubsystemSpec& region) {
  const int ell = region.size();
  if (ell > 8) throw ValidationError("dense RDM limited to 8 sites");
  const int d = psi.d;
  std::vector<Mat> basis;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Mat b = Mat::Zero(d, d);
      b(j, i) = 1.0;  // <psi| |j><i| |psi> = rho(i, j)
      basis.push_back(b);
    }
  const auto table = product_basis_table(psi, region, basis);
  const std::int64_t dim = ipow(d, ell);
  Mat rho(dim, dim);
  for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(table.size()); ++idx) {
    std::int64_t rem = idx, row = 0, col = 0, stride = 1;
    for (int t = ell - 1; t >= 0; --t) {
      const auto pair = rem % (d * d);
      rem /= d * d;
      row += (pair / d) * stride;
      col += (pair % d) * stride;
      stride *= d;
    }
    rho(row, col) = table[idx];
  }
  return 0.5 * (rho + rho.adjoint());
}

Mat rdm_mixture(const Mps& omega0, const SubsystemSpec& region) {
  const Mat rho0 = rdm(omega0, region);
  const int d = omega0.d;
  const int ell = region.size();
  const auto dim = rho0.rows();
  std::vector<Eigen::Index> shifted(dim);
  Mat acc = rho0;
  std::vector<Eigen::Index> perm(dim);
  for (Eigen::Index i = 0; i < dim; ++i) perm[i] = i;
  for (int n = 1; n < d; ++n) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      auto ds = digits(perm[i], d, ell);
      for (auto& x : ds) x = (x + 1) % d;
      shifted[i] = from_digits(ds, d);
    }
    perm = shifted;
    for (Eigen::Index i = 0; i < dim; ++i)
      for (Eigen::Index j = 0; j < dim; ++j) acc(perm[i], perm[j]) += rho0(i, j);
  }
  return acc / static_cast<double>(d);
}

}  // namespace magic
