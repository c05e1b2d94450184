#include "magic/linalg.hpp"

#include <cmath>

#include "magic/errors.hpp"

namespace magic {

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat kron_all(std::span<const Mat> factors) {
  if (factors.empty()) return Mat::Identity(1, 1);
  Mat out = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) out = kron(out, factors[k]);
  return out;
}

Vec kron(const Vec& a, const Vec& b) {
  Vec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

Mat embed(const Mat& op, int site, int n, int d) {
  if (site < 0 || site >= n) throw ValidationError("embed: site out of range");
  const Eigen::Index left = ipow(d, site);
  const Eigen::Index right = ipow(d, n - site - 1);
  return kron(kron(Mat::Identity(left, left), op), Mat::Identity(right, right));
}

double unitarity_residual(const Mat& u) {
  if (u.rows() != u.cols()) return INFINITY;
  return (u.adjoint() * u - Mat::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

double hermiticity_residual(const Mat& m) {
  if (m.rows() != m.cols()) return INFINITY;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

namespace {

Mat ginibre(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

}  // namespace

Mat haar_unitary(int dim, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Mat> qr(ginibre(dim, dim, rng));
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const cplx d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= (a > 0 ? d / a : cplx(1.0));
  }
  return q;
}

Vec haar_state(int dim, std::mt19937_64& rng) {
  Vec v = ginibre(dim, 1, rng).col(0);
  return v / v.norm();
}

Mat random_density(int dim, int rank, std::mt19937_64& rng) {
  const Mat g = ginibre(dim, rank, rng);
  Mat rho = g * g.adjoint();
  return rho / rho.trace().real();
}

Mat random_hermitian(int dim, std::mt19937_64& rng) {
  const Mat g = ginibre(dim, dim, rng);
  return 0.5 * (g + g.adjoint());
}

std::vector<int> digits(std::int64_t index, int d, int n) {
  std::vector<int> out(n);
  for (int k = n - 1; k >= 0; --k) {
    out[k] = static_cast<int>(index % d);
    index /= d;
  }
  return out;
}

std::int64_t from_digits(std::span<const int> ds, int d) {
  std::int64_t r = 0;
  for (int x : ds) r = r * d + x;
  return r;
}

}  // namespace magic
