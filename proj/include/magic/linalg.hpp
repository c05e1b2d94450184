#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace magic {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

// Integer power with overflow left to the caller (dims here are tiny).
constexpr std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

Mat kron(const Mat& a, const Mat& b);
Mat kron_all(std::span<const Mat> factors);
Vec kron(const Vec& a, const Vec& b);

// Embed a single-site operator at `site` (0-based) in an n-site chain of local dim d.
Mat embed(const Mat& op, int site, int n, int d);

double unitarity_residual(const Mat& u);
double hermiticity_residual(const Mat& m);

// Haar-distributed unitary via QR of a complex Ginibre matrix with phase fix.
Mat haar_unitary(int dim, std::mt19937_64& rng);
Vec haar_state(int dim, std::mt19937_64& rng);

// Random density matrix of given rank (Ginibre / induced measure).
Mat random_density(int dim, int rank, std::mt19937_64& rng);

// Random Hermitian matrix with iid Gaussian entries.
Mat random_hermitian(int dim, std::mt19937_64& rng);

// Digits of `index` in base `d`, most significant first, padded to `n` digits.
std::vector<int> digits(std::int64_t index, int d, int n);
std::int64_t from_digits(std::span<const int> ds, int d);

}  // namespace magic
