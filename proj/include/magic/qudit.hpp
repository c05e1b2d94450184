#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "magic/linalg.hpp"

namespace magic {

bool is_prime(int n);

// Local Hilbert-space dimension: an odd prime q >= 3, with omega = e^{2 pi i / q}
// and the multiplicative inverse of 2 mod q precomputed.
class PrimeDim {
 public:
  explicit PrimeDim(int q);

  int value() const { return q_; }
  int inverse_of_two() const { return inv2_; }
  int reduce(std::int64_t x) const {
    const auto r = static_cast<int>(x % q_);
    return r < 0 ? r + q_ : r;
  }
  // omega^k for any integer k.
  cplx omega(std::int64_t k) const;

  friend bool operator==(const PrimeDim&, const PrimeDim&) = default;

 private:
  int q_;
  int inv2_;
};

// A point of the discrete phase space Z_q^{2n}: one (a, a') pair per site.
struct PhasePoint {
  std::vector<std::array<int, 2>> pairs;

  int n() const { return static_cast<int>(pairs.size()); }

  // Row-major index over (a_1, a_1', a_2, a_2', ...), site 1 most significant.
  std::int64_t index(const PrimeDim& q) const;
  static PhasePoint from_index(std::int64_t index, const PrimeDim& q, int n);
  // Throws ValidationError if any entry is outside [0, q).
  void validate(const PrimeDim& q) const;
};

Mat clock(const PrimeDim& q);
Mat shift(const PrimeDim& q);

// T_{a a'} = omega^{-2^{-1} a a'} Z^a X^{a'}. Exponents must already be reduced mod q.
Mat pauli(const PrimeDim& q, int a, int a_prime);
Mat pauli_string(const PrimeDim& q, const PhasePoint& u);

// Single-site phase-space point operators A_{(a,a')}, indexed a*q + a'.
// Multi-site operators are Kronecker products of these.
class PhaseSpace {
 public:
  explicit PhaseSpace(const PrimeDim& q);
  // Custom single-site table, e.g. for fault-injection checks.
  PhaseSpace(const PrimeDim& q, std::vector<Mat> site_ops);

  static const PhaseSpace& standard(const PrimeDim& q);

  const PrimeDim& dim() const { return q_; }
  int q() const { return q_.value(); }
  int points_per_site() const { return q_.value() * q_.value(); }
  const Mat& site_operator(int u) const { return site_ops_[u]; }
  const std::vector<Mat>& site_operators() const { return site_ops_; }

  Mat point_operator(const PhasePoint& b) const;

 private:
  PrimeDim q_;
  std::vector<Mat> site_ops_;
};

Mat phase_point_operator(const PrimeDim& q, const PhasePoint& b);

struct CliffordGenerators {
  Mat K;  // phase gate
  Mat H;  // Hadamard, normalized to be unitary
  Mat S;  // sum gate |i, j> -> |i, i+j>, control on the first site
};

CliffordGenerators clifford_generators(const PrimeDim& q);
Mat t_gate(const PrimeDim& q);

struct PauliMatch {
  PhasePoint point;
  cplx phase;  // M = phase * T_point
};

// If `m` equals a unit phase times some Pauli string (entrywise within tol), return it.
std::optional<PauliMatch> match_pauli(const Mat& m, const PrimeDim& q, int n, double tol = 1e-10);

// True iff U maps each generating Pauli (Z_j, X_j on every site) to a Pauli string up to phase.
bool is_clifford(const Mat& u, const PrimeDim& q, int n);

// Pure stabilizer states on n <= 2 qutrits by orbit closure of |0...0>.
std::vector<Vec> stabilizer_states(const PrimeDim& q, int n);

// Rotate the first non-negligible amplitude to the positive real axis.
Vec canonical_phase(const Vec& psi);

}  // namespace magic
