#include "magic/qudit.hpp"

#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_set>

#include "magic/errors.hpp"

namespace magic {

bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

PrimeDim::PrimeDim(int q) : q_(q), inv2_((q + 1) / 2) {
  if (q < 3 || q % 2 == 0 || !is_prime(q))
    throw ValidationError("local dimension must be an odd prime, got " + std::to_string(q));
}

cplx PrimeDim::omega(std::int64_t k) const {
  return std::polar(1.0, 2.0 * kPi * reduce(k) / q_);
}

std::int64_t PhasePoint::index(const PrimeDim& q) const {
  std::int64_t idx = 0;
  for (const auto& [a, ap] : pairs) idx = (idx * q.value() + a) * q.value() + ap;
  return idx;
}

PhasePoint PhasePoint::from_index(std::int64_t index, const PrimeDim& q, int n) {
  PhasePoint u;
  u.pairs.resize(n);
  const int qq = q.value();
  for (int k = n - 1; k >= 0; --k) {
    u.pairs[k][1] = static_cast<int>(index % qq);
    index /= qq;
    u.pairs[k][0] = static_cast<int>(index % qq);
    index /= qq;
  }
  return u;
}

void PhasePoint::validate(const PrimeDim& q) const {
  for (const auto& [a, ap] : pairs)
    if (a < 0 || a >= q.value() || ap < 0 || ap >= q.value())
      throw ValidationError("phase point entry outside Z_q");
}

Mat clock(const PrimeDim& q) {
  Mat z = Mat::Zero(q.value(), q.value());
  for (int n = 0; n < q.value(); ++n) z(n, n) = q.omega(n);
  return z;
}

Mat shift(const PrimeDim& q) {
  Mat x = Mat::Zero(q.value(), q.value());
  for (int n = 0; n < q.value(); ++n) x((n + 1) % q.value(), n) = 1.0;
  return x;
}

Mat pauli(const PrimeDim& q, int a, int a_prime) {
  if (a < 0 || a >= q.value() || a_prime < 0 || a_prime >= q.value())
    throw ValidationError("pauli exponents must be reduced mod q");
  // Z^a X^{a'} |n> = omega^{a (n + a')} |n + a'>
  Mat t = Mat::Zero(q.value(), q.value());
  const std::int64_t phase = -static_cast<std::int64_t>(q.inverse_of_two()) * a * a_prime;
  for (int n = 0; n < q.value(); ++n) {
    const int m = (n + a_prime) % q.value();
    t(m, n) = q.omega(phase + static_cast<std::int64_t>(a) * m);
  }
  return t;
}

Mat pauli_string(const PrimeDim& q, const PhasePoint& u) {
  u.validate(q);
  std::vector<Mat> factors;
  factors.reserve(u.pairs.size());
  for (const auto& [a, ap] : u.pairs) factors.push_back(pauli(q, a, ap));
  return kron_all(factors);
}

namespace {

std::vector<Mat> standard_site_ops(const PrimeDim& q) {
  const int qq = q.value();
  Mat sum = Mat::Zero(qq, qq);
  for (int a = 0; a < qq; ++a)
    for (int ap = 0; ap < qq; ++ap) sum += pauli(q, a, ap);
  std::vector<Mat> ops;
  ops.reserve(qq * qq);
  for (int a = 0; a < qq; ++a)
    for (int ap = 0; ap < qq; ++ap) {
      const Mat t = pauli(q, a, ap);
      ops.push_back(t * sum * t.adjoint() / static_cast<double>(qq));
    }
  return ops;
}

}  // namespace

PhaseSpace::PhaseSpace(const PrimeDim& q) : q_(q), site_ops_(standard_site_ops(q)) {}

PhaseSpace::PhaseSpace(const PrimeDim& q, std::vector<Mat> site_ops)
    : q_(q), site_ops_(std::move(site_ops)) {
  if (static_cast<int>(site_ops_.size()) != q.value() * q.value())
    throw ValidationError("phase space table needs q^2 site operators");
  for (const auto& op : site_ops_)
    if (op.rows() != q.value() || op.cols() != q.value())
      throw ValidationError("phase space site operator has wrong shape");
}

const PhaseSpace& PhaseSpace::standard(const PrimeDim& q) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<PhaseSpace>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[q.value()];
  if (!slot) slot = std::make_unique<PhaseSpace>(q);
  return *slot;
}

Mat PhaseSpace::point_operator(const PhasePoint& b) const {
  b.validate(q_);
  std::vector<Mat> factors;
  factors.reserve(b.pairs.size());
  for (const auto& [a, ap] : b.pairs) factors.push_back(site_ops_[a * q() + ap]);
  return kron_all(factors);
}

Mat phase_point_operator(const PrimeDim& q, const PhasePoint& b) {
  return PhaseSpace::standard(q).point_operator(b);
}

CliffordGenerators clifford_generators(const PrimeDim& q) {
  if (q.value() != 3) throw ValidationError("K, H, S are only defined for q = 3");
  CliffordGenerators g;
  g.K = Mat::Identity(3, 3);
  g.K(2, 2) = q.omega(1);
  g.H = Mat(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g.H(i, j) = q.omega(static_cast<std::int64_t>(i) * j);
  g.H /= std::sqrt(3.0);
  g.S = Mat::Zero(9, 9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g.S(i * 3 + (i + j) % 3, i * 3 + j) = 1.0;
  return g;
}

Mat t_gate(const PrimeDim& q) {
  if (q.value() != 3) throw ValidationError("the T gate is only defined for q = 3");
  const cplx xi = std::polar(1.0, 2.0 * kPi / 9.0);
  Mat t = Mat::Zero(3, 3);
  t(0, 0) = std::conj(xi);
  t(1, 1) = 1.0;
  t(2, 2) = xi;
  return t;
}

std::optional<PauliMatch> match_pauli(const Mat& m, const PrimeDim& q, int n, double tol) {
  const std::int64_t dim = ipow(q.value(), n);
  if (m.rows() != dim || m.cols() != dim) throw ValidationError("match_pauli: dimension mismatch");
  const std::int64_t npts = ipow(q.value(), 2 * n);
  for (std::int64_t idx = 0; idx < npts; ++idx) {
    const PhasePoint u = PhasePoint::from_index(idx, q, n);
    const Mat t = pauli_string(q, u);
    const cplx c = (t.adjoint() * m).trace() / static_cast<double>(dim);
    if (std::abs(std::abs(c) - 1.0) > 1e-6) continue;
    if ((m - c * t).cwiseAbs().maxCoeff() < tol) return PauliMatch{u, c};
  }
  return std::nullopt;
}

bool is_clifford(const Mat& u, const PrimeDim& q, int n) {
  if (unitarity_residual(u) > 1e-10) throw ValidationError("is_clifford: input is not unitary");
  const std::int64_t dim = ipow(q.value(), n);
  if (u.rows() != dim) throw ValidationError("is_clifford: dimension mismatch");
  const Mat z = clock(q);
  const Mat x = shift(q);
  for (int site = 0; site < n; ++site) {
    for (const Mat* g : {&z, &x}) {
      const Mat p = embed(*g, site, n, q.value());
      if (!match_pauli(u * p * u.adjoint(), q, n)) return false;
    }
  }
  return true;
}

Vec canonical_phase(const Vec& psi) {
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    const double a = std::abs(psi(i));
    if (a > 1e-6) return psi * (std::conj(psi(i)) / a);
  }
  return psi;
}

namespace {

std::string state_key(const Vec& psi) {
  std::string key;
  key.reserve(psi.size() * 24);
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    key += std::to_string(std::llround(psi(i).real() * 1e9));
    key += ',';
    key += std::to_string(std::llround(psi(i).imag() * 1e9));
    key += ';';
  }
  return key;
}

}  // namespace

std::vector<Vec> stabilizer_states(const PrimeDim& q, int n) {
  if (n < 1 || n > 2) throw ValidationError("stabilizer_states: n must be 1 or 2");
  const auto g = clifford_generators(q);
  const Mat id = Mat::Identity(3, 3);
  std::vector<Mat> gens;
  if (n == 1) {
    gens = {g.K, g.H};
  } else {
    Mat swap = Mat::Zero(9, 9);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) swap(j * 3 + i, i * 3 + j) = 1.0;
    gens = {kron(g.K, id), kron(id, g.K), kron(g.H, id), kron(id, g.H),
            g.S,           swap * g.S * swap, swap};
  }
  const auto dim = static_cast<int>(ipow(3, n));
  Vec start = Vec::Zero(dim);
  start(0) = 1.0;

  std::vector<Vec> states;
  std::unordered_set<std::string> seen;
  std::deque<Vec> frontier;
  seen.insert(state_key(start));
  states.push_back(start);
  frontier.push_back(start);
  while (!frontier.empty()) {
    const Vec cur = frontier.front();
    frontier.pop_front();
    for (const auto& gate : gens) {
      Vec next = canonical_phase(gate * cur);
      if (seen.insert(state_key(next)).second) {
        states.push_back(next);
        frontier.push_back(std::move(next));
      }
    }
  }
  return states;
}

}  // namespace magic
