#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "magic/errors.hpp"
#include "magic/qudit.hpp"
#include "magic/wigner.hpp"

using namespace magic;

namespace {

const PrimeDim q3(3);

// Brute-force oracle: W(u) = 3^{-n} Tr(rho T_u (sum_a T_a) T_u^dag / 3^n), no factorization.
std::vector<double> wigner_oracle(const Mat& rho) {
  const int n = sites_for_dim(rho.rows(), 3);
  const int points = static_cast<int>(ipow(9, n));
  const double dim = static_cast<double>(rho.rows());
  Mat sum_t = Mat::Zero(rho.rows(), rho.rows());
  for (int a = 0; a < points; ++a) sum_t += pauli_string(q3, PhasePoint::from_index(a, q3, n));
  std::vector<double> w(points);
  for (int u = 0; u < points; ++u) {
    const Mat t = pauli_string(q3, PhasePoint::from_index(u, q3, n));
    w[u] = (rho * t * sum_t * t.adjoint()).trace().real() / (dim * dim);
  }
  return w;
}

double oracle_mana(const Mat& rho) {
  double s = 0;
  for (double x : wigner_oracle(rho)) s += std::abs(x);
  return std::log(s);
}

Vec t_state() {
  Vec zero = Vec::Zero(3);
  zero(0) = 1;
  return t_gate(q3) * clifford_generators(q3).H * zero;
}

Vec basis(int i, int dim) {
  Vec v = Vec::Zero(dim);
  v(i) = 1;
  return v;
}

}  // namespace

TEST(DensityMatrix, Validation) {
  EXPECT_THROW(DensityMatrix(Mat::Identity(4, 4) / 4.0, 3), ValidationError);
  EXPECT_THROW(DensityMatrix(Mat::Identity(3, 3), 3), ValidationError);
  Mat nonherm = Mat::Identity(3, 3) / 3.0;
  nonherm(0, 1) = 0.1;
  EXPECT_THROW(DensityMatrix(nonherm, 3), ValidationError);
  Mat neg = Mat::Zero(3, 3);
  neg(0, 0) = 1.2;
  neg(1, 1) = -0.2;
  EXPECT_THROW(DensityMatrix(neg, 3), ValidationError);
}

TEST(DensityMatrix, ClipsTinyNegativeEigenvalues) {
  Mat m = Mat::Zero(3, 3);
  m(0, 0) = 1.0 + 5e-10;
  m(1, 1) = -5e-10;
  const DensityMatrix rho(m, 3);
  const Eigen::SelfAdjointEigenSolver<Mat> es(rho.matrix());
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-15);
  EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-14);
}

TEST(Wigner, ComputationalZeroIsPositive) {
  const auto w = wigner_of(DensityMatrix::pure(basis(0, 3), 3));
  EXPECT_GE(w.min(), -1e-15);
  const auto m = mana(w);
  EXPECT_NEAR(m.neg_sum, 1.0, 1e-12);
  EXPECT_NEAR(m.mana, 0.0, 1e-12);
}

TEST(Wigner, MaximallyMixedIsFlat) {
  const auto w = wigner_of(DensityMatrix(Mat::Identity(3, 3) / 3.0, 3));
  ASSERT_EQ(w.size(), 9u);
  for (double x : w.values()) EXPECT_NEAR(x, 1.0 / 9, 1e-14);
}

TEST(Wigner, TStateMatchesBruteForce) {
  const Vec t = t_state();
  const Mat rho = t * t.adjoint();
  const auto w = wigner_of(DensityMatrix(rho, 3));
  const auto oracle = wigner_oracle(rho);
  for (std::size_t i = 0; i < 9; ++i) EXPECT_NEAR(w[i], oracle[i], 1e-12);
  EXPECT_LT(w.min(), 0.0);
  const double m = mana(w).mana;
  EXPECT_NEAR(m, oracle_mana(rho), 1e-12);
  // Frozen from the brute-force oracle above.
  EXPECT_NEAR(m, 0.46137704434896631, 1e-10);
}

TEST(Wigner, TOnComputationalZeroStaysStabilizer) {
  // T is diagonal, so T|0> is |0> up to a phase.
  const Vec psi = t_gate(q3) * basis(0, 3);
  EXPECT_NEAR(mana(wigner_of(DensityMatrix::pure(psi, 3))).mana, 0.0, 1e-12);
}

TEST(Wigner, RandomStatesMatchOracle) {
  std::mt19937_64 rng(3);
  for (int n = 1; n <= 3; ++n) {
    const int dim = static_cast<int>(ipow(3, n));
    const Mat rho = random_density(dim, 2, rng);
    const auto w = wigner_of(DensityMatrix(rho, 3));
    const auto oracle = wigner_oracle(rho);
    double worst = 0;
    for (std::size_t i = 0; i < oracle.size(); ++i) worst = std::max(worst, std::abs(w[i] - oracle[i]));
    EXPECT_LT(worst, 1e-12) << "n=" << n;
    EXPECT_NEAR(w.sum(), 1.0, 1e-8);
  }
}

TEST(Wigner, FrobeniusIdentity) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 2, dim = static_cast<int>(ipow(3, n));
    const Mat a = random_density(dim, 1 + trial % 3, rng), b = random_density(dim, 2, rng);
    const auto wa = wigner_of(DensityMatrix(a, 3)), wb = wigner_of(DensityMatrix(b, 3));
    double dot = 0;
    for (std::size_t i = 0; i < wa.size(); ++i) dot += wa[i] * wb[i];
    EXPECT_NEAR((a * b).trace().real(), dim * dot, 1e-9);
  }
}

TEST(Wigner, HudsonForward) {
  for (int n = 1; n <= 2; ++n)
    for (const auto& s : stabilizer_states(q3, n)) {
      const auto w = wigner_of(DensityMatrix::pure(s, 3));
      EXPECT_GE(w.min(), -1e-12);
      EXPECT_LT(mana(w).mana, 1e-10);
    }
}

TEST(Wigner, HudsonConverseSingleSite) {
  std::mt19937_64 rng(17);
  const auto stab = stabilizer_states(q3, 1);
  int tested = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vec psi = haar_state(3, rng);
    double best = 0;
    for (const auto& s : stab) best = std::max(best, std::abs(s.dot(psi)));
    if (1 - best < 1e-6) continue;
    ++tested;
    EXPECT_LT(wigner_of(DensityMatrix::pure(psi, 3)).min(), 0.0);
  }
  EXPECT_GT(tested, 990);
}

TEST(Mana, Additivity) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 30; ++i) {
    const Mat a = random_density(3, 1 + i % 3, rng), b = random_density(i % 2 ? 9 : 3, 1 + i % 2, rng);
    const double ma = mana(wigner_of(DensityMatrix(a, 3))).mana, mb = mana(wigner_of(DensityMatrix(b, 3))).mana;
    EXPECT_NEAR(mana(wigner_of(DensityMatrix(kron(a, b), 3))).mana, ma + mb, 1e-10);
  }
}

TEST(Mana, JensenBound) {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 50; ++i) {
    const int n = 1 + i % 3, dim = static_cast<int>(ipow(3, n));
    const DensityMatrix rho(random_density(dim, 1 + i % 4, rng), 3);
    const auto m = mana(wigner_of(rho));
    EXPECT_LE(m.mana, 0.5 * (n * std::log(3.0) - renyi2(rho)) + 1e-8);
    EXPECT_NEAR(m.renyi2, renyi2(rho), 1e-9);
    EXPECT_NEAR(m.mana_density, m.mana / n, 1e-15);
  }
}

TEST(Entropy, KnownValues) {
  const DensityMatrix pure = DensityMatrix::pure(basis(1, 3), 3);
  EXPECT_NEAR(renyi2(pure), 0.0, 1e-14);
  EXPECT_NEAR(entanglement_entropy(pure), 0.0, 1e-14);
  const DensityMatrix mixed(Mat::Identity(3, 3) / 3.0, 3);
  EXPECT_NEAR(renyi2(mixed), std::log(3.0), 1e-14);
  EXPECT_NEAR(entanglement_entropy(mixed), std::log(3.0), 1e-14);
  Mat half = Mat::Zero(3, 3);
  half(0, 0) = half(1, 1) = 0.5;
  EXPECT_NEAR(renyi2(DensityMatrix(half, 3)), std::log(2.0), 1e-14);
}

TEST(PartialTrace, MatchesProductFactors) {
  std::mt19937_64 rng(31);
  const Mat a = random_density(3, 2, rng), b = random_density(3, 3, rng), c = random_density(3, 1, rng);
  const Mat abc = kron(kron(a, b), c);
  const std::vector<int> keep_b{1}, keep_ac{0, 2};
  EXPECT_LT((partial_trace(abc, 3, 3, keep_b) - b).norm(), 1e-12);
  EXPECT_LT((partial_trace(abc, 3, 3, keep_ac) - kron(a, c)).norm(), 1e-12);
}

TEST(Monotonicity, SuitePassesOnRandomStates) {
  std::mt19937_64 rng(37);
  for (int n = 1; n <= 3; ++n) {
    const DensityMatrix rho(random_density(static_cast<int>(ipow(3, n)), 2, rng), 3);
    const auto r = monotonicity_suite(rho, 10, rng);
    EXPECT_TRUE(r.passed()) << (r.failures.empty() ? "" : r.failures.front());
    EXPECT_LT(r.max_clifford_deviation, 1e-10);
    EXPECT_LT(r.max_measurement_increase, 1e-9);
  }
}

TEST(Monotonicity, ZMeasurementKillsTStateMana) {
  const Vec t = t_state();
  const Mat out = pauli_measurement_channel(t * t.adjoint(), q3, PhasePoint{{{1, 0}}});
  EXPECT_NEAR(mana(wigner_of(DensityMatrix(out, 3))).mana, 0.0, 1e-12);
}

TEST(Monotonicity, IdentityMeasurementIsNoOp) {
  std::mt19937_64 rng(41);
  const Mat rho = random_density(9, 3, rng);
  const Mat out = pauli_measurement_channel(rho, q3, PhasePoint{{{0, 0}, {0, 0}}});
  EXPECT_LT((out - rho).norm(), 1e-12);
}

TEST(Monotonicity, RandomCliffordIsClifford) {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 5; ++i) EXPECT_TRUE(is_clifford(random_clifford(2, 6, rng), q3, 2));
}

TEST(HullDistance, StabilizerStatesAreInside) {
  const auto s = stabilizer_states(q3, 1);
  EXPECT_LT(stab_hull_distance(DensityMatrix::pure(s[5], 3)).distance, 1e-6);
  EXPECT_LT(stab_hull_distance(DensityMatrix(Mat::Identity(3, 3) / 3.0, 3)).distance, 1e-6);
}

TEST(HullDistance, TStateIsOutside) {
  const Vec t = t_state();
  const DensityMatrix rho = DensityMatrix::pure(t, 3);
  const auto h = stab_hull_distance(rho);
  EXPECT_GT(h.distance, 1e-3);
  EXPECT_LT(h.gap, 1e-6);
  // Any explicit mixture is an upper bound; random mixtures must never beat the solver.
  const auto stab = stabilizer_states(q3, 1);
  std::mt19937_64 rng(47);
  std::exponential_distribution<double> ex(1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    Mat sigma = Mat::Zero(3, 3);
    double total = 0;
    for (const auto& s : stab) {
      const double wgt = ex(rng);
      sigma += wgt * s * s.adjoint();
      total += wgt;
    }
    EXPECT_GE((rho.matrix() - sigma / total).norm(), h.distance - 1e-9);
  }
  // Frozen from the conditional-gradient run.
  EXPECT_NEAR(h.distance, 0.3616400519209455, 1e-6);
}

TEST(HullDistance, ConvexAlongSegments) {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 5; ++trial) {
    const Mat a = random_density(3, 1, rng), b = random_density(3, 1, rng);
    const double da = stab_hull_distance(DensityMatrix(a, 3)).distance;
    const double db = stab_hull_distance(DensityMatrix(b, 3)).distance;
    const double dm = stab_hull_distance(DensityMatrix(0.5 * (a + b), 3)).distance;
    EXPECT_LE(dm, 0.5 * (da + db) + 1e-6);
  }
}

TEST(HullDistance, RejectsLargeSystems) {
  EXPECT_THROW(stab_hull_distance(DensityMatrix(Mat::Identity(27, 27) / 27.0, 3)), ValidationError);
}
