#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "magic/errors.hpp"
#include "magic/mps.hpp"
#include "magic/mps_wigner.hpp"
#include "magic/qudit.hpp"

using namespace magic;

namespace {

const PrimeDim q3(3);

Vec basis(int i) {
  Vec v = Vec::Zero(3);
  v(i) = 1;
  return v;
}

Mat dense_rdm(const Vec& psi, int n, const SubsystemSpec& region) {
  const auto keep = region.sites();
  return partial_trace(psi * psi.adjoint(), 3, n, keep);
}

Mat x_all(int n) {
  Mat x = Mat::Identity(1, 1);
  for (int j = 0; j < n; ++j) x = kron(x, shift(q3));
  return x;
}

}  // namespace

TEST(Subsystem, Validation) {
  EXPECT_NO_THROW(SubsystemSpec::contiguous(2, 3).validate(5));
  EXPECT_THROW(SubsystemSpec::contiguous(3, 3).validate(5), ValidationError);
  EXPECT_THROW(SubsystemSpec::blocks(0, 2, 1, 1).validate(8), ValidationError);
  SubsystemSpec unsorted{{{4, 4}, {1, 1}}};
  EXPECT_THROW(unsorted.validate(8), ValidationError);
  const auto b = SubsystemSpec::blocks(1, 2, 5, 1);
  EXPECT_EQ(b.size(), 3);
  EXPECT_EQ(b.sites(), (std::vector<int>{1, 2, 5}));
}

TEST(Mps, ProductStateDense) {
  const std::vector<Vec> locals{basis(0), basis(2), basis(1)};
  const Mps psi = product_mps(locals);
  const Vec d = to_dense(psi);
  EXPECT_NEAR(std::abs(d(0 * 9 + 2 * 3 + 1)), 1.0, 1e-14);
  EXPECT_NEAR(d.norm(), 1.0, 1e-14);
  EXPECT_EQ(psi.max_bond(), 1);
}

TEST(Mps, CanonicalFormAndCenterMoves) {
  std::mt19937_64 rng(1);
  Mps psi = random_mps(7, 3, 5, rng);
  EXPECT_LT(canonical_residual(psi), 1e-10);
  const Vec before = to_dense(psi);
  for (int c : {3, 6, 0, 4}) {
    move_center(psi, c);
    EXPECT_EQ(psi.center, c);
    EXPECT_LT(canonical_residual(psi), 1e-10);
    EXPECT_LT((to_dense(psi) - before).norm(), 1e-10);
  }
  canonicalize(psi, 2);
  EXPECT_LT(canonical_residual(psi), 1e-10);
  EXPECT_NEAR(norm(psi), 1.0, 1e-12);
}

TEST(Mps, ExpectationMatchesDense) {
  std::mt19937_64 rng(2);
  const Mps psi = random_mps(5, 3, 4, rng);
  const Vec d = to_dense(psi);
  const Mat z = clock(q3), x = shift(q3);
  const std::vector<std::pair<int, Mat>> ops{{1, z}, {3, x}};
  const Mat full = embed(z, 1, 5, 3) * embed(x, 3, 5, 3);
  EXPECT_LT(std::abs(expectation(psi, ops) - d.dot(full * d)), 1e-12);
}

TEST(Mps, RdmWholeSystemIsProjector) {
  std::mt19937_64 rng(3);
  const Mps psi = random_mps(5, 3, 4, rng);
  const Vec d = to_dense(psi);
  EXPECT_LT((rdm(psi, SubsystemSpec::contiguous(0, 5)) - d * d.adjoint()).norm(), 1e-12);
}

TEST(Mps, RdmMatchesDensePartialTrace) {
  std::mt19937_64 rng(4);
  const Mps psi = random_mps(7, 3, 6, rng);
  const Vec d = to_dense(psi);
  for (const auto& region : {SubsystemSpec::contiguous(2, 3), SubsystemSpec::blocks(0, 1, 4, 2),
                             SubsystemSpec::blocks(1, 2, 5, 2), SubsystemSpec::contiguous(6, 1)}) {
    EXPECT_LT((rdm(psi, region) - dense_rdm(d, 7, region)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Mps, RdmNestedConsistency) {
  std::mt19937_64 rng(5);
  const Mps psi = random_mps(8, 3, 5, rng);
  const Mat big = rdm(psi, SubsystemSpec::contiguous(2, 4));
  const Mat small = rdm(psi, SubsystemSpec::contiguous(3, 2));
  const std::vector<int> keep{1, 2};
  EXPECT_LT((partial_trace(big, 3, 4, keep) - small).norm(), 1e-10);
}

TEST(Mps, RdmOfProductSiteIsPure) {
  const std::vector<Vec> locals(6, basis(1));
  const Mat r = rdm(product_mps(locals), SubsystemSpec::contiguous(3, 1));
  EXPECT_NEAR((r * r).trace().real(), 1.0, 1e-14);
}

TEST(Mps, RdmTooLarge) {
  std::mt19937_64 rng(6);
  const Mps psi = random_mps(10, 3, 2, rng);
  EXPECT_THROW(rdm(psi, SubsystemSpec::contiguous(0, 9)), ValidationError);
}

TEST(Mps, BondEntropiesMatchDense) {
  std::mt19937_64 rng(7);
  const Mps psi = random_mps(6, 3, 5, rng);
  const Vec d = to_dense(psi);
  const auto s = bond_entropies(psi);
  ASSERT_EQ(s.size(), 5u);
  for (int b = 0; b < 5; ++b) {
    std::vector<int> keep;
    for (int j = 0; j <= b; ++j) keep.push_back(j);
    const Mat r = partial_trace(d * d.adjoint(), 3, 6, keep);
    EXPECT_NEAR(s[b], entanglement_entropy(DensityMatrix(r, 3)), 1e-10);
  }
}

TEST(Mps, CorrelationMatchesDense) {
  std::mt19937_64 rng(8);
  const Mps psi = random_mps(6, 3, 4, rng);
  const Vec d = to_dense(psi);
  const Mat z = clock(q3);
  auto ev = [&](const Mat& op) { return d.dot(op * d); };
  const auto row = correlation_row(psi, 1);
  for (int j = 2; j < 6; ++j) {
    const cplx zz = ev(embed(z, 1, 6, 3) * embed(z.adjoint(), j, 6, 3));
    const double c = (zz - ev(embed(z, 1, 6, 3)) * ev(embed(z.adjoint(), j, 6, 3))).real();
    EXPECT_NEAR(correlation(psi, 1, j), c, 1e-12);
    EXPECT_NEAR(row[j - 2], c, 1e-12);
  }
}

TEST(Mps, ProductStateHasNoCorrelationLength) {
  const std::vector<Vec> plus(8, Vec::Constant(3, 1 / std::sqrt(3.0)));
  const Mps psi = product_mps(plus);
  for (double c : correlation_row(psi, 2)) EXPECT_NEAR(c, 0.0, 1e-14);
  EXPECT_THROW(correlation_length(psi), NumericalError);
}

TEST(Cat, FromFerromagnet) {
  const std::vector<Vec> zeros(5, basis(0));
  const Mps cat = cat_state(product_mps(zeros));
  const Vec d = to_dense(cat);
  EXPECT_LE(cat.max_bond(), 3);
  for (int n = 0; n < 3; ++n) {
    int idx = 0;
    for (int j = 0; j < 5; ++j) idx = idx * 3 + n;
    EXPECT_NEAR(std::abs(d(idx)), 1 / std::sqrt(3.0), 1e-12);
  }
  EXPECT_LT((rdm(cat, SubsystemSpec::contiguous(2, 1)) - Mat::Identity(3, 3) / 3.0).norm(), 1e-12);
  // C_ij = Re<Z Z^dag> - <Z><Z^dag> = 1 for the three-component cat.
  EXPECT_NEAR(correlation(cat, 0, 4), 1.0, 1e-12);
}

TEST(Cat, SymmetricInputIsFixed) {
  std::mt19937_64 rng(9);
  const Mps cat = cat_state(random_mps(5, 3, 3, rng));
  const Mps twice = cat_state(cat);
  EXPECT_NEAR(std::abs(to_dense(cat).dot(to_dense(twice))), 1.0, 1e-10);
  const Vec d = to_dense(cat);
  EXPECT_NEAR(std::abs(d.dot(x_all(5) * d) - 1.0), 0.0, 1e-8);
}

TEST(Cat, OneSiteRdmCommutesWithShift) {
  std::mt19937_64 rng(10);
  const Mps cat = cat_state(random_mps(6, 3, 4, rng));
  for (int j = 0; j < 6; ++j) {
    const Mat r = rdm(cat, SubsystemSpec::contiguous(j, 1));
    EXPECT_LT((r * shift(q3) - shift(q3) * r).norm(), 1e-8);
  }
}

TEST(Cat, MixtureRdm) {
  std::mt19937_64 rng(11);
  const Mps omega0 = random_mps(6, 3, 4, rng);
  const Vec d = to_dense(omega0);
  const auto region = SubsystemSpec::blocks(1, 1, 4, 2);
  Mat expect = Mat::Zero(27, 27);
  Mat xn = Mat::Identity(729, 729);
  for (int n = 0; n < 3; ++n) {
    const Vec shifted = xn * d;
    expect += dense_rdm(shifted, 6, region) / 3.0;
    xn = x_all(6) * xn;
  }
  EXPECT_LT((rdm_mixture(omega0, region) - expect).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(MpsWigner, MatchesDenseWigner) {
  std::mt19937_64 rng(12);
  const Mps psi = random_mps(9, 3, 4, rng);
  for (const auto& region : {SubsystemSpec::contiguous(3, 2), SubsystemSpec::contiguous(1, 5),
                             SubsystemSpec::blocks(0, 2, 6, 2), SubsystemSpec::blocks(2, 1, 8, 1)}) {
    const auto fast = wigner_of_mps_rdm(psi, region);
    const auto dense = wigner_of(DensityMatrix(rdm(psi, region), 3));
    ASSERT_EQ(fast.size(), dense.size());
    for (std::size_t i = 0; i < fast.size(); ++i) ASSERT_NEAR(fast[i], dense[i], 1e-9);
  }
}

TEST(MpsWigner, RegionLimits) {
  std::mt19937_64 rng(13);
  const Mps psi = random_mps(12, 3, 2, rng);
  EXPECT_THROW(wigner_of_mps_rdm(psi, SubsystemSpec::contiguous(0, 9)), ValidationError);
  EXPECT_THROW(wigner_of_mps_rdm(psi, SubsystemSpec::blocks(0, 3, 6, 2)), ValidationError);
}

TEST(MpsWigner, DistantSitesOfProductStateFactorize) {
  std::mt19937_64 rng(14);
  std::vector<Vec> locals;
  for (int j = 0; j < 8; ++j) locals.push_back(haar_state(3, rng));
  const Mps psi = product_mps(locals);
  const auto pair = wigner_of_mps_rdm(psi, SubsystemSpec::blocks(1, 1, 6, 1));
  const auto a = wigner_of_mps_rdm(psi, SubsystemSpec::contiguous(1, 1));
  const auto b = wigner_of_mps_rdm(psi, SubsystemSpec::contiguous(6, 1));
  for (int u = 0; u < 9; ++u)
    for (int v = 0; v < 9; ++v) EXPECT_NEAR(pair[u * 9 + v], a[u] * b[v], 1e-12);
}

TEST(ConnectedMana, ProductStateIsZero) {
  const std::vector<Vec> zeros(8, basis(0));
  const auto c = connected_mana(product_mps(zeros), SubsystemSpec::contiguous(1, 1), SubsystemSpec::contiguous(5, 1));
  EXPECT_NEAR(c.m_cc, 0.0, 1e-15);
}

TEST(ConnectedMana, DefinitionAndErrors) {
  std::mt19937_64 rng(15);
  const Mps psi = random_mps(8, 3, 4, rng);
  const auto a = SubsystemSpec::contiguous(1, 2), b = SubsystemSpec::contiguous(5, 2);
  const auto c = connected_mana(psi, a, b);
  const double ma = mana(wigner_of(DensityMatrix(rdm(psi, a), 3))).mana_density;
  const double mb = mana(wigner_of(DensityMatrix(rdm(psi, b), 3))).mana_density;
  const double mab = mana(wigner_of(DensityMatrix(rdm(psi, SubsystemSpec::blocks(1, 2, 5, 2)), 3))).mana_density;
  EXPECT_NEAR(c.m_a, ma, 1e-10);
  EXPECT_NEAR(c.m_b, mb, 1e-10);
  EXPECT_NEAR(c.m_ab, mab, 1e-10);
  EXPECT_NEAR(c.m_cc, mab - 0.5 * (ma + mb), 1e-10);
  EXPECT_THROW(connected_mana(psi, a, SubsystemSpec::contiguous(2, 2)), ValidationError);
  EXPECT_THROW(connected_mana(psi, a, SubsystemSpec::contiguous(5, 1)), ValidationError);
}
