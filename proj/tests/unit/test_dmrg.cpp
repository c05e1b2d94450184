#include <gtest/gtest.h>

#include <cmath>

#include "magic/dmrg.hpp"
#include "magic/errors.hpp"
#include "magic/qudit.hpp"

using namespace magic;

namespace {

DMRGConfig tight() {
  DMRGConfig c;
  c.svd_cutoff = 1e-10;
  c.energy_tol = 1e-10;
  return c;
}

double site_z(const Mps& psi, int j) {
  const Mat z = clock(PrimeDim(3));
  const std::vector<std::pair<int, Mat>> ops{{j, z}};
  return std::abs(expectation(psi, ops));
}

}  // namespace

TEST(DMRGConfig, Validation) {
  DMRGConfig c;
  c.svd_cutoff = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.init_bias = 3;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.max_sweeps = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  EXPECT_THROW(dmrg_ground_state({8, 3.0, 0.0}, DMRGConfig{}), ValidationError);
}

TEST(DMRG, MatchesExactAtN8) {
  for (double theta : {0.1, 0.5, kThetaCritical, 1.1}) {
    const PottsParams p{8, theta, 0.0};
    const auto exact = exact_ground_state(p, false);
    const auto r = dmrg_ground_state(p, tight());
    EXPECT_NEAR(r.energy, exact.energy, 1e-6) << "theta=" << theta;
    EXPECT_GE(r.energy, exact.energy - 1e-8);
    EXPECT_LT(r.max_canonical_residual, 1e-10);
  }
}

TEST(DMRG, DenseStateMatchesEnergy) {
  const PottsParams p{6, 0.6, 0.0};
  const auto r = dmrg_ground_state(p, tight());
  const Vec v = to_dense(r.state);
  const RMat h = potts_hamiltonian_dense(p);
  EXPECT_NEAR(v.dot(h.cast<cplx>() * v).real(), r.energy, 1e-8);
}

TEST(DMRG, SweepEnergiesNonIncreasing) {
  std::vector<double> seen;
  const auto r = dmrg_ground_state({24, kThetaCritical, 0.0}, DMRGConfig{},
                                   [&](int, double e, int) { seen.push_back(e); });
  ASSERT_EQ(seen.size(), r.sweep_energies.size());
  for (std::size_t i = 1; i < seen.size(); ++i) EXPECT_LE(seen[i], seen[i - 1] + 1e-9);
}

TEST(DMRG, FerromagnetHasBondOne) {
  const auto r = dmrg_ground_state({16, kPi / 2, 0.0}, DMRGConfig{});
  EXPECT_EQ(r.state.max_bond(), 1);
  EXPECT_NEAR(r.energy, -2.0 * 15, 1e-10);
  EXPECT_NEAR(site_z(r.state, 5), 1.0, 1e-10);
}

TEST(DMRG, TransverseLimit) {
  const auto r = dmrg_ground_state({16, 0.0, 0.0}, DMRGConfig{});
  EXPECT_NEAR(r.energy, -32.0, 1e-10);
  EXPECT_EQ(r.state.max_bond(), 1);
}

TEST(DMRG, BiasSelectsBranch) {
  DMRGConfig c;
  c.init_bias = 2;
  const auto r = dmrg_ground_state({12, 1.2, 0.0}, c);
  const Mat z = clock(PrimeDim(3));
  const std::vector<std::pair<int, Mat>> ops{{6, z}};
  const cplx ev = expectation(r.state, ops);
  // Z has eigenvalue omega^2 on |2>.
  EXPECT_GT(std::cos(std::arg(ev) - std::arg(PrimeDim(3).omega(2))), 0.99);
}

TEST(DMRG, CatRestoresSymmetry) {
  const auto r = dmrg_ground_state({32, 0.3 * kPi, 0.0}, DMRGConfig{});
  const Mps cat = cat_state(r.state);
  for (int j : {0, 8, 16, 31}) {
    EXPECT_GT(site_z(r.state, j), 0.1);
    EXPECT_LT(site_z(cat, j), 1e-8);
  }
}

TEST(DMRG, EntropyGrowsWithSizeAtCriticality) {
  const auto a = dmrg_ground_state({16, kThetaCritical, 0.0}, DMRGConfig{});
  const auto b = dmrg_ground_state({32, kThetaCritical, 0.0}, DMRGConfig{});
  const double sa = bond_entropies(a.state)[7], sb = bond_entropies(b.state)[15];
  // (c / 6) ln 2 with c = 4/5 is about 0.092.
  EXPECT_NEAR(sb - sa, 0.8 / 6 * std::log(2.0), 0.03);
}

TEST(DMRG, NonConvergenceReported) {
  DMRGConfig c;
  c.max_sweeps = 1;
  c.min_sweeps = 1;
  c.energy_tol = 1e-15;
  EXPECT_THROW(dmrg_ground_state({24, kThetaCritical, 0.0}, c), NumericalError);
}
