#include <gtest/gtest.h>

#include <cmath>

#include "magic/errors.hpp"
#include "magic/meanfield.hpp"

using namespace magic;

namespace {

// Energy per vertex from direct inner products: k/2 bonds of -sin(theta) <Z^dag Z' + h.c.>
// and one transverse term -cos(theta) <X + X^dag>.
double energy_oracle(double alpha, double theta, int q, int k) {
  const auto e = expectations_direct(alpha, q);
  return -k * std::sin(theta) * e.z * e.z - 2 * std::cos(theta) * e.x;
}

double brute_min(double theta, int q, int k) {
  double best = INFINITY;
  for (int i = 0; i <= 200000; ++i) best = std::min(best, energy_oracle(i / 200000.0, theta, q, k));
  return best;
}

MeanFieldConfig cfg_for(int q) {
  MeanFieldConfig c;
  c.q = q;
  return c;
}

}  // namespace

TEST(MeanFieldConfig, Validation) {
  MeanFieldConfig c;
  c.q = 1;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.k = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.alpha_tol = 1.0;
  EXPECT_THROW(c.validate(), ValidationError);
  EXPECT_THROW(ansatz_state(1.2, 3), ValidationError);
}

TEST(Ansatz, SpecialPoints) {
  for (int q : {2, 3, 5}) {
    const RVec para = ansatz_state(1 / std::sqrt(double(q)), q);
    EXPECT_LT((para - RVec::Constant(q, 1 / std::sqrt(double(q)))).norm(), 1e-14);
    const RVec ferro = ansatz_state(1.0, q);
    EXPECT_NEAR(ferro(0), 1.0, 1e-15);
    EXPECT_NEAR(ferro.tail(q - 1).norm(), 0.0, 1e-15);
    for (int i = 0; i <= 10; ++i) EXPECT_NEAR(ansatz_state(i / 10.0, q).norm(), 1.0, 1e-14);
  }
}

TEST(Ansatz, FormulasMatchDirect) {
  for (int q : {2, 3, 5, 7, 11})
    for (int i = 0; i <= 50; ++i) {
      const double a = i / 50.0;
      const auto f = expectations(a, q), d = expectations_direct(a, q);
      EXPECT_NEAR(f.z, d.z, 1e-12);
      EXPECT_NEAR(f.x, d.x, 1e-12);
    }
  const auto p = expectations(1 / std::sqrt(3.0), 3);
  EXPECT_NEAR(p.z, 0.0, 1e-15);
  const auto one = expectations(1.0, 3);
  EXPECT_NEAR(one.z, 1.0, 1e-15);
  EXPECT_NEAR(one.x, 0.0, 1e-15);
}

TEST(Energy, MatchesOracleAndLimits) {
  for (int q : {2, 3, 7})
    for (double theta : {0.0, 0.4, 0.9, kPi / 2})
      for (double a : {0.1, 0.5, 0.8, 1.0}) EXPECT_NEAR(energy_per_vertex(a, theta, q, 2), energy_oracle(a, theta, q, 2), 1e-12);
  for (double theta : {0.2, 1.1}) {
    EXPECT_NEAR(energy_per_vertex(1 / std::sqrt(5.0), theta, 5, 3), -2 * std::cos(theta), 1e-14);
    EXPECT_NEAR(energy_per_vertex(1.0, theta, 5, 3), -3 * std::sin(theta), 1e-14);
  }
}

TEST(Optimize, ParamagnetAtThetaZero) {
  for (int q : {2, 3, 5}) {
    const auto pt = optimize_alpha(0.0, cfg_for(q));
    EXPECT_NEAR(pt.alpha_star, 1 / std::sqrt(double(q)), 1e-9);
    EXPECT_NEAR(pt.z_expect, 0.0, 1e-9);
  }
}

TEST(Optimize, GlobalMinimumAgainstBruteForce) {
  for (int q : {2, 3, 5, 11})
    for (double theta : {0.3, 0.55, 0.6, 0.7, 0.9, 1.3}) {
      const auto pt = optimize_alpha(theta, cfg_for(q));
      EXPECT_LE(pt.energy_per_vertex, brute_min(theta, q, 2) + 1e-9) << "q=" << q << " theta=" << theta;
      EXPECT_LE(pt.energy_per_vertex, std::min(-2 * std::cos(theta), -2 * std::sin(theta)) + 1e-12);
    }
}

TEST(Optimize, DeepFerromagnetLargeQ) {
  const int q = 37, k = 2;
  for (double theta : {1.2, 1.4}) {
    const auto pt = optimize_alpha(theta, cfg_for(q));
    const double cot = 1 / std::tan(theta);
    EXPECT_NEAR(pt.alpha_star, 1 - cot * cot / (2.0 * q * k * k), 2.0 / (q * q));
  }
}

TEST(Transition, OrderByQ) {
  const auto t2 = transition_theta(cfg_for(2));
  EXPECT_EQ(t2.order, TransitionOrder::second);
  EXPECT_LT(t2.jump, 1e-3);
  EXPECT_NEAR(t2.theta_c, std::atan(0.5), 1e-6);
  for (int q : {3, 5}) {
    const auto t = transition_theta(cfg_for(q));
    EXPECT_EQ(t.order, TransitionOrder::first);
    EXPECT_GT(t.jump, 0.3);
    EXPECT_LT(t.bracket_width, 1e-8);
  }
}

TEST(Transition, ApproachesLargeQLimit) {
  double prev = 0;
  for (int q : {5, 11, 17, 23, 29, 37}) {
    const double tc = transition_theta(cfg_for(q)).theta_c;
    EXPECT_GT(tc, prev);
    EXPECT_LT(tc, large_q_theta_c(2));
    prev = tc;
  }
  EXPECT_NEAR(large_q_theta_c(2), kPi / 4, 1e-15);
  EXPECT_NEAR(large_q_theta_c(4), std::atan(0.5), 1e-15);
}

TEST(Mana, EndpointsAndBounds) {
  for (int q : {3, 5, 7}) {
    const auto para = optimize_alpha(0.1, cfg_for(q));
    EXPECT_LT(meanfield_mana(para, q), 1e-10);
    MeanFieldPoint full;
    full.alpha_star = 1.0;
    EXPECT_LT(meanfield_mana(full, q), 1e-10);
    MeanFieldPoint mid;
    mid.alpha_star = 0.8;
    const double m = meanfield_mana(mid, q);
    EXPECT_GT(m, 0.0);
    EXPECT_LT(m, 0.5 * std::log(double(q)));
  }
  MeanFieldPoint p;
  p.alpha_star = 0.8;
  EXPECT_THROW(meanfield_mana(p, 2), ValidationError);
  EXPECT_THROW(meanfield_mana(p, 9), ValidationError);
}

TEST(Scan, ShapeForQ3) {
  MeanFieldConfig c = cfg_for(3);
  std::vector<double> thetas;
  for (int i = 0; i <= 40; ++i) thetas.push_back(kPi / 2 * i / 40);
  const auto pts = meanfield_scan(c, thetas, 4);
  ASSERT_EQ(pts.size(), thetas.size());
  const double tc = transition_theta(c).theta_c;
  double peak = 0, peak_theta = 0, prev_z = 0;
  for (const auto& p : pts) {
    ASSERT_TRUE(p.mana_per_vertex.has_value());
    if (p.theta < tc) {
      EXPECT_NEAR(p.z_expect, 0.0, 1e-9);
      EXPECT_LT(*p.mana_per_vertex, 1e-10);
    } else {
      EXPECT_GT(p.z_expect, 0.0);
      EXPECT_GE(p.z_expect, prev_z - 1e-12);
      prev_z = p.z_expect;
    }
    if (*p.mana_per_vertex > peak) {
      peak = *p.mana_per_vertex;
      peak_theta = p.theta;
    }
  }
  EXPECT_LT(*pts.back().mana_per_vertex, 1e-10);
  EXPECT_LT(peak, 1.0);
  EXPECT_NEAR(peak_theta, tc, 0.1);
}
