#include "cli/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "magic/errors.hpp"
#include "magic/meanfield.hpp"
#include "magic/mera.hpp"
#include "magic/qudit.hpp"
#include "magic/wigner.hpp"

namespace magic::cli {

namespace {

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

SelftestItem algebra(const PhaseSpace& space) {
  double worst = 0.0;
  for (int n = 1; n <= 2; ++n) {
    const int points = ipow(space.points_per_site(), n);
    const auto dim = ipow(space.q(), n);
    std::vector<Mat> ops;
    for (int b = 0; b < points; ++b) {
      Mat m = Mat::Identity(1, 1);
      for (int s = 0, rest = b; s < n; ++s) {
        const int div = static_cast<int>(ipow(space.points_per_site(), n - 1 - s));
        m = kron(m, space.site_operator(rest / div));
        rest %= div;
      }
      ops.push_back(std::move(m));
    }
    Mat sum = Mat::Zero(dim, dim);
    for (int b = 0; b < points; ++b) {
      sum += ops[b];
      for (int c = 0; c < points; ++c) {
        const cplx tr = (ops[b] * ops[c]).trace();
        worst = std::max(worst, std::abs(tr - (b == c ? static_cast<double>(dim) : 0.0)));
      }
    }
    worst = std::max(worst, (sum / static_cast<double>(dim) - Mat::Identity(dim, dim)).norm());
  }
  return {"phase-space orthogonality and completeness (n <= 2)", worst < 1e-10, "max error " + fmt("%.3e", worst)};
}

SelftestItem hudson(const PrimeDim& q, const std::string& fault, std::mt19937_64& rng) {
  double worst_min = 0.0, worst_mana = 0.0;
  std::size_t counts[2] = {0, 0};
  for (int n = 1; n <= 2; ++n) {
    auto states = stabilizer_states(q, n);
    counts[n - 1] = states.size();
    if (fault == "corrupt-stabilizer" && n == 1) {
      const Mat t = t_gate(q);
      for (auto& s : states) {
        const Vec r = t * s;
        if (std::abs(std::abs(r.dot(s)) - 1.0) > 1e-6) {
          s = r;
          break;
        }
      }
    }
    for (const auto& s : states) {
      const auto w = wigner_of(DensityMatrix::pure(s, q.value()));
      worst_min = std::min(worst_min, w.min());
      worst_mana = std::max(worst_mana, mana(w).mana);
    }
  }
  int positive_random = 0;
  for (int i = 0; i < 100; ++i)
    if (wigner_of(DensityMatrix::pure(haar_state(3, rng), 3)).min() >= 0.0) ++positive_random;
  const bool ok = counts[0] == 12 && counts[1] == 360 && worst_min >= -1e-12 && worst_mana < 1e-10 && positive_random == 0;
  std::ostringstream d;
  d << counts[0] << " + " << counts[1] << " stabilizer states, min W " << fmt("%.3e", worst_min) << ", max mana "
    << fmt("%.3e", worst_mana) << ", random states without negativity " << positive_random << "/100";
  return {"discrete Hudson theorem (n <= 2)", ok, d.str()};
}

SelftestItem additivity(std::mt19937_64& rng) {
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Mat a = random_density(3, 1 + i % 3, rng), b = random_density(3, 1 + (i / 3) % 3, rng);
    const double ma = mana(wigner_of(DensityMatrix(a, 3))).mana;
    const double mb = mana(wigner_of(DensityMatrix(b, 3))).mana;
    const double mab = mana(wigner_of(DensityMatrix(kron(a, b), 3))).mana;
    worst = std::max(worst, std::abs(mab - ma - mb));
  }
  return {"mana additivity on product states", worst < 1e-10, "max error " + fmt("%.3e", worst)};
}

SelftestItem clifford(std::mt19937_64& rng) {
  const Mat rho = random_density(9, 2, rng);
  const auto r = monotonicity_suite(DensityMatrix(rho, 3), 5, rng);
  return {"Clifford invariance and measurement monotonicity", r.passed(),
          "max Clifford deviation " + fmt("%.3e", r.max_clifford_deviation) + ", max measurement increase " +
              fmt("%.3e", r.max_measurement_increase)};
}

SelftestItem mera_oracle() {
  int bad = -1;
  for (int k = 0; k <= 8 && bad < 0; ++k)
    if (!(domain_counts(k) == mera_graph_oracle(k))) bad = k;
  return {"MERA domain counts: closed form vs graph (k <= 8)", bad < 0,
          bad < 0 ? std::string("all equal") : "mismatch at k = " + std::to_string(bad)};
}

SelftestItem meanfield_formulas() {
  double worst = 0.0;
  for (int q : {2, 3, 5, 7, 11})
    for (int i = 0; i <= 20; ++i) {
      const double a = i / 20.0;
      const auto f = expectations(a, q), d = expectations_direct(a, q);
      worst = std::max({worst, std::abs(f.z - d.z), std::abs(f.x - d.x)});
    }
  return {"mean-field expectation formulas vs ansatz state", worst < 1e-12, "max error " + fmt("%.3e", worst)};
}

}  // namespace

bool SelftestReport::passed() const {
  for (const auto& i : items)
    if (!i.passed) return false;
  return true;
}

std::string SelftestReport::str() const {
  std::ostringstream out;
  int failed = 0;
  for (const auto& i : items) {
    out << (i.passed ? "PASS " : "FAIL ") << i.name << ": " << i.detail << "\n";
    failed += !i.passed;
  }
  out << (failed ? std::to_string(failed) + " check(s) failed" : std::string("all checks passed")) << "\n";
  return out.str();
}

SelftestReport run_selftest(std::uint64_t seed, const std::string& fault) {
  if (fault != "none" && fault != "corrupt-phase-space" && fault != "corrupt-stabilizer")
    throw ValidationError("unknown fault '" + fault + "'");
  std::mt19937_64 rng(seed);
  const PrimeDim q(3);
  SelftestReport rep;

  // A check that throws is reported as a failure rather than aborting the suite.
  auto guarded = [&](const char* name, auto&& check) {
    try {
      rep.items.push_back(check());
    } catch (const std::exception& e) {
      rep.items.push_back({name, false, std::string("threw: ") + e.what()});
    }
  };
  std::vector<Mat> ops = PhaseSpace::standard(q).site_operators();
  if (fault == "corrupt-phase-space") ops[4](0, 1) += 1e-3;
  guarded("phase-space algebra", [&] { return algebra(PhaseSpace(q, ops)); });
  guarded("discrete Hudson theorem", [&] { return hudson(q, fault, rng); });
  guarded("mana additivity", [&] { return additivity(rng); });
  guarded("Clifford invariance", [&] { return clifford(rng); });
  guarded("MERA domain counts", [&] { return mera_oracle(); });
  guarded("mean-field formulas", [&] { return meanfield_formulas(); });
  return rep;
}

}  // namespace magic::cli
