#include "magic/mps_wigner.hpp"

#include <algorithm>
#include <cmath>

#include "magic/errors.hpp"

namespace magic {

WignerTable wigner_of_mps_rdm(const Mps& psi, const SubsystemSpec& region) {
  region.validate(psi.size());
  const int ell = region.size();
  if (region.intervals.size() == 1) {
    if (ell > 8) throw ValidationError("contiguous Wigner region limited to 8 sites");
  } else if (region.intervals.size() == 2) {
    if (ell > 4) throw ValidationError("two-block Wigner region limited to 4 sites in total");
  } else {
    throw ValidationError("Wigner region must be one or two blocks");
  }
  const PrimeDim q(psi.d);
  const auto& space = PhaseSpace::standard(q);
  const auto table = product_basis_table(psi, region, space.site_operators());

  const double scale = std::pow(static_cast<double>(q.value()), -ell);
  std::vector<double> w(table.size());
  double worst_imag = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    w[i] = table[i].real() * scale;
    worst_imag = std::max(worst_imag, std::abs(table[i].imag()) * scale);
  }
  if (worst_imag > 1e-10) throw NumericalError("MPS Wigner coefficients have imaginary parts above 1e-10");
  return WignerTable(q, ell, std::move(w));
}

ConnectedMana connected_mana(const Mps& psi, const SubsystemSpec& a, const SubsystemSpec& b) {
  if (a.intervals.size() != 1 || b.intervals.size() != 1)
    throw ValidationError("connected mana regions must each be one block");
  if (a.size() != b.size()) throw ValidationError("connected mana regions must have equal size");
  const auto [a0, a1] = a.intervals.front();
  const auto [b0, b1] = b.intervals.front();
  if (!(a1 < b0 || b1 < a0)) throw ValidationError("connected mana regions overlap");
  SubsystemSpec both;
  both.intervals = a1 < b0 ? std::vector{a.intervals.front(), b.intervals.front()}
                           : std::vector{b.intervals.front(), a.intervals.front()};
  if (a1 + 1 == b0 || b1 + 1 == a0)
    both.intervals = {{std::min(a0, b0), std::max(a1, b1)}};
  if (both.size() > 4) throw ValidationError("connected mana regions limited to 4 sites in total");

  ConnectedMana out;
  out.m_ab = mana(wigner_of_mps_rdm(psi, both)).mana_density;
  out.m_a = mana(wigner_of_mps_rdm(psi, a)).mana_density;
  out.m_b = mana(wigner_of_mps_rdm(psi, b)).mana_density;
  out.m_cc = out.m_ab - 0.5 * (out.m_a + out.m_b);
  return out;
}

}  // namespace magic
