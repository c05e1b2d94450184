#pragma once

#include "magic/mps.hpp"
#include "magic/wigner.hpp"

namespace magic {

// Wigner table of the reduced state of `psi` on `region`, contracted directly from the MPS.
// Regions: one contiguous block of at most 8 sites, or two blocks of at most 4 sites in total.
WignerTable wigner_of_mps_rdm(const Mps& psi, const SubsystemSpec& region);

struct ConnectedMana {
  double m_ab = 0.0;  // mana density of the union
  double m_a = 0.0;
  double m_b = 0.0;
  double m_cc = 0.0;  // m_ab - (m_a + m_b) / 2
};

// Both single-region densities are computed; regions must be disjoint, equal in size, total <= 4.
ConnectedMana connected_mana(const Mps& psi, const SubsystemSpec& a, const SubsystemSpec& b);

}  // namespace magic
