#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace magic::cli {

struct SelftestItem {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SelftestReport {
  std::vector<SelftestItem> items;
  bool passed() const;
  std::string str() const;
};

// Known faults: "none", "corrupt-phase-space" (perturbs one single-site point operator),
// "corrupt-stabilizer" (rotates one enumerated stabilizer state by a T gate).
SelftestReport run_selftest(std::uint64_t seed, const std::string& fault = "none");

}  // namespace magic::cli
