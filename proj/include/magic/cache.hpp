#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "magic/dmrg.hpp"

namespace magic {

// One file per (N, theta, lambda, cutoff). The first line is a JSON header
// (format, key, energy, center, tensor shapes); the rest is little-endian
// float64 (re, im) pairs, each tensor laid out row-major over (left, phys, right).
struct CacheKey {
  int N = 0;
  double theta = 0.0;
  double lambda = 0.0;
  double cutoff = 1e-7;

  // Exact (hexfloat) rendering of the parameters; equal strings <=> equal keys.
  std::string canonical() const;
  // 16 hex digits of the FNV-1a hash of canonical().
  std::string digest() const;
};

struct CachedGroundState {
  Mps state;
  double energy = 0.0;
  int sweeps = 0;
  double max_discarded = 0.0;
};

class GroundStateCache {
 public:
  explicit GroundStateCache(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path_for(const CacheKey& key) const;
  bool contains(const CacheKey& key) const;

  // nullopt if absent; throws NumericalError if the file is corrupt or belongs to another key.
  std::optional<CachedGroundState> load(const CacheKey& key) const;
  // Atomic: write to a temporary in the same directory, then rename.
  void store(const CacheKey& key, const CachedGroundState& gs) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace magic
