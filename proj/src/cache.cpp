#include "magic/cache.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>
#include <unistd.h>

#include "magic/errors.hpp"

namespace magic {

static_assert(std::endian::native == std::endian::little, "cache format assumes a little-endian host");

namespace {

constexpr const char* kFormat = "potts-mps-v1";

std::string hexfloat(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

}  // namespace

std::string CacheKey::canonical() const {
  return "potts-q3;N=" + std::to_string(N) + ";theta=" + hexfloat(theta) + ";lambda=" + hexfloat(lambda) +
         ";cutoff=" + hexfloat(cutoff);
}

std::string CacheKey::digest() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

GroundStateCache::GroundStateCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path GroundStateCache::path_for(const CacheKey& key) const {
  return dir_ / ("gs-N" + std::to_string(key.N) + "-" + key.digest() + ".mps");
}

bool GroundStateCache::contains(const CacheKey& key) const { return std::filesystem::exists(path_for(key)); }

std::optional<CachedGroundState> GroundStateCache::load(const CacheKey& key) const {
  const auto path = path_for(key);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::string line;
  std::getline(in, line);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw NumericalError("corrupt cache header in " + path.string() + ": " + e.what());
  }
  if (header.value("format", "") != kFormat) throw NumericalError("unknown cache format in " + path.string());
  if (header.value("key", "") != key.canonical())
    throw NumericalError("cache file " + path.string() + " belongs to a different parameter set");

  CachedGroundState gs;
  gs.energy = header.at("energy").get<double>();
  gs.sweeps = header.value("sweeps", 0);
  gs.max_discarded = header.value("max_discarded", 0.0);
  gs.state.d = header.at("d").get<int>();
  gs.state.center = header.at("center").get<int>();
  gs.state.cutoff = key.cutoff;
  for (const auto& dims : header.at("dims")) {
    const auto dl = dims.at(0).get<Eigen::Index>();
    const auto dr = dims.at(1).get<Eigen::Index>();
    const int d = gs.state.d;
    Mat t(d * dl, dr);
    std::vector<double> buf(2 * dl * d * dr);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(double)));
    if (!in) throw NumericalError("truncated cache file " + path.string());
    std::size_t k = 0;
    for (Eigen::Index a = 0; a < dl; ++a)
      for (int s = 0; s < d; ++s)
        for (Eigen::Index b = 0; b < dr; ++b, k += 2) t(s * dl + a, b) = cplx(buf[k], buf[k + 1]);
    gs.state.tensors.push_back(std::move(t));
  }
  if (in.peek() != std::char_traits<char>::eof()) throw NumericalError("trailing bytes in cache file " + path.string());
  if (static_cast<int>(gs.state.tensors.size()) != key.N)
    throw NumericalError("cache file " + path.string() + " has the wrong number of sites");
  return gs;
}

void GroundStateCache::store(const CacheKey& key, const CachedGroundState& gs) const {
  std::filesystem::create_directories(dir_);
  nlohmann::json header;
  header["format"] = kFormat;
  header["key"] = key.canonical();
  header["N"] = key.N;
  header["theta"] = key.theta;
  header["lambda"] = key.lambda;
  header["cutoff"] = key.cutoff;
  header["energy"] = gs.energy;
  header["sweeps"] = gs.sweeps;
  header["max_discarded"] = gs.max_discarded;
  header["d"] = gs.state.d;
  header["center"] = gs.state.center;
  nlohmann::json dims = nlohmann::json::array();
  for (int j = 0; j < gs.state.size(); ++j) dims.push_back({gs.state.left_dim(j), gs.state.right_dim(j)});
  header["dims"] = dims;

  const auto final_path = path_for(key);
  auto tmp = final_path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write cache file " + tmp.string());
    out << header.dump() << '\n';
    for (int j = 0; j < gs.state.size(); ++j) {
      const int d = gs.state.d;
      const auto dl = gs.state.left_dim(j), dr = gs.state.right_dim(j);
      std::vector<double> buf;
      buf.reserve(2 * dl * d * dr);
      for (Eigen::Index a = 0; a < dl; ++a)
        for (int s = 0; s < d; ++s)
          for (Eigen::Index b = 0; b < dr; ++b) {
            const cplx v = gs.state.tensors[j](s * dl + a, b);
            buf.push_back(v.real());
            buf.push_back(v.imag());
          }
      out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(double)));
    }
    if (!out) throw ValidationError("failed writing cache file " + tmp.string());
  }
  std::filesystem::rename(tmp, final_path);
}

}  // namespace magic
