#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "magic/dmrg.hpp"
#include "magic/experiments.hpp"
#include "magic/meanfield.hpp"
#include "magic/mera.hpp"

namespace magic::cli {

using json = nlohmann::json;

inline constexpr const char* kCacheEnv = "POTTSMANA_CACHE_DIR";

// Every accepted key with its default. A run document may only contain keys
// that appear here; grids accept either a list or {"start", "stop", "count"}.
json default_config();

struct Overrides {
  std::optional<std::string> config_file;
  std::vector<std::string> sets;  // "section.key=value", value parsed as JSON when possible
  std::optional<std::string> cache_dir;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<bool> allow_compute;
};

// Precedence: explicit flags > environment > config file > defaults.
// Throws ValidationError on unknown keys, wrong types or malformed --set.
json resolve_config(const Overrides& o);

// Recursively rejects keys absent from `schema` and values of the wrong type.
void check_against_schema(const json& doc, const json& schema, const std::string& path = "");

std::vector<double> read_grid(const json& v, const std::string& name);
std::vector<int> read_int_list(const json& v, const std::string& name);

struct Common {
  std::filesystem::path cache_dir;
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
  int threads = 1;
  bool allow_compute = true;
};
Common common_settings(const json& cfg);

DMRGConfig dmrg_settings(const json& cfg);
MeanFieldConfig meanfield_settings(const json& cfg, int q);
MERAManaParams mera_settings(const json& cfg);

}  // namespace magic::cli
