#include "cli/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "magic/errors.hpp"

namespace magic::cli {

namespace {

json range(double start, double stop, int count) { return {{"start", start}, {"stop", stop}, {"count", count}}; }

bool is_grid_default(const json& d) { return d.is_array() || (d.is_object() && d.contains("start")); }

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

json& at_path(json& doc, const std::string& dotted, bool create) {
  json* cur = &doc;
  std::stringstream ss(dotted);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (part.empty()) throw ValidationError("malformed key '" + dotted + "'");
    if (!cur->is_object()) throw ValidationError("'" + dotted + "' does not name a setting");
    if (!cur->contains(part) && !create) throw ValidationError("unknown setting '" + dotted + "'");
    cur = &(*cur)[part];
  }
  return *cur;
}

}  // namespace

json default_config() {
  const double half_pi = kPi / 2;
  return {
      {"cache_dir", ".pottsmana-cache"},
      {"output_dir", "out"},
      {"seed", 0},
      {"threads", 1},
      {"allow_compute", true},
      {"model", {{"N", 32}, {"lambda", 0.0}}},
      {"dmrg",
       {{"svd_cutoff", 1e-7},
        {"energy_tol", 1e-7},
        {"max_sweeps", 40},
        {"min_sweeps", 3},
        {"max_bond", 512},
        {"init_bias", 0},
        {"lanczos_max_iter", 60},
        {"lanczos_tol", 1e-12}}},
      {"groundstate", {{"thetas", json::array({kPi / 4})}, {"lambdas", json::array({0.0})}}},
      {"subsystem", {{"thetas", range(0.0, half_pi, 21)}, {"ells", json::array({1, 2, 3, 4, 5})}, {"kind", "cat"}}},
      {"twopoint",
       {{"thetas", json::array({0.8 * kPi / 4, kPi / 4, 1.2 * kPi / 4})},
        {"dxs", json{{"start", 1}, {"stop", 16}}},
        {"base_site", -1},
        {"block", 1},
        {"kind", "cat"}}},
      {"toy",
       {{"alphas", range(0.0, 1.0, 101)},
        {"rho1_diag", json::array({1.0 / 3, 1.0 / 3, 1.0 / 3})},
        {"bisection_width", 1e-6}}},
      {"mera",
       {{"m_sq", 0.4},
        {"m_tri", 0.3},
        {"m_max", 0.5 * std::log(3.0)},
        {"nu", nullptr},
        {"ells", json{{"start", 2}, {"stop", 64}}},
        {"thetas", json::array()},
        {"max_k", 8},
        {"channel_p", 0.5},
        {"fit_ells", json::array()},
        {"fit_densities", json::array()}}},
      {"meanfield",
       {{"qs", json::array({3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37})},
        {"k", 2},
        {"thetas", range(0.0, half_pi, 201)},
        {"alpha_step", 1e-4},
        {"alpha_tol", 1e-10},
        {"theta_step", 1e-4},
        {"transitions", true}}},
      {"selftest", {{"fault", "none"}}},
  };
}

void check_against_schema(const json& doc, const json& schema, const std::string& path) {
  if (!doc.is_object()) throw ValidationError("'" + (path.empty() ? std::string("<root>") : path) + "' must be an object");
  for (const auto& [key, value] : doc.items()) {
    const auto where = join(path, key);
    if (!schema.contains(key)) throw ValidationError("unknown setting '" + where + "'");
    const json& d = schema.at(key);
    if (is_grid_default(d)) {
      if (value.is_array()) {
        for (const auto& x : value)
          if (!x.is_number()) throw ValidationError("'" + where + "' must contain only numbers");
      } else if (value.is_object()) {
        for (const auto& [gk, gv] : value.items()) {
          if (gk != "start" && gk != "stop" && gk != "count") throw ValidationError("unknown grid field '" + where + "." + gk + "'");
          if (!gv.is_number()) throw ValidationError("'" + where + "." + gk + "' must be a number");
        }
      } else {
        throw ValidationError("'" + where + "' must be a list or a {start, stop, count} range");
      }
    } else if (d.is_object()) {
      check_against_schema(value, d, where);
    } else if (d.is_null()) {
      if (!value.is_null() && !value.is_number()) throw ValidationError("'" + where + "' must be a number or null");
    } else if (d.is_boolean()) {
      if (!value.is_boolean()) throw ValidationError("'" + where + "' must be true or false");
    } else if (d.is_string()) {
      if (!value.is_string()) throw ValidationError("'" + where + "' must be a string");
    } else if (d.is_number_integer()) {
      if (!value.is_number_integer()) throw ValidationError("'" + where + "' must be an integer");
    } else if (d.is_number()) {
      if (!value.is_number()) throw ValidationError("'" + where + "' must be a number");
    }
  }
}

json resolve_config(const Overrides& o) {
  json cfg = default_config();
  const json schema = default_config();
  if (o.config_file) {
    std::ifstream in(*o.config_file);
    if (!in) throw ValidationError("cannot read config file " + *o.config_file);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ValidationError("config file " + *o.config_file + " is not valid JSON: " + e.what());
    }
    check_against_schema(doc, schema);
    cfg.merge_patch(doc);
    // merge_patch treats null as deletion; restore nullable keys.
    if (!cfg["mera"].contains("nu")) cfg["mera"]["nu"] = nullptr;
  }
  if (const char* env = std::getenv(kCacheEnv); env && *env) cfg["cache_dir"] = env;
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("--set expects key=value, got '" + s + "'");
    const auto key = s.substr(0, eq), text = s.substr(eq + 1);
    json value;
    try {
      value = json::parse(text);
    } catch (const json::parse_error&) {
      value = text;
    }
    at_path(cfg, key, false) = value;
  }
  if (o.cache_dir) cfg["cache_dir"] = *o.cache_dir;
  if (o.output_dir) cfg["output_dir"] = *o.output_dir;
  if (o.seed) cfg["seed"] = *o.seed;
  if (o.threads) cfg["threads"] = *o.threads;
  if (o.allow_compute) cfg["allow_compute"] = *o.allow_compute;
  check_against_schema(cfg, schema);
  return cfg;
}

std::vector<double> read_grid(const json& v, const std::string& name) {
  std::vector<double> out;
  if (v.is_array()) {
    for (const auto& x : v) out.push_back(x.get<double>());
  } else {
    if (!v.contains("start") || !v.contains("stop") || !v.contains("count"))
      throw ValidationError("range '" + name + "' needs start, stop and count");
    const double a = v.at("start").get<double>(), b = v.at("stop").get<double>();
    if (!v.at("count").is_number_integer()) throw ValidationError("'" + name + ".count' must be an integer");
    const int n = v.at("count").get<int>();
    if (n < 1) throw ValidationError("'" + name + ".count' must be >= 1");
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  }
  for (double x : out)
    if (!std::isfinite(x)) throw ValidationError("'" + name + "' contains a non-finite value");
  return out;
}

std::vector<int> read_int_list(const json& v, const std::string& name) {
  std::vector<int> out;
  if (v.is_array()) {
    for (const auto& x : v) {
      if (!x.is_number_integer()) throw ValidationError("'" + name + "' must contain integers");
      out.push_back(x.get<int>());
    }
  } else {
    if (!v.contains("start") || !v.contains("stop") || v.contains("count"))
      throw ValidationError("integer range '" + name + "' takes start and stop only");
    if (!v.at("start").is_number_integer() || !v.at("stop").is_number_integer())
      throw ValidationError("integer range '" + name + "' needs integer bounds");
    const int a = v.at("start").get<int>(), b = v.at("stop").get<int>();
    if (b < a) throw ValidationError("integer range '" + name + "' is empty");
    for (int i = a; i <= b; ++i) out.push_back(i);
  }
  return out;
}

Common common_settings(const json& cfg) {
  Common c;
  c.cache_dir = cfg.at("cache_dir").get<std::string>();
  c.output_dir = cfg.at("output_dir").get<std::string>();
  if (c.cache_dir.empty() || c.output_dir.empty()) throw ValidationError("cache_dir and output_dir must be non-empty");
  if (cfg.at("seed").get<double>() < 0) throw ValidationError("seed must be >= 0");
  c.seed = cfg.at("seed").get<std::uint64_t>();
  c.threads = cfg.at("threads").get<int>();
  if (c.threads < 1 || c.threads > 256) throw ValidationError("threads must lie in [1, 256]");
  c.allow_compute = cfg.at("allow_compute").get<bool>();
  return c;
}

DMRGConfig dmrg_settings(const json& cfg) {
  const auto& d = cfg.at("dmrg");
  DMRGConfig c;
  c.svd_cutoff = d.at("svd_cutoff").get<double>();
  c.energy_tol = d.at("energy_tol").get<double>();
  c.max_sweeps = d.at("max_sweeps").get<int>();
  c.min_sweeps = d.at("min_sweeps").get<int>();
  c.max_bond = d.at("max_bond").get<int>();
  c.init_bias = d.at("init_bias").get<int>();
  c.lanczos_max_iter = d.at("lanczos_max_iter").get<int>();
  c.lanczos_tol = d.at("lanczos_tol").get<double>();
  c.validate();
  return c;
}

MeanFieldConfig meanfield_settings(const json& cfg, int q) {
  const auto& m = cfg.at("meanfield");
  MeanFieldConfig c;
  c.q = q;
  c.k = m.at("k").get<int>();
  c.alpha_step = m.at("alpha_step").get<double>();
  c.alpha_tol = m.at("alpha_tol").get<double>();
  c.theta_step = m.at("theta_step").get<double>();
  c.validate();
  return c;
}

MERAManaParams mera_settings(const json& cfg) {
  const auto& m = cfg.at("mera");
  MERAManaParams p;
  p.m_sq = m.at("m_sq").get<double>();
  p.m_tri = m.at("m_tri").get<double>();
  p.m_max = m.at("m_max").get<double>();
  p.nu = m.at("nu").is_null() ? 0.0 : m.at("nu").get<double>();
  p.validate();
  return p;
}

}  // namespace magic::cli
