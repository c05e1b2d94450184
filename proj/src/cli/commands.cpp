#include "cli/commands.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>

#include <CLI11.hpp>

#include "cli/config.hpp"
#include "cli/selftest.hpp"
#include "magic/cache.hpp"
#include "magic/errors.hpp"
#include "magic/io.hpp"
#include "magic/parallel.hpp"

namespace magic::cli {

namespace fs = std::filesystem;

namespace {

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::string fd(double x) { return format_double(x); }

// Collects outputs and stage timings; the manifest is written last, so its
// presence marks a completed run.
class Run {
 public:
  Run(std::string command, json cfg)
      : command_(std::move(command)), cfg_(std::move(cfg)), common_(common_settings(cfg_)),
        started_(utc_now()), t0_(std::chrono::steady_clock::now()) {}

  const json& cfg() const { return cfg_; }
  const Common& common() const { return common_; }

  template <class F>
  auto stage(const std::string& name, F&& fn) {
    const auto t = std::chrono::steady_clock::now();
    auto finish = [&] { stages_.push_back({{"name", name}, {"seconds", seconds_since(t)}}); };
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      finish();
    } else {
      auto r = fn();
      finish();
      return r;
    }
  }

  void write(const std::string& name, const std::string& contents) {
    fs::create_directories(common_.output_dir);
    write_file_atomic(common_.output_dir / name, contents);
    outputs_.push_back(name);
  }

  void note(const std::string& key, json value) { notes_[key] = std::move(value); }

  fs::path finish() {
    json files = json::array();
    for (const auto& name : outputs_) {
      const auto path = common_.output_dir / name;
      files.push_back({{"file", name}, {"sha256", sha256_file(path)}, {"bytes", fs::file_size(path)}});
    }
    json m = {{"command", command_},   {"version", MAGIC_VERSION}, {"config", cfg_},
              {"started_at", started_}, {"wall_seconds", seconds_since(t0_)}, {"stages", stages_},
              {"outputs", files}};
    if (!notes_.empty()) m["notes"] = notes_;
    fs::create_directories(common_.output_dir);
    const auto path = common_.output_dir / ("manifest-" + command_ + ".json");
    write_file_atomic(path, m.dump(2) + "\n");
    return path;
  }

 private:
  static double seconds_since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
  }

  std::string command_;
  json cfg_;
  Common common_;
  std::string started_;
  std::chrono::steady_clock::time_point t0_;
  json stages_ = json::array();
  json notes_ = json::object();
  std::vector<std::string> outputs_;
};

// Ground states from the cache, computed on demand when the run allows it.
class CachedProvider {
 public:
  CachedProvider(const json& cfg, const Common& common)
      : cache_(common.cache_dir), dmrg_(dmrg_settings(cfg)), allow_(common.allow_compute) {}

  CacheKey key(const PottsParams& p) const { return {p.N, p.theta, p.lambda, dmrg_.svd_cutoff}; }

  // Fails up front, naming the command that fills the cache, when computing is off.
  void require(const std::vector<PottsParams>& points) const {
    if (allow_) return;
    std::vector<double> thetas;
    for (const auto& p : points)
      if (!cache_.contains(key(p))) thetas.push_back(p.theta);
    if (thetas.empty()) return;
    std::ostringstream msg;
    msg << thetas.size() << " ground state(s) missing from cache " << cache_.dir().string()
        << " and computing is disabled; run:\n  potts_magic groundstate --cache-dir " << cache_.dir().string()
        << " --set model.N=" << points.front().N << " --set model.lambda=" << fd(points.front().lambda)
        << " --set dmrg.svd_cutoff=" << fd(dmrg_.svd_cutoff) << " --set 'groundstate.thetas=[";
    for (std::size_t i = 0; i < thetas.size(); ++i) msg << (i ? "," : "") << fd(thetas[i]);
    msg << "]' --set 'groundstate.lambdas=[" << fd(points.front().lambda) << "]'";
    throw ValidationError(msg.str());
  }

  struct Result {
    CachedGroundState gs;
    bool hit;
  };

  Result get(const PottsParams& p) {
    const auto k = key(p);
    if (auto gs = cache_.load(k)) {
      ++hits_;
      return {std::move(*gs), true};
    }
    if (!allow_) throw ValidationError("ground state for theta=" + fd(p.theta) + " is not cached");
    auto r = dmrg_ground_state(p, dmrg_);
    CachedGroundState gs{std::move(r.state), r.energy, r.sweeps, r.max_discarded};
    cache_.store(k, gs);
    ++computed_;
    return {std::move(gs), false};
  }

  GroundStateProvider provider() {
    return [this](const PottsParams& p) { return get(p).gs.state; };
  }

  int hits() const { return hits_; }
  int computed() const { return computed_; }

 private:
  GroundStateCache cache_;
  DMRGConfig dmrg_;
  bool allow_;
  std::atomic<int> hits_{0}, computed_{0};
};

std::vector<PottsParams> points_for(int n, double lambda, const std::vector<double>& thetas) {
  std::vector<PottsParams> pts;
  for (double t : thetas) {
    PottsParams p{n, t, lambda};
    p.validate();
    pts.push_back(p);
  }
  return pts;
}

StateKind read_kind(const json& v, const std::string& name) {
  const auto s = v.get<std::string>();
  if (s == "cat") return StateKind::cat;
  if (s == "mixture") return StateKind::mixture;
  throw ValidationError("'" + name + "' must be \"cat\" or \"mixture\"");
}

// ---- groundstate ----

void cmd_groundstate(Run& run, std::ostream& out) {
  const auto& cfg = run.cfg();
  const int n = cfg.at("model").at("N").get<int>();
  const auto thetas = read_grid(cfg.at("groundstate").at("thetas"), "groundstate.thetas");
  const auto lambdas = read_grid(cfg.at("groundstate").at("lambdas"), "groundstate.lambdas");
  std::vector<PottsParams> pts;
  for (double l : lambdas)
    for (const auto& p : points_for(n, l, thetas)) pts.push_back(p);
  Common common = run.common();
  common.allow_compute = true;
  CachedProvider prov(cfg, common);

  struct Row {
    PottsParams p;
    double energy, entropy, zz;
    int chi, sweeps;
    bool hit;
  };
  std::vector<Row> rows(pts.size());
  run.stage("dmrg", [&] {
    parallel_for(pts.size(), common.threads, [&](std::size_t i) {
      auto r = prov.get(pts[i]);
      const auto f = field_response(r.gs.state, pts[i].lambda, r.gs.energy);
      rows[i] = {pts[i], r.gs.energy, f.mid_entropy, f.z_plus_zdag, r.gs.state.max_bond(), r.gs.sweeps, r.hit};
    });
  });
  CsvWriter csv({"N", "theta", "lambda", "energy", "mid_entropy", "max_bond", "z_plus_zdag", "sweeps"});
  for (const auto& r : rows) {
    csv.row({std::to_string(r.p.N), fd(r.p.theta), fd(r.p.lambda), fd(r.energy), fd(r.entropy),
             std::to_string(r.chi), fd(r.zz), std::to_string(r.sweeps)});
    char line[256];
    std::snprintf(line, sizeof line, "N=%d theta=%.6f lambda=%.4g energy=%.12f S_mid=%.6f chi=%d%s\n", r.p.N,
                  r.p.theta, r.p.lambda, r.energy, r.entropy, r.chi, r.hit ? " (cache hit)" : "");
    out << line;
  }
  run.write("groundstate.csv", csv.str());
  run.note("cache_hits", prov.hits());
  run.note("computed", prov.computed());
}

// ---- scans ----

void cmd_scan_subsystem(Run& run, std::ostream& out) {
  const auto& cfg = run.cfg();
  ScanSpec spec;
  spec.N = cfg.at("model").at("N").get<int>();
  spec.lambda = cfg.at("model").at("lambda").get<double>();
  spec.thetas = read_grid(cfg.at("subsystem").at("thetas"), "subsystem.thetas");
  spec.ells = read_int_list(cfg.at("subsystem").at("ells"), "subsystem.ells");
  spec.kind = read_kind(cfg.at("subsystem").at("kind"), "subsystem.kind");
  spec.threads = run.common().threads;
  spec.validate_subsystem();
  CachedProvider prov(cfg, run.common());
  prov.require(points_for(spec.N, spec.lambda, spec.thetas));
  const auto rows = run.stage("scan", [&] { return subsystem_scan(spec, prov.provider()); });
  CsvWriter csv({"theta", "ell", "mana", "mana_density"});
  for (const auto& r : rows) csv.row({fd(r.theta), std::to_string(r.ell), fd(r.mana), fd(r.mana_density)});
  run.write("subsystem_scan.csv", csv.str());
  run.note("cache_hits", prov.hits());
  run.note("computed", prov.computed());
  out << rows.size() << " subsystem rows written\n";
}

void cmd_scan_twopoint(Run& run, std::ostream& out) {
  const auto& cfg = run.cfg();
  const auto& tp = cfg.at("twopoint");
  ScanSpec spec;
  spec.N = cfg.at("model").at("N").get<int>();
  spec.lambda = cfg.at("model").at("lambda").get<double>();
  spec.thetas = read_grid(tp.at("thetas"), "twopoint.thetas");
  spec.dxs = read_int_list(tp.at("dxs"), "twopoint.dxs");
  spec.base_site = tp.at("base_site").get<int>();
  spec.block = tp.at("block").get<int>();
  spec.kind = read_kind(tp.at("kind"), "twopoint.kind");
  spec.threads = run.common().threads;
  spec.validate_twopoint();
  CachedProvider prov(cfg, run.common());
  prov.require(points_for(spec.N, spec.lambda, spec.thetas));
  const auto rows = run.stage("scan", [&] { return twopoint_scan(spec, prov.provider()); });
  CsvWriter csv({"theta", "dx", "mcc", "dead"});
  for (const auto& r : rows) csv.row({fd(r.theta), std::to_string(r.dx), fd(r.mcc), r.dead ? "1" : "0"});
  run.write("twopoint.csv", csv.str());
  json summary = json::array();
  for (double t : spec.thetas) {
    const auto d = sudden_death_distance(rows, t);
    summary.push_back({{"theta", t}, {"sudden_death_dx", d ? json(*d) : json(nullptr)}});
  }
  run.write("twopoint_summary.json", summary.dump(2) + "\n");
  run.note("cache_hits", prov.hits());
  run.note("computed", prov.computed());
  out << rows.size() << " two-point rows written\n";
}

// ---- toy model ----

void cmd_toy(Run& run, std::ostream& out) {
  const auto& t = run.cfg().at("toy");
  const auto alphas = read_grid(t.at("alphas"), "toy.alphas");
  const auto diag = read_grid(t.at("rho1_diag"), "toy.rho1_diag");
  if (diag.size() != 3) throw ValidationError("toy.rho1_diag needs three populations");
  double total = 0.0;
  for (double p : diag) {
    if (p < 0.0) throw ValidationError("toy.rho1_diag entries must be >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-10) throw ValidationError("toy.rho1_diag must sum to 1");
  const double width = t.at("bisection_width").get<double>();
  if (!(width > 0.0 && width < 0.5)) throw ValidationError("toy.bisection_width must lie in (0, 0.5)");
  Mat rho1 = Mat::Zero(3, 3);
  for (int i = 0; i < 3; ++i) rho1(i, i) = diag[i];

  CsvWriter csv({"alpha", "mana", "neg_sum", "min_w"});
  run.stage("sweep", [&] {
    for (double a : alphas) {
      const auto w = wigner_of(toy_density({a, rho1}));
      const auto m = mana(w);
      csv.row({fd(a), fd(m.mana), fd(m.neg_sum), fd(m.min_w)});
    }
  });
  run.write("toy.csv", csv.str());
  const auto sd = run.stage("bisection", [&] { return sudden_death_alpha(rho1, width); });
  const auto exact = toy_alpha_exact(rho1);
  json j = {{"window", sd.window},
            {"alpha0", sd.alpha0},
            {"bracket", {sd.lo, sd.hi}},
            {"iterations", sd.iterations},
            {"alpha0_exact", exact ? json(*exact) : json(nullptr)}};
  run.write("toy.json", j.dump(2) + "\n");
  out << "alpha0 in [" << fd(sd.lo) << ", " << fd(sd.hi) << "]\n";
}

// ---- MERA ----

void cmd_mera_predict(Run& run, std::ostream& out) {
  const auto& m = run.cfg().at("mera");
  const auto p = mera_settings(run.cfg());
  const auto ells = read_int_list(m.at("ells"), "mera.ells");
  const auto thetas = read_grid(m.at("thetas"), "mera.thetas");
  const int max_k = m.at("max_k").get<int>();
  if (max_k < 0 || max_k > 12) throw ValidationError("mera.max_k must lie in [0, 12]");
  if (!thetas.empty() && m.at("nu").is_null())
    throw ValidationError("mera.nu must be given explicitly for the quasi-MERA curve (mera.thetas is non-empty)");
  for (int l : ells)
    if (l < 2) throw ValidationError("mera.ells entries must be >= 2");

  std::ostringstream head;
  head << "# m_sq=" << fd(p.m_sq) << " m_tri=" << fd(p.m_tri) << " m_max=" << fd(p.m_max)
       << " nu=" << (m.at("nu").is_null() ? std::string("unset") : fd(p.nu)) << "\n";

  CsvWriter counts({"k", "n_tri", "n_sq", "ell", "total_tri", "total_sq", "oracle_agrees"});
  run.stage("counts", [&] {
    for (int k = 0; k <= max_k; ++k) {
      const auto c = domain_counts(k);
      const bool ok = mera_graph_oracle(k) == c;
      if (!ok) throw NumericalError("graph oracle disagrees with the closed form at k=" + std::to_string(k));
      counts.row({std::to_string(k), std::to_string(c.n_tri), std::to_string(c.n_sq), std::to_string(c.ell),
                  std::to_string(c.total_tri), std::to_string(c.total_sq), "1"});
    }
  });
  run.write("mera_counts.csv", counts.str());

  CsvWriter finite({"ell", "mana_density"});
  for (int l : ells) finite.row({std::to_string(l), fd(finite_mana_prediction(l, p))});
  run.write("mera_finite.csv", head.str() + finite.str());

  if (!thetas.empty()) {
    CsvWriter quasi({"theta", "mana_density"});
    for (double t : thetas) quasi.row({fd(t), fd(quasi_mera_prediction(t, p))});
    run.write("mera_quasi.csv", head.str() + quasi.str());
  }

  const double ch_p = m.at("channel_p").get<double>();
  const auto ch = depolarizing_product_channel(ch_p, Mat::Identity(3, 3) / 3.0);
  const auto spec = run.stage("channel", [&] { return channel_spectrum(ch); });
  json eig = json::array();
  for (const auto& e : spec.eigenvalues) eig.push_back({e.real(), e.imag()});
  json cj = {{"channel", "two-site product depolarizing toward I/3 x I/3 (illustrative)"},
             {"p", ch_p},
             {"lambda1", spec.lambda1},
             {"two_delta", std::isinf(spec.two_delta) ? json(nullptr) : json(spec.two_delta)},
             {"degenerate", spec.degenerate},
             {"fixed_point_residual", spec.fixed_point_residual},
             {"eigenvalues", eig}};
  run.write("channel.json", cj.dump(2) + "\n");

  json summary = {{"asymptotic_density", finite_mana_prediction(std::numeric_limits<double>::infinity(), p)}};
  const auto fit_ells = read_int_list(m.at("fit_ells"), "mera.fit_ells");
  const auto fit_m = read_grid(m.at("fit_densities"), "mera.fit_densities");
  if (fit_ells.size() != fit_m.size()) throw ValidationError("mera.fit_ells and mera.fit_densities differ in length");
  if (!fit_ells.empty()) {
    const auto f = fit_mera_params(fit_ells, fit_m);
    summary["fit"] = {{"m_sq", f.m_sq}, {"m_tri", f.m_tri}, {"rms", f.rms}};
  }
  run.write("mera_summary.json", summary.dump(2) + "\n");
  out << "asymptotic mana density " << fd(summary["asymptotic_density"].get<double>()) << "\n";
}

// ---- mean field ----

void cmd_meanfield(Run& run, std::ostream& out) {
  const auto& m = run.cfg().at("meanfield");
  const auto qs = read_int_list(m.at("qs"), "meanfield.qs");
  const auto thetas = read_grid(m.at("thetas"), "meanfield.thetas");
  const bool transitions = m.at("transitions").get<bool>();
  if (qs.empty()) throw ValidationError("meanfield.qs is empty");
  std::vector<MeanFieldConfig> cfgs;
  for (int q : qs) cfgs.push_back(meanfield_settings(run.cfg(), q));

  std::vector<std::vector<MeanFieldPoint>> scans(qs.size());
  std::vector<std::optional<Transition>> trs(qs.size());
  run.stage("meanfield", [&] {
    parallel_for(qs.size(), run.common().threads, [&](std::size_t i) {
      scans[i] = meanfield_scan(cfgs[i], thetas);
      if (transitions) trs[i] = transition_theta(cfgs[i]);
    });
  });
  json summary = json::array();
  for (std::size_t i = 0; i < qs.size(); ++i) {
    CsvWriter csv({"theta", "alpha_star", "z_expect", "x_expect", "energy", "mana_per_vertex"});
    double peak = 0.0, peak_theta = 0.0;
    for (const auto& pt : scans[i]) {
      csv.row({fd(pt.theta), fd(pt.alpha_star), fd(pt.z_expect), fd(pt.x_expect), fd(pt.energy_per_vertex),
               pt.mana_per_vertex ? fd(*pt.mana_per_vertex) : std::string()});
      if (pt.mana_per_vertex && *pt.mana_per_vertex > peak) {
        peak = *pt.mana_per_vertex;
        peak_theta = pt.theta;
      }
    }
    run.write("meanfield_q" + std::to_string(qs[i]) + ".csv", csv.str());
    json s = {{"q", qs[i]}, {"k", cfgs[i].k}, {"ln_q", std::log(static_cast<double>(qs[i]))},
              {"theta_c_large_q", large_q_theta_c(cfgs[i].k)}};
    if (scans[i].front().mana_per_vertex) s["peak_mana"] = {{"value", peak}, {"theta", peak_theta}};
    if (trs[i]) {
      s["theta_c"] = trs[i]->theta_c;
      s["order"] = trs[i]->order == TransitionOrder::first ? "first" : "second";
      s["jump"] = trs[i]->jump;
    }
    summary.push_back(s);
  }
  run.write("meanfield.json", summary.dump(2) + "\n");
  out << "mean-field tables written for " << qs.size() << " value(s) of q\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stabilizer-magic measurements for the three-state Potts chain"};
  app.require_subcommand(1, 1);
  Overrides o;
  std::string cache_dir, output_dir, config_file;
  std::uint64_t seed = 0;
  int threads = 1;
  bool no_compute = false, print_config = false;
  app.add_option("--config", config_file, "JSON run document");
  app.add_option("--set", o.sets, "Override one setting: section.key=value (value parsed as JSON)");
  app.add_option("--cache-dir", cache_dir, "Ground-state cache directory (overrides " + std::string(kCacheEnv) + ")");
  app.add_option("--output-dir", output_dir, "Directory for CSV/JSON outputs and the manifest");
  app.add_option("--seed", seed, "RNG seed");
  app.add_option("--threads", threads, "Worker threads");
  app.add_flag("--no-compute", no_compute, "Fail instead of running DMRG for uncached ground states");
  app.add_flag("--print-config", print_config, "Print the resolved configuration before running");

  std::string fault;
  auto* gs = app.add_subcommand("groundstate", "Compute and cache DMRG ground states");
  auto* sub = app.add_subcommand("scan-subsystem", "Mana of centered contiguous subsystems");
  auto* two = app.add_subcommand("scan-twopoint", "Connected two-point mana");
  auto* toy = app.add_subcommand("toy", "Two-qutrit toy model and its sudden-death threshold");
  auto* mera = app.add_subcommand("mera-predict", "MERA counting, predictions and channel spectrum");
  auto* mf = app.add_subcommand("meanfield", "Mean-field tables over q and theta");
  auto* st = app.add_subcommand("selftest", "Fast invariant suite");
  st->add_option("--fault", fault, "Inject a fault: corrupt-phase-space or corrupt-stabilizer");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (!config_file.empty()) o.config_file = config_file;
    if (app.count("--cache-dir")) o.cache_dir = cache_dir;
    if (app.count("--output-dir")) o.output_dir = output_dir;
    if (app.count("--seed")) o.seed = seed;
    if (app.count("--threads")) o.threads = threads;
    if (no_compute) o.allow_compute = false;
    if (st->parsed() && st->count("--fault")) o.sets.push_back("selftest.fault=\"" + fault + "\"");
    const json cfg = resolve_config(o);
    if (print_config) out << cfg.dump(2) << "\n";

    if (st->parsed()) {
      const auto c = common_settings(cfg);
      const auto rep = run_selftest(c.seed, cfg.at("selftest").at("fault").get<std::string>());
      out << rep.str();
      return rep.passed() ? kExitOk : kExitNumerical;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    Run r(name, cfg);
    if (gs->parsed()) cmd_groundstate(r, out);
    else if (sub->parsed()) cmd_scan_subsystem(r, out);
    else if (two->parsed()) cmd_scan_twopoint(r, out);
    else if (toy->parsed()) cmd_toy(r, out);
    else if (mera->parsed()) cmd_mera_predict(r, out);
    else if (mf->parsed()) cmd_meanfield(r, out);
    out << "manifest: " << r.finish().string() << "\n";
    return kExitOk;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace magic::cli
