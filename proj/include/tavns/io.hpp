#pragma once

// Result files, run manifest and the JSON run configuration.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fftw3.h>
#include <json.hpp>

#include "tavns/errors.hpp"
#include "tavns/harness.hpp"
#include "tavns/langevin.hpp"

namespace tavns {

/// %.17g, so values round-trip exactly.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_time(double t) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

/// Tab-separated table with a one-line header.
class TsvWriter {
 public:
  explicit TsvWriter(const std::vector<std::string>& columns) : ncol_(columns.size()) { row_strings(columns); }

  void row(const std::vector<double>& values) {
    if (values.size() != ncol_) throw UsageError("tsv row width does not match header");
    std::vector<std::string> s;
    for (double v : values) s.push_back(fmt(v));
    row_strings(s);
  }
  const std::string& str() const noexcept { return out_; }

 private:
  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ += '\t';
      out_ += cells[i];
    }
    out_ += '\n';
  }
  std::size_t ncol_;
  std::string out_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  if (ec) throw EnvironmentError("cannot create directory " + p.parent_path().string() + ": " + ec.message());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw EnvironmentError("cannot open " + p.string() + " for writing");
  f << content;
  f.close();
  if (!f) throw EnvironmentError("write failed for " + p.string());
}

// ---------------------------------------------------------------------------
// Result tables

inline std::string errors_tsv(const ErrorReport& r) {
  TsvWriter w({"tau", "e_u", "e_p", "order_u", "order_p"});
  for (const auto& row : r.rows) w.row({row.tau, row.e_u, row.e_p, row.order_u, row.order_p});
  return w.str();
}

inline std::string aux_stats_tsv(const ErrorReport& r) {
  TsvWriter w({"tau", "mean_xi", "std_xi", "mean_eta", "std_eta"});
  for (const auto& row : r.rows) w.row({row.tau, row.mean_xi, row.std_xi, row.mean_eta, row.std_eta});
  return w.str();
}

inline std::string moments_tsv(const ErrorReport& r) {
  TsvWriter w({"tau", "mean_u2", "mean_u4", "max_u2"});
  for (const auto& row : r.rows) w.row({row.tau, row.mean_u2, row.mean_u4, row.max_u2});
  return w.str();
}

/// One row per (tau, path) with xi(T), eta(T).
inline std::string aux_samples_tsv(const ErrorReport& r) {
  TsvWriter w({"tau", "path", "xi", "eta"});
  for (const auto& row : r.rows)
    for (std::size_t p = 0; p < row.xi_samples.size(); ++p)
      w.row({row.tau, static_cast<double>(p), row.xi_samples[p], row.eta_samples[p]});
  return w.str();
}

/// Grid values after a '#' header line, one grid row (fixed y) per line.
inline std::string grid_tsv(const ScalarField& f, const std::string& header) {
  std::string out = "# " + header + "\n";
  const int m = f.grid.nodes();
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      if (i) out += '\t';
      out += fmt(f(i, j));
    }
    out += '\n';
  }
  return out;
}

inline std::string vorticity_tsv(const ScalarField& w, double t) {
  const int m = w.grid.nodes();
  return grid_tsv(w, "vorticity t=" + fmt_time(t) + " nodes=" + std::to_string(m) + "x" + std::to_string(m) +
                         " rows=y cols=x spacing=" + fmt(w.grid.h()));
}

inline std::string vorticity_file_name(double t) { return "vorticity_t" + fmt_time(t) + ".tsv"; }

inline std::string histogram_tsv(const Histogram& h) {
  TsvWriter w({"bin_center", "count", "density"});
  const Density d = h.density();
  for (int i = 0; i < h.bins(); ++i) w.row({h.center(i), static_cast<double>(h.counts[i]), d.values[i]});
  return w.str();
}

struct LangevinRow {
  double tau = 0.0;
  LangevinResult oav, tav;
};

inline std::string langevin_kl_tsv(const std::vector<LangevinRow>& rows) {
  TsvWriter w({"tau", "kl_oav", "kl_tav", "lost_oav", "lost_tav"});
  for (const auto& r : rows)
    w.row({r.tau, r.oav.kl, r.tav.kl, static_cast<double>(r.oav.blown_up), static_cast<double>(r.tav.blown_up)});
  return w.str();
}

// ---------------------------------------------------------------------------
// Run configuration

struct LangevinStudyConfig {
  LangevinConfig base;
  std::vector<double> taus{20.0 / 200, 20.0 / 400, 20.0 / 800, 20.0 / 1600, 20.0 / 3200};
};

struct RunConfig {
  std::string scenario = "accuracy_dirichlet";
  std::uint64_t seed = 1;
  int threads = 0;
  std::string output_dir;  // empty: TAVNS_OUTPUT_DIR or "out"
  AccuracyConfig accuracy;
  double simulate_tau = 1.0 / 800;
  LangevinStudyConfig langevin;
  ShearConfig shear;

  /// Pushes seed/threads into the sub-configs.
  void propagate() {
    accuracy.seed = shear.seed = seed;
    accuracy.threads = langevin.base.threads = shear.threads = threads;
  }
};

namespace config_detail {

using nlohmann::json;

inline std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

inline void check_keys(const json& j, const std::string& prefix, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError("expected an object", prefix.empty() ? "<root>" : prefix);
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw ConfigError("unknown key", join(prefix, it.key()));
}

template <class T>
void read(const json& j, const std::string& prefix, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("wrong type", join(prefix, key));
  }
}

inline BoundaryMode parse_boundary(const std::string& s, const std::string& field) {
  if (s == "dirichlet") return BoundaryMode::dirichlet;
  if (s == "periodic") return BoundaryMode::periodic;
  throw ConfigError("boundary_mode must be dirichlet or periodic", field);
}

inline GSpec read_g(const json& j, const std::string& field) {
  if (j.is_number()) return {GKind::constant, j.get<double>()};
  if (!j.is_string()) throw ConfigError("g must be a string or number", field);
  try {
    return parse_g(j.get<std::string>());
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), field);
  }
}

inline SchemeMode parse_mode(const std::string& s, const std::string& field) {
  if (s == "nonlinear") return SchemeMode::nonlinear;
  if (s == "linearized") return SchemeMode::linearized;
  throw ConfigError("mode must be nonlinear or linearized", field);
}

}  // namespace config_detail

inline std::string to_string(SchemeMode m) { return m == SchemeMode::nonlinear ? "nonlinear" : "linearized"; }

/// Parses a nested JSON run configuration; unknown keys and wrong types are
/// ConfigErrors naming the field path.
inline RunConfig parse_run_config(const nlohmann::json& j) {
  using namespace config_detail;
  RunConfig c;
  check_keys(j, "", {"scenario", "seed", "threads", "output_dir", "grid", "noise", "scheme", "study", "langevin",
                     "shear_layer"});
  read(j, "", "scenario", c.scenario);
  static const std::set<std::string> scenarios{"accuracy_dirichlet", "shear_layer_periodic", "langevin", "custom"};
  if (!scenarios.count(c.scenario)) throw ConfigError("unknown scenario '" + c.scenario + "'", "scenario");
  read(j, "", "seed", c.seed);
  read(j, "", "threads", c.threads);
  read(j, "", "output_dir", c.output_dir);
  AccuracyConfig& a = c.accuracy;
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    check_keys(g, "grid", {"modes", "boundary_mode"});
    read(g, "grid", "modes", a.modes);
    if (g.contains("boundary_mode")) {
      std::string b;
      read(g, "grid", "boundary_mode", b);
      if (parse_boundary(b, "grid.boundary_mode") != BoundaryMode::dirichlet)
        throw ConfigError("the accuracy study runs on a dirichlet grid", "grid.boundary_mode");
    }
  }
  if (j.contains("noise")) {
    const auto& n = j["noise"];
    check_keys(n, "noise", {"modes_per_dim", "epsilon"});
    read(n, "noise", "modes_per_dim", a.noise_modes);
    read(n, "noise", "epsilon", a.epsilon);
  }
  if (j.contains("scheme")) {
    const auto& s = j["scheme"];
    check_keys(s, "scheme", {"viscosity", "g", "dealias", "mode", "tau"});
    read(s, "scheme", "viscosity", a.viscosity);
    if (s.contains("g")) a.g = read_g(s["g"], "scheme.g");
    read(s, "scheme", "dealias", a.dealias);
    if (s.contains("mode")) {
      std::string m;
      read(s, "scheme", "mode", m);
      a.mode = parse_mode(m, "scheme.mode");
    }
    read(s, "scheme", "tau", c.simulate_tau);
  }
  if (j.contains("study")) {
    const auto& s = j["study"];
    check_keys(s, "study", {"T", "tau_list", "reference_tau", "n_samples"});
    read(s, "study", "T", a.T);
    read(s, "study", "tau_list", a.taus);
    read(s, "study", "reference_tau", a.reference_tau);
    read(s, "study", "n_samples", a.n_samples);
  }
  if (j.contains("langevin")) {
    const auto& l = j["langevin"];
    check_keys(l, "langevin", {"T", "tau_list", "n_paths", "x0_scale", "x0_clip", "range", "n_bins"});
    LangevinConfig& b = c.langevin.base;
    read(l, "langevin", "T", b.T);
    read(l, "langevin", "tau_list", c.langevin.taus);
    read(l, "langevin", "n_paths", b.n_paths);
    read(l, "langevin", "x0_scale", b.x0_scale);
    read(l, "langevin", "x0_clip", b.x0_clip);
    read(l, "langevin", "range", b.range);
    read(l, "langevin", "n_bins", b.n_bins);
  }
  if (j.contains("shear_layer")) {
    const auto& s = j["shear_layer"];
    check_keys(s, "shear_layer",
               {"modes", "viscosity", "epsilon", "noise_modes", "tau", "g", "n_samples", "times", "dealias"});
    ShearConfig& h = c.shear;
    read(s, "shear_layer", "modes", h.modes);
    read(s, "shear_layer", "viscosity", h.viscosity);
    read(s, "shear_layer", "epsilon", h.epsilon);
    read(s, "shear_layer", "noise_modes", h.noise_modes);
    read(s, "shear_layer", "tau", h.tau);
    if (s.contains("g")) h.g = read_g(s["g"], "shear_layer.g");
    read(s, "shear_layer", "n_samples", h.n_samples);
    read(s, "shear_layer", "times", h.times);
    read(s, "shear_layer", "dealias", h.dealias);
  }
  c.propagate();
  return c;
}

inline RunConfig load_run_config(const std::filesystem::path& p) {
  std::ifstream f(p);
  if (!f) throw EnvironmentError("cannot read config file " + p.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what(), "<file>");
  }
  return parse_run_config(j);
}

/// Fully resolved configuration, mirroring the input layout.
inline nlohmann::json to_json(const RunConfig& c) {
  const AccuracyConfig& a = c.accuracy;
  const ShearConfig& h = c.shear;
  const LangevinConfig& l = c.langevin.base;
  return {
      {"scenario", c.scenario},
      {"seed", c.seed},
      {"threads", c.threads},
      {"output_dir", c.output_dir},
      {"grid", {{"modes", a.modes}, {"boundary_mode", "dirichlet"}, {"n", a.grid().n}}},
      {"noise", {{"modes_per_dim", a.noise_modes}, {"epsilon", a.epsilon}}},
      {"scheme",
       {{"viscosity", a.viscosity}, {"g", to_string(a.g)}, {"dealias", a.dealias}, {"mode", to_string(a.mode)},
        {"tau", c.simulate_tau}}},
      {"study", {{"T", a.T}, {"tau_list", a.taus}, {"reference_tau", a.reference_tau}, {"n_samples", a.n_samples}}},
      {"langevin",
       {{"T", l.T},
        {"tau_list", c.langevin.taus},
        {"n_paths", l.n_paths},
        {"x0_scale", l.x0_scale},
        {"x0_clip", l.x0_clip},
        {"range", l.range},
        {"n_bins", l.n_bins}}},
      {"shear_layer",
       {{"modes", h.modes},
        {"n", h.grid().n},
        {"viscosity", h.viscosity},
        {"epsilon", h.epsilon},
        {"noise_modes", h.noise_modes},
        {"tau", h.tau},
        {"g", to_string(h.g)},
        {"n_samples", h.n_samples},
        {"times", h.times},
        {"dealias", h.dealias}}},
  };
}

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string manifest_json(const RunConfig& c, const std::string& command) {
  nlohmann::json m{{"command", command},
                   {"version", kVersion},
                   {"fftw", std::string(fftw_version)},
                   {"seed", c.seed},
                   {"timestamp", utc_timestamp()},
                   {"config", to_json(c)}};
  return m.dump(2) + "\n";
}

}  // namespace tavns
