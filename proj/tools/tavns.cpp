// tavns command-line driver.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tavns/tavns.hpp"

namespace fs = std::filesystem;
using namespace tavns;

namespace {

enum Exit { kOk = 0, kUsage = 2, kEnvironment = 3, kBlowUp = 4, kInternal = 5 };

int report(const char* category, const std::string& message, int code, const nlohmann::json& extra = {}) {
  nlohmann::json j{{"error", category}, {"message", message}};
  if (extra.is_object())
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  std::cerr << j.dump() << "\n";
  return code;
}

struct Options {
  std::string config;
  std::vector<double> taus;
  std::optional<long> samples;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> grid;
  std::string g;
  std::string mode;
  std::optional<bool> dealias;
  bool paper_scale = false;
  std::optional<int> threads;
  bool no_noise = false;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "JSON run configuration");
  sub->add_option("--tau", o.taus, "step size(s); repeat or list for ladders")->delimiter(',');
  sub->add_option("--samples", o.samples, "sample paths");
  sub->add_option("--seed", o.seed, "64-bit seed");
  sub->add_option("--out", o.out, "output directory (default $TAVNS_OUTPUT_DIR or ./out)");
  sub->add_option("--grid", o.grid, "modes per direction");
  sub->add_option("--g", o.g, "noise multiplier: identity_one | two_minus_cos | constant:<c>");
  sub->add_option("--mode", o.mode, "nonlinear | linearized");
  sub->add_option("--dealias", o.dealias, "true | false");
  sub->add_option("--threads", o.threads, "worker threads (0 = all cores)");
}

RunConfig resolve(const Options& o, const std::string& command) {
  RunConfig c;
  if (o.paper_scale) c.accuracy = AccuracyConfig::paper_scale();
  if (!o.config.empty()) {
    const RunConfig f = load_run_config(o.config);
    const AccuracyConfig keep = c.accuracy;
    c = f;
    // --paper-scale sets the defaults the file did not override
    if (o.paper_scale) {
      const AccuracyConfig d;
      if (f.accuracy.modes == d.modes) c.accuracy.modes = keep.modes;
      if (f.accuracy.n_samples == d.n_samples) c.accuracy.n_samples = keep.n_samples;
      if (f.accuracy.taus == d.taus) c.accuracy.taus = keep.taus;
      if (f.accuracy.reference_tau == d.reference_tau) c.accuracy.reference_tau = keep.reference_tau;
    }
  }
  if (o.seed) c.seed = *o.seed;
  if (o.threads) c.threads = *o.threads;
  if (!o.out.empty()) c.output_dir = o.out;
  if (c.output_dir.empty()) {
    const char* env = std::getenv("TAVNS_OUTPUT_DIR");
    c.output_dir = env && *env ? env : "out";
  }
  AccuracyConfig& a = c.accuracy;
  if (o.grid) a.modes = c.shear.modes = *o.grid;
  if (!o.g.empty()) {
    try {
      const GSpec g = parse_g(o.g);
      if (command == "shear-layer") c.shear.g = g;
      else a.g = g;
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), "--g");
    }
  }
  if (!o.mode.empty()) {
    if (o.mode == "nonlinear") a.mode = SchemeMode::nonlinear;
    else if (o.mode == "linearized") a.mode = SchemeMode::linearized;
    else throw ConfigError("mode must be nonlinear or linearized", "--mode");
  }
  if (o.dealias) a.dealias = c.shear.dealias = *o.dealias;
  if (o.samples) {
    a.n_samples = c.shear.n_samples = *o.samples;
    c.langevin.base.n_paths = *o.samples;
  }
  if (!o.taus.empty()) {
    if (command == "simulate") c.simulate_tau = o.taus.front();
    else if (command == "langevin") c.langevin.taus = o.taus;
    else if (command == "shear-layer") c.shear.tau = o.taus.front();
    else a.taus = o.taus;
  }
  c.propagate();
  return c;
}

fs::path out_dir(const RunConfig& c) { return fs::path(c.output_dir); }

void write_manifest(const RunConfig& c, const std::string& command) {
  write_file(out_dir(c) / "manifest.json", manifest_json(c, command));
}

int cmd_simulate(const RunConfig& c) {
  const AccuracyConfig& a = c.accuracy;
  validate(a);
  const long steps = exact_ratio(a.T, c.simulate_tau, "tau must divide T", "scheme.tau");
  const Grid g = a.grid();
  const NoiseBasis nb = build_noise_basis(a.noise());
  SchemeConfig sc = scheme_config(a, c.simulate_tau);
  sc.diagnostics = true;
  SchemeState s = make_initial_state(accuracy_initial_velocity(g));
  const NormalStream rng(c.seed, 0);
  TsvWriter w({"step", "t", "energy", "xi", "eta", "divergence", "energy_residual"});
  w.row({0.0, 0.0, inner_product(s.u, s.u), s.xi, s.eta, divergence(s.u).max_abs(), 0.0});
  for (long k = 0; k < steps; ++k) {
    const VectorField dW = sample_increment(nb, c.simulate_tau, rng, static_cast<std::uint64_t>(k));
    const StepResult r = advance(s, dW, sc);
    s = r.state;
    w.row({static_cast<double>(s.step_index), s.t, inner_product(s.u, s.u), s.xi, s.eta, r.diag.divergence_norm,
           r.diag.energy_identity_residual});
  }
  write_file(out_dir(c) / "trajectory.tsv", w.str());
  write_file(out_dir(c) / vorticity_file_name(s.t), vorticity_tsv(vorticity(s.u), s.t));
  write_manifest(c, "simulate");
  return kOk;
}

int cmd_converge(const RunConfig& c) {
  const ErrorReport r = run_accuracy_study(c.accuracy);
  const fs::path d = out_dir(c);
  write_file(d / "errors.tsv", errors_tsv(r));
  write_file(d / "aux_stats.tsv", aux_stats_tsv(r));
  write_file(d / "moments.tsv", moments_tsv(r));
  write_file(d / "aux_samples.tsv", aux_samples_tsv(r));
  write_manifest(c, "converge");
  std::printf("fitted order u %.4f  p %.4f\n", r.fitted_order_u, r.fitted_order_p);
  return kOk;
}

int cmd_monitor(const RunConfig& c, bool noise) {
  const ErrorReport r = run_moment_monitor(c.accuracy, noise);
  const fs::path d = out_dir(c);
  write_file(d / "aux_stats.tsv", aux_stats_tsv(r));
  write_file(d / "moments.tsv", moments_tsv(r));
  write_file(d / "aux_samples.tsv", aux_samples_tsv(r));
  write_manifest(c, "monitor");
  return kOk;
}

int cmd_langevin(const RunConfig& c) {
  std::vector<LangevinRow> rows;
  const fs::path d = out_dir(c);
  for (double tau : c.langevin.taus) {
    LangevinConfig lc = c.langevin.base;
    lc.tau = tau;
    LangevinRow row{tau, run_langevin_study(lc, LangevinMethod::oav, c.seed),
                    run_langevin_study(lc, LangevinMethod::tav, c.seed)};
    const std::string steps = std::to_string(lc.steps());
    write_file(d / ("langevin_hist_oav_n" + steps + ".tsv"), histogram_tsv(row.oav.histogram));
    write_file(d / ("langevin_hist_tav_n" + steps + ".tsv"), histogram_tsv(row.tav.histogram));
    for (const LangevinResult* r : {&row.oav, &row.tav})
      if (r->blown_up > 0)
        std::fprintf(stderr, "%s tau=%g: %ld paths non-finite (first: path %ld, step %ld)\n",
                     to_string(r->method).c_str(), tau, r->blown_up, r->first_blown_path, r->first_blown_step);
    rows.push_back(std::move(row));
  }
  write_file(d / "langevin_kl.tsv", langevin_kl_tsv(rows));
  write_manifest(c, "langevin");
  return kOk;
}

int cmd_shear(const RunConfig& c) {
  const ShearResult r = run_shear_layer(c.shear);
  const fs::path d = out_dir(c);
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    write_file(d / "deterministic" / vorticity_file_name(r.times[k]), vorticity_tsv(r.deterministic[k], r.times[k]));
    if (!r.stochastic_mean.empty())
      write_file(d / "stochastic" / vorticity_file_name(r.times[k]),
                 vorticity_tsv(r.stochastic_mean[k], r.times[k]));
  }
  TsvWriter w({"t", "circulation"});
  for (std::size_t k = 0; k < r.times.size(); ++k) w.row({r.times[k], r.circulation[k]});
  write_file(d / "circulation.tsv", w.str());
  write_manifest(c, "shear-layer");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TAV scheme solver for stochastic Navier-Stokes and Langevin studies"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Options o;
  auto* simulate = app.add_subcommand("simulate", "single path with per-step diagnostics");
  auto* converge = app.add_subcommand("converge", "coupled strong-error study");
  auto* langevin = app.add_subcommand("langevin", "OAV/TAV invariant-measure study");
  auto* shear = app.add_subcommand("shear-layer", "periodic shear-layer snapshots");
  auto* monitor = app.add_subcommand("monitor", "auxiliary-variable and moment statistics");
  for (auto* s : {simulate, converge, langevin, shear, monitor}) add_common(s, o);
  for (auto* s : {converge, monitor, simulate})
    s->add_flag("--paper-scale", o.paper_scale, "40 modes, 300 samples, reference 1/12800");
  monitor->add_flag("--no-noise", o.no_noise, "deterministic run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report("usage", e.what(), kUsage);
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const RunConfig c = resolve(o, command);
    if (command == "simulate") return cmd_simulate(c);
    if (command == "converge") return cmd_converge(c);
    if (command == "langevin") return cmd_langevin(c);
    if (command == "shear-layer") return cmd_shear(c);
    return cmd_monitor(c, !o.no_noise);
  } catch (const ConfigError& e) {
    return report("config", e.what(), kUsage, {{"field", e.field()}});
  } catch (const UsageError& e) {
    return report("usage", e.what(), kUsage);
  } catch (const EnvironmentError& e) {
    return report("environment", e.what(), kEnvironment);
  } catch (const BlowUpError& e) {
    return report("blow_up", e.what(), kBlowUp, {{"step", e.step_index()}, {"path", e.path_index()}});
  } catch (const std::exception& e) {
    return report("internal", e.what(), kInternal);
  }
}
