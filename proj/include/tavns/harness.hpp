#pragma once

// Monte-Carlo experiments driven by the TAV scheme.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "tavns/errors.hpp"
#include "tavns/field.hpp"
#include "tavns/parallel.hpp"
#include "tavns/qwiener.hpp"
#include "tavns/scheme.hpp"
#include "tavns/spectral.hpp"

namespace tavns {

inline constexpr const char* kVersion = "0.3.0";

// ---------------------------------------------------------------------------
// Initial conditions and advectors

/// Polynomial vortex of the Dirichlet accuracy test.
inline VectorField accuracy_initial_velocity(const Grid& g) {
  return VectorField::sample(g, kVelocityX, kVelocityY, [](double x, double y) {
    return std::array<double, 2>{-128.0 * x * x * (x - 1) * (x - 1) * y * (y - 1) * (2 * y - 1),
                                 128.0 * y * y * (y - 1) * (y - 1) * x * (x - 1) * (2 * x - 1)};
  });
}

/// Doubly periodic shear layer with a sinusoidal cross-stream kick.
inline VectorField shear_layer_initial_velocity(const Grid& g) {
  return VectorField::sample(g, kFourier, kFourier, [](double x, double y) {
    const double u = y <= 0.5 ? std::tanh(30.0 * (y - 0.25)) : std::tanh(30.0 * (0.75 - y));
    return std::array<double, 2>{u, 0.05 * std::sin(2.0 * std::numbers::pi * x)};
  });
}

/// Taylor-Green vortex e^{-8 pi^2 nu t} (sin 2pi x cos 2pi y, -cos 2pi x sin 2pi y).
inline VectorField taylor_green_velocity(const Grid& g, double nu, double t) {
  const double pi = std::numbers::pi;
  const double d = std::exp(-8.0 * pi * pi * nu * t);
  return VectorField::sample(g, kFourier, kFourier, [&](double x, double y) {
    return std::array<double, 2>{d * std::sin(2 * pi * x) * std::cos(2 * pi * y),
                                 -d * std::cos(2 * pi * x) * std::sin(2 * pi * y)};
  });
}

/// Steady divergence-free advector with unit maximum for linearized runs.
inline VectorField steady_advector(const Grid& g) {
  const double pi = std::numbers::pi;
  if (g.mode == BoundaryMode::periodic)
    return VectorField::sample(g, kFourier, kFourier, [&](double x, double y) {
      return std::array<double, 2>{std::sin(2 * pi * x) * std::cos(2 * pi * y),
                                   -std::cos(2 * pi * x) * std::sin(2 * pi * y)};
    });
  return VectorField::sample(g, kVelocityX, kVelocityY, [&](double x, double y) {
    return std::array<double, 2>{std::sin(pi * x) * std::cos(pi * y), -std::cos(pi * x) * std::sin(pi * y)};
  });
}

// ---------------------------------------------------------------------------
// Strong-error study

struct AccuracyConfig {
  int modes = 32;
  double T = 0.2;
  std::vector<double> taus{1.0 / 100, 1.0 / 200, 1.0 / 400, 1.0 / 800};
  double reference_tau = 1.0 / 6400;
  long n_samples = 100;
  double viscosity = 1.0;
  GSpec g;
  bool dealias = true;
  SchemeMode mode = SchemeMode::nonlinear;
  int noise_modes = 4;
  double epsilon = 1e-4;
  std::uint64_t seed = 1;
  int threads = 0;

  static AccuracyConfig paper_scale() {
    AccuracyConfig c;
    c.modes = 40;
    c.n_samples = 300;
    c.taus = {1.0 / 200, 1.0 / 400, 1.0 / 800, 1.0 / 1600, 1.0 / 3200};
    c.reference_tau = 1.0 / 12800;
    return c;
  }

  Grid grid() const { return grid_for_modes(modes, BoundaryMode::dirichlet); }
  NoiseSpec noise() const { return {noise_modes, epsilon, grid().n, BoundaryMode::dirichlet}; }
};

/// Integer ratio a/b, or ConfigError naming `field`.
inline long exact_ratio(double a, double b, const std::string& what, const std::string& field) {
  const double r = a / b;
  const long k = std::lround(r);
  if (k < 1 || std::abs(r - k) > 1e-9 * std::max(1.0, r))
    throw ConfigError(what + " (ratio " + std::to_string(r) + " is not a positive integer)", field);
  return k;
}

inline void validate(const AccuracyConfig& c) {
  if (c.n_samples < 1) throw ConfigError("n_samples must be at least 1", "study.n_samples");
  if (!(c.T > 0.0)) throw ConfigError("T must be positive", "study.T");
  if (!(c.reference_tau > 0.0)) throw ConfigError("reference_tau must be positive", "study.reference_tau");
  if (c.taus.empty()) throw ConfigError("tau_list is empty", "study.tau_list");
  exact_ratio(c.T, c.reference_tau, "reference_tau must divide T", "study.reference_tau");
  for (double t : c.taus) exact_ratio(t, c.reference_tau, "reference_tau must divide every tau", "study.tau_list");
  for (double t : c.taus) exact_ratio(c.T, t, "every tau must divide T", "study.tau_list");
  if (!(c.viscosity > 0.0)) throw ConfigError("viscosity must be positive", "scheme.viscosity");
  validate(c.noise());
}

/// Per-tau ensemble results.
struct TauStats {
  double tau = 0.0;
  double e_u = 0.0;
  double e_p = 0.0;
  double order_u = std::numeric_limits<double>::quiet_NaN();  // vs previous row
  double order_p = std::numeric_limits<double>::quiet_NaN();
  double mean_xi = 0.0, std_xi = 0.0;
  double mean_eta = 0.0, std_eta = 0.0;
  double mean_u2 = 0.0;  // E ||u(T)||^2
  double mean_u4 = 0.0;  // E ||u(T)||^4
  double max_u2 = 0.0;   // max over paths and steps of ||u^n||^2
  std::vector<double> xi_samples, eta_samples;
};

struct ErrorReport {
  std::vector<TauStats> rows;
  double fitted_order_u = std::numeric_limits<double>::quiet_NaN();  // least squares
  double fitted_order_p = std::numeric_limits<double>::quiet_NaN();
};

/// Pairwise log ratios into rows, least-squares slopes into the report.
inline void fit_orders(ErrorReport& r) {
  auto& rows = r.rows;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double lt = std::log(rows[i - 1].tau / rows[i].tau);
    rows[i].order_u = std::log(rows[i - 1].e_u / rows[i].e_u) / lt;
    rows[i].order_p = std::log(rows[i - 1].e_p / rows[i].e_p) / lt;
  }
  auto slope = [&](auto get) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& row : rows) {
      const double e = get(row);
      if (!(e > 0.0)) continue;
      const double x = std::log(row.tau), y = std::log(e);
      sx += x, sy += y, sxx += x * x, sxy += x * y, ++n;
    }
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  r.fitted_order_u = slope([](const TauStats& s) { return s.e_u; });
  r.fitted_order_p = slope([](const TauStats& s) { return s.e_p; });
}

struct PathRun {
  SchemeState final;
  ScalarField p_sum;  // sum_{k>=1} p^k
  double max_u2 = 0.0;
};

/// Integrates one path over `steps` steps of cfg.tau. Step m uses the
/// aggregate of fine increments [m*level, (m+1)*level) of `table`, or no
/// noise when `table` is null.
inline PathRun run_path(SchemeState s, const NoiseBasis& nb, const BrownianTable* table, long level, long steps,
                        const SchemeConfig& cfg, long path_index = -1) {
  PathRun r;
  r.p_sum = ScalarField(s.p.grid, s.p.basis);
  r.max_u2 = inner_product(s.u, s.u);
  const VectorField zero = zero_momentum(s.u.grid());
  for (long m = 0; m < steps; ++m) {
    const VectorField dW = table ? field_from_increments(nb, aggregate_increment(*table, level, m)) : zero;
    try {
      s = advance(s, dW, cfg).state;
    } catch (const BlowUpError& e) {
      throw BlowUpError(std::string(e.what()) + " (path " + std::to_string(path_index) + ", tau " +
                            std::to_string(cfg.tau) + ")",
                        e.step_index(), path_index);
    }
    axpy(1.0, s.p, r.p_sum);
    r.max_u2 = std::max(r.max_u2, inner_product(s.u, s.u));
  }
  r.final = std::move(s);
  return r;
}

inline SchemeConfig scheme_config(const AccuracyConfig& c, double tau) {
  SchemeConfig s;
  s.tau = tau;
  s.viscosity = c.viscosity;
  s.g = c.g;
  s.dealias = c.dealias;
  s.mode = c.mode;
  s.diagnostics = false;
  if (c.mode == SchemeMode::linearized) {
    const VectorField v = steady_advector(c.grid());
    s.advector = [v](double) { return v; };
  }
  return s;
}

namespace harness_detail {

inline void mean_std(const std::vector<double>& x, double& mean, double& sd) {
  mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  sd = x.size() > 1 ? std::sqrt(ss / static_cast<double>(x.size() - 1)) : 0.0;
}

struct PathTau {
  double err_u2 = 0.0, err_p2 = 0.0;
  double xi = 1.0, eta = 1.0, u2 = 0.0, max_u2 = 0.0;
};

inline void fill_stats(TauStats& row, const std::vector<PathTau>& per_path, bool with_errors) {
  const double n = static_cast<double>(per_path.size());
  double su = 0, sp = 0, m2 = 0, m4 = 0, mx = 0;
  row.xi_samples.clear();
  row.eta_samples.clear();
  for (const auto& p : per_path) {
    su += p.err_u2;
    sp += p.err_p2;
    m2 += p.u2;
    m4 += p.u2 * p.u2;
    mx = std::max(mx, p.max_u2);
    row.xi_samples.push_back(p.xi);
    row.eta_samples.push_back(p.eta);
  }
  if (with_errors) {
    row.e_u = std::sqrt(su / n);
    row.e_p = std::sqrt(sp / n);
  }
  row.mean_u2 = m2 / n;
  row.mean_u4 = m4 / n;
  row.max_u2 = mx;
  mean_std(row.xi_samples, row.mean_xi, row.std_xi);
  mean_std(row.eta_samples, row.mean_eta, row.std_eta);
}

}  // namespace harness_detail

/// Coupled strong-error study. Every path owns one Brownian table at the
/// reference step; the reference and each coarse run consume its exact
/// aggregates, and
///   e_u = sqrt(mean ||u_ref(T) - u(T)||^2),
///   e_p = sqrt(mean ||tau0 sum_{k>=1} p_ref^k - tau sum_{k>=1} p^k||^2).
inline ErrorReport run_accuracy_study(const AccuracyConfig& c) {
  validate(c);
  const Grid g = c.grid();
  const NoiseBasis nb = build_noise_basis(c.noise());
  const long n_ref = exact_ratio(c.T, c.reference_tau, "reference_tau must divide T", "study.reference_tau");
  const SchemeState s0 = make_initial_state(accuracy_initial_velocity(g));
  const std::size_t nt = c.taus.size();

  std::vector<std::vector<harness_detail::PathTau>> res(nt, std::vector<harness_detail::PathTau>(c.n_samples));
  parallel_for(c.n_samples, c.threads, [&](long path) {
    const BrownianTable table =
        make_brownian_table(nb, n_ref, c.reference_tau, c.seed, static_cast<std::uint64_t>(path));
    const PathRun ref = run_path(s0, nb, &table, 1, n_ref, scheme_config(c, c.reference_tau), path);
    const ScalarField ref_int = c.reference_tau * ref.p_sum;
    for (std::size_t i = 0; i < nt; ++i) {
      const double tau = c.taus[i];
      const long level = exact_ratio(tau, c.reference_tau, "", "study.tau_list");
      const PathRun run = run_path(s0, nb, &table, level, n_ref / level, scheme_config(c, tau), path);
      auto& out = res[i][path];
      const VectorField du = ref.final.u - run.final.u;
      const ScalarField dp = ref_int - tau * run.p_sum;
      out.err_u2 = inner_product(du, du);
      out.err_p2 = inner_product(dp, dp);
      out.xi = run.final.xi;
      out.eta = run.final.eta;
      out.u2 = inner_product(run.final.u, run.final.u);
      out.max_u2 = run.max_u2;
    }
  });

  ErrorReport r;
  for (std::size_t i = 0; i < nt; ++i) {
    TauStats row;
    row.tau = c.taus[i];
    harness_detail::fill_stats(row, res[i], true);
    r.rows.push_back(std::move(row));
  }
  fit_orders(r);
  return r;
}

/// Auxiliary-variable and moment statistics per tau, without a reference.
/// Path p at every tau consumes the increments of one table at the
/// smallest tau of the list.
inline ErrorReport run_moment_monitor(const AccuracyConfig& c, bool noise = true) {
  AccuracyConfig cc = c;
  double finest = c.taus.empty() ? c.reference_tau : c.taus.front();
  for (double t : c.taus) finest = std::min(finest, t);
  cc.reference_tau = finest;
  validate(cc);
  const Grid g = cc.grid();
  const NoiseBasis nb = build_noise_basis(cc.noise());
  const long n_fine = exact_ratio(cc.T, finest, "the smallest tau must divide T", "study.tau_list");
  const SchemeState s0 = make_initial_state(accuracy_initial_velocity(g));
  const std::size_t nt = cc.taus.size();
  std::vector<std::vector<harness_detail::PathTau>> res(nt, std::vector<harness_detail::PathTau>(cc.n_samples));
  parallel_for(cc.n_samples, cc.threads, [&](long path) {
    BrownianTable table;
    if (noise) table = make_brownian_table(nb, n_fine, finest, cc.seed, static_cast<std::uint64_t>(path));
    for (std::size_t i = 0; i < nt; ++i) {
      const long level = exact_ratio(cc.taus[i], finest, "", "study.tau_list");
      const PathRun run =
          run_path(s0, nb, noise ? &table : nullptr, level, n_fine / level, scheme_config(cc, cc.taus[i]), path);
      auto& out = res[i][path];
      out.xi = run.final.xi;
      out.eta = run.final.eta;
      out.u2 = inner_product(run.final.u, run.final.u);
      out.max_u2 = run.max_u2;
    }
  });
  ErrorReport r;
  for (std::size_t i = 0; i < nt; ++i) {
    TauStats row;
    row.tau = cc.taus[i];
    harness_detail::fill_stats(row, res[i], false);
    r.rows.push_back(std::move(row));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Shear layer

struct ShearConfig {
  int modes = 128;
  double viscosity = 1e-4;
  double epsilon = 1e-3;
  int noise_modes = 4;
  double tau = 1e-3;
  GSpec g{GKind::constant, 0.1};
  long n_samples = 30;
  std::vector<double> times{0.0, 0.4, 0.8, 1.2};
  bool dealias = true;
  bool stochastic = true;
  std::uint64_t seed = 1;
  int threads = 0;

  Grid grid() const { return grid_for_modes(modes, BoundaryMode::periodic); }
  NoiseSpec noise() const { return {noise_modes, epsilon, grid().n, BoundaryMode::periodic}; }
};

inline void validate(const ShearConfig& c) {
  if (!(c.tau > 0.0)) throw ConfigError("tau must be positive", "shear_layer.tau");
  if (!(c.viscosity > 0.0)) throw ConfigError("viscosity must be positive", "shear_layer.viscosity");
  if (c.stochastic && c.n_samples < 1) throw ConfigError("n_samples must be at least 1", "shear_layer.n_samples");
  if (c.times.empty()) throw ConfigError("no snapshot times", "shear_layer.times");
  for (double t : c.times) {
    if (t < 0.0) throw ConfigError("snapshot times must be non-negative", "shear_layer.times");
    if (t > 0.0) exact_ratio(t, c.tau, "tau must divide every snapshot time", "shear_layer.times");
  }
  validate(c.noise());
}

struct ShearResult {
  Grid grid;
  std::vector<double> times;
  std::vector<ScalarField> deterministic;     // vorticity per time
  std::vector<ScalarField> stochastic_mean;   // empty when not run
  std::vector<double> circulation;            // deterministic, per time
  double max_divergence = 0.0;                // deterministic, over snapshots
  long realizations = 0;
};

namespace harness_detail {

/// Vorticity snapshots of one shear-layer path; path < 0 runs noise-free.
inline std::vector<ScalarField> shear_path(const ShearConfig& c, const NoiseBasis& nb, long path,
                                           double* max_div = nullptr) {
  const Grid g = c.grid();
  SchemeConfig sc;
  sc.tau = c.tau;
  sc.viscosity = c.viscosity;
  sc.g = c.g;
  sc.dealias = c.dealias;
  sc.diagnostics = false;
  SchemeState s = make_initial_state(shear_layer_initial_velocity(g));
  const NormalStream rng(c.seed, static_cast<std::uint64_t>(std::max(0L, path)));
  const VectorField zero = zero_momentum(g);
  std::vector<ScalarField> snaps;
  for (double t : c.times) {
    const long target = t > 0.0 ? std::lround(t / c.tau) : 0;
    while (s.step_index < target) {
      const VectorField dW =
          path >= 0 ? sample_increment(nb, c.tau, rng, static_cast<std::uint64_t>(s.step_index)) : zero;
      try {
        s = step(s, dW, sc).state;
      } catch (const BlowUpError& e) {
        throw BlowUpError(std::string("shear layer: ") + e.what() + " (path " + std::to_string(path) + ")",
                          e.step_index(), path);
      }
    }
    if (max_div) *max_div = std::max(*max_div, divergence(s.u).max_abs());
    snaps.push_back(vorticity(s.u));
  }
  return snaps;
}

}  // namespace harness_detail

/// Deterministic run plus the mean vorticity of n_samples realizations
/// driven by the constant multiplier g.
inline ShearResult run_shear_layer(const ShearConfig& c) {
  validate(c);
  ShearResult r;
  r.grid = c.grid();
  r.times = c.times;
  const NoiseBasis nb = build_noise_basis(c.noise());
  r.deterministic = harness_detail::shear_path(c, nb, -1, &r.max_divergence);
  for (const auto& w : r.deterministic) {
    ScalarField one(w.grid, w.basis);
    for (double& x : one.v) x = 1.0;
    r.circulation.push_back(inner_product(w, one));
  }
  if (!c.stochastic) return r;
  std::vector<std::vector<ScalarField>> paths(c.n_samples);
  parallel_for(c.n_samples, c.threads, [&](long p) { paths[p] = harness_detail::shear_path(c, nb, p); });
  for (std::size_t k = 0; k < c.times.size(); ++k) {
    ScalarField mean(r.grid, kFourier);
    for (const auto& snaps : paths) axpy(1.0, snaps[k], mean);
    r.stochastic_mean.push_back((1.0 / static_cast<double>(c.n_samples)) * mean);
  }
  r.realizations = c.n_samples;
  return r;
}

// ---------------------------------------------------------------------------
// Deterministic Taylor-Green check

struct TaylorGreenRow {
  double tau = 0.0;
  double error = 0.0;  // ||u(T) - u_exact(T)||
  double order = std::numeric_limits<double>::quiet_NaN();
};

inline std::vector<TaylorGreenRow> run_taylor_green(const std::vector<double>& taus, double T, double nu, int n = 16,
                                                    bool dealias = true) {
  const Grid g{n, BoundaryMode::periodic};
  const VectorField exact = taylor_green_velocity(g, nu, T);
  std::vector<TaylorGreenRow> rows;
  for (double tau : taus) {
    SchemeConfig cfg;
    cfg.tau = tau;
    cfg.viscosity = nu;
    cfg.dealias = dealias;
    cfg.diagnostics = false;
    SchemeState s = make_initial_state(taylor_green_velocity(g, nu, 0.0));
    const long steps = exact_ratio(T, tau, "tau must divide T", "tau");
    const VectorField zero = zero_momentum(g);
    for (long k = 0; k < steps; ++k) s = step(s, zero, cfg).state;
    TaylorGreenRow row;
    row.tau = tau;
    row.error = l2_norm(s.u - exact);
    if (!rows.empty()) row.order = std::log(rows.back().error / row.error) / std::log(rows.back().tau / tau);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace tavns
