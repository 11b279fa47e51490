#pragma once

// Overdamped Langevin dX = -grad V(X) dt + sqrt(2) dB with the double well
// V(x) = (x^2 - 1)^2 / 4, integrated by the one- and two-auxiliary-variable
// methods. With a = tau grad V(X^n) and b = sqrt(2) dB^n:
//
//   OAV:  xi' (1 + a^2) = xi + a^2 + a b,               X' = X - a xi' + b
//   TAV:  [1 + a^2   -a b  ] [xi' ]   [xi  + a^2]
//         [ -a b   1 + b^2 ] [eta'] = [eta + b^2],      X' = X - a xi' + b eta'
//
// The TAV determinant is 1 + a^2 + b^2.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tavns/errors.hpp"
#include "tavns/parallel.hpp"
#include "tavns/rng.hpp"

namespace tavns {

inline double potential(double x) {
  const double s = x * x - 1.0;
  return 0.25 * s * s;
}

inline double grad_v(double x) { return x * x * x - x; }

struct LangevinState {
  double x = 0.0;
  double xi = 1.0;
  double eta = 1.0;
};

inline LangevinState oav_step(const LangevinState& s, double dB, double tau) {
  const double a = tau * grad_v(s.x);
  const double b = std::sqrt(2.0) * dB;
  LangevinState n;
  n.xi = (s.xi + a * a + a * b) / (1.0 + a * a);
  n.eta = s.eta;
  n.x = s.x - a * n.xi + b;
  return n;
}

inline LangevinState tav_step(const LangevinState& s, double dB, double tau) {
  const double a = tau * grad_v(s.x);
  const double b = std::sqrt(2.0) * dB;
  const double r1 = s.xi + a * a;
  const double r2 = s.eta + b * b;
  const double det = 1.0 + a * a + b * b;
  LangevinState n;
  n.xi = ((1.0 + b * b) * r1 + a * b * r2) / det;
  n.eta = ((1.0 + a * a) * r2 + a * b * r1) / det;
  n.x = s.x - a * n.xi + b * n.eta;
  return n;
}

enum class LangevinMethod { oav, tav };

inline std::string to_string(LangevinMethod m) { return m == LangevinMethod::oav ? "oav" : "tav"; }

struct LangevinConfig {
  double T = 20.0;
  double tau = 0.1;
  long n_paths = 50000;
  double x0_scale = 10.0;
  double x0_clip = 50.0;
  double range = 3.0;  // histogram support [-range, range]
  int n_bins = 120;
  int threads = 0;

  long steps() const { return std::lround(T / tau); }
};

inline void validate(const LangevinConfig& c) {
  if (!(c.T > 0.0)) throw ConfigError("horizon must be positive", "langevin.T");
  if (!(c.tau > 0.0)) throw ConfigError("tau must be positive", "langevin.tau");
  const double r = c.T / c.tau;
  if (std::abs(r - std::round(r)) > 1e-9 * r) throw ConfigError("tau must divide T", "langevin.tau");
  if (c.n_paths < 1) throw ConfigError("at least one path required", "langevin.n_paths");
  if (!(c.range > 0.0)) throw ConfigError("histogram range must be positive", "langevin.range");
  if (c.n_bins < 1) throw ConfigError("at least one bin required", "langevin.n_bins");
}

/// Density values at the centers of n_bins equal bins on [lo, hi].
struct Density {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> values;

  int bins() const noexcept { return static_cast<int>(values.size()); }
  double dx() const noexcept { return (hi - lo) / bins(); }
  double center(int i) const noexcept { return lo + (i + 0.5) * dx(); }
};

/// exp(-V) at bin centers of [-R, R], scaled so that sum * dx = 1.
inline Density reference_density(double R, int n_bins) {
  if (!(R > 0.0) || n_bins < 1) throw ConfigError("reference density needs R > 0 and at least one bin");
  Density d{-R, R, std::vector<double>(n_bins)};
  double mass = 0.0;
  for (int i = 0; i < n_bins; ++i) {
    // symmetric centers: evaluate at |x| so d(x) == d(-x) bit for bit
    d.values[i] = std::exp(-potential(std::abs(d.center(i))));
    mass += d.values[i];
  }
  mass *= d.dx();
  for (double& v : d.values) v /= mass;
  return d;
}

/// sum_{p > 0} p log(p / max(q, 1e-12)) dx.
inline double kl_divergence(const Density& p, const Density& q) {
  if (p.bins() != q.bins() || p.lo != q.lo || p.hi != q.hi) throw UsageError("kl_divergence: mismatched binning");
  double s = 0.0;
  for (int i = 0; i < p.bins(); ++i) {
    if (p.values[i] <= 0.0) continue;
    s += p.values[i] * std::log(p.values[i] / std::max(q.values[i], 1e-12));
  }
  return s * p.dx();
}

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<long> counts;
  long outside = 0;  // finite samples off the support

  int bins() const noexcept { return static_cast<int>(counts.size()); }
  double dx() const noexcept { return (hi - lo) / bins(); }
  double center(int i) const noexcept { return lo + (i + 0.5) * dx(); }
  long in_range() const noexcept {
    long s = 0;
    for (long c : counts) s += c;
    return s;
  }

  void add(double x) {
    if (!(x >= lo && x < hi)) {
      ++outside;
      return;
    }
    const int i = std::min(bins() - 1, static_cast<int>((x - lo) / dx()));
    ++counts[i];
  }

  /// count / (finite samples * dx); mass off the support is not renormalized away.
  Density density() const {
    Density d{lo, hi, std::vector<double>(counts.size(), 0.0)};
    const long total = in_range() + outside;
    if (total == 0) return d;
    for (int i = 0; i < bins(); ++i) d.values[i] = static_cast<double>(counts[i]) / (total * dx());
    return d;
  }
};

struct LangevinResult {
  LangevinMethod method = LangevinMethod::tav;
  double tau = 0.0;
  double kl = 0.0;
  Histogram histogram;
  long blown_up = 0;            // paths with a non-finite X before T
  long first_blown_path = -1;
  long first_blown_step = -1;
};

/// Initial state of path `path`: x0 = x0_scale * N(0,1) clipped, xi = eta = 1.
inline double langevin_x0(const LangevinConfig& c, std::uint64_t seed, long path) {
  const NormalStream rng(seed, static_cast<std::uint64_t>(path));
  return std::clamp(c.x0_scale * rng(0), -c.x0_clip, c.x0_clip);
}

/// Simulates n_paths trajectories to T. Path p draws x0 from counter 0 and
/// dB of step k from counter k + 1 of stream p, so OAV and TAV runs with
/// the same seed share their noise.
inline LangevinResult run_langevin_study(const LangevinConfig& c, LangevinMethod method, std::uint64_t seed) {
  validate(c);
  const long steps = c.steps();
  const double sq = std::sqrt(c.tau);
  struct PathOut {
    double x;
    long blown_step;
  };
  std::vector<PathOut> out(c.n_paths);
  parallel_for(c.n_paths, c.threads, [&](long p) {
    const NormalStream rng(seed, static_cast<std::uint64_t>(p));
    LangevinState s;
    s.x = langevin_x0(c, seed, p);
    long blown = -1;
    for (long k = 0; k < steps; ++k) {
      const double dB = sq * rng(static_cast<std::uint64_t>(k) + 1);
      s = method == LangevinMethod::oav ? oav_step(s, dB, c.tau) : tav_step(s, dB, c.tau);
      if (!std::isfinite(s.x)) {
        blown = k + 1;
        break;
      }
    }
    out[p] = {s.x, blown};
  });

  LangevinResult r;
  r.method = method;
  r.tau = c.tau;
  r.histogram = Histogram{-c.range, c.range, std::vector<long>(c.n_bins, 0), 0};
  for (long p = 0; p < c.n_paths; ++p) {
    if (out[p].blown_step >= 0) {
      if (r.blown_up++ == 0) {
        r.first_blown_path = p;
        r.first_blown_step = out[p].blown_step;
      }
      continue;
    }
    r.histogram.add(out[p].x);
  }
  r.kl = kl_divergence(r.histogram.density(), reference_density(c.range, c.n_bins));
  return r;
}

}  // namespace tavns
