#pragma once

// Truncated Q-Wiener process
//
//   W(t, x) = sum_{j1,j2=1..J} sigma_{j1 j2} e_{j1 j2}(x) beta_{j1 j2}(t),
//   sigma_{j1 j2} = (j1 + j2)^{-(1 + eps/2)},
//   e_{j1 j2}(x) = (s, s),  s = sin(j1 pi x) sin(j2 pi y).
//
// Mode m = (j1-1)*J + (j2-1). Draws are keyed on (seed, stream, counter) with
// counter = step*J^2 + m, so a path's increments never depend on scheduling.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "tavns/errors.hpp"
#include "tavns/field.hpp"
#include "tavns/rng.hpp"

namespace tavns {

struct NoiseSpec {
  int modes_per_dim = 4;  // J
  double epsilon = 1e-4;
  int grid_size = 48;     // n of the solver grid
  BoundaryMode boundary_mode = BoundaryMode::dirichlet;

  int mode_count() const noexcept { return modes_per_dim * modes_per_dim; }
  Grid grid() const noexcept { return Grid{grid_size, boundary_mode}; }
};

inline void validate(const NoiseSpec& s) {
  if (s.modes_per_dim < 1) throw ConfigError("noise needs at least one mode per dimension", "noise.modes_per_dim");
  if (!(s.epsilon > 0.0) || !std::isfinite(s.epsilon))
    throw ConfigError("noise epsilon must be positive", "noise.epsilon");
  if (s.grid_size < 4) throw ConfigError("grid size must be at least 4", "noise.grid_size");
}

inline double noise_amplitude(int j1, int j2, double epsilon) {
  return std::pow(static_cast<double>(j1 + j2), -(1.0 + 0.5 * epsilon));
}

struct NoiseBasis {
  NoiseSpec spec;
  Grid grid;
  std::vector<ScalarField> shapes;  // scalar factor s of e = (s, s)
  std::vector<double> amplitudes;

  int size() const noexcept { return static_cast<int>(amplitudes.size()); }
  /// Both components of e_m carry the same scalar shape.
  VectorField mode_shape(int m) const { return {shapes.at(m), shapes.at(m)}; }
};

inline NoiseBasis build_noise_basis(const NoiseSpec& spec) {
  validate(spec);
  NoiseBasis nb;
  nb.spec = spec;
  nb.grid = spec.grid();
  const Basis tag = spec.boundary_mode == BoundaryMode::dirichlet ? kSineSine : kFourier;
  const int J = spec.modes_per_dim;
  const double pi = std::numbers::pi;
  for (int j1 = 1; j1 <= J; ++j1) {
    for (int j2 = 1; j2 <= J; ++j2) {
      nb.shapes.push_back(ScalarField::sample(nb.grid, tag, [&](double x, double y) {
        return std::sin(j1 * pi * x) * std::sin(j2 * pi * y);
      }));
      nb.amplitudes.push_back(noise_amplitude(j1, j2, spec.epsilon));
    }
  }
  return nb;
}

/// sum_m sigma_m e_m dB_m for per-mode Brownian increments dB.
inline VectorField field_from_increments(const NoiseBasis& nb, std::span<const double> dB) {
  if (static_cast<int>(dB.size()) != nb.size()) throw UsageError("increment count does not match the noise basis");
  ScalarField s(nb.grid, nb.grid.mode == BoundaryMode::dirichlet ? kSineSine : kFourier);
  for (int m = 0; m < nb.size(); ++m) {
    const double c = nb.amplitudes[m] * dB[m];
    if (c == 0.0) continue;
    const auto& e = nb.shapes[m].v;
    for (std::size_t k = 0; k < s.v.size(); ++k) s.v[k] += c * e[k];
  }
  return {s, s};
}

/// Per-mode increments sqrt(dt)*N(0,1) for one draw index.
inline std::vector<double> sample_mode_increments(const NoiseBasis& nb, double dt, const NormalStream& rng,
                                                  std::uint64_t draw_index) {
  if (!(dt > 0.0)) throw UsageError("sample_increment: dt must be positive");
  const auto M = static_cast<std::uint64_t>(nb.size());
  const double sq = std::sqrt(dt);
  std::vector<double> dB(M);
  for (std::uint64_t m = 0; m < M; ++m) dB[m] = sq * rng(draw_index * M + m);
  return dB;
}

inline VectorField sample_increment(const NoiseBasis& nb, double dt, const NormalStream& rng,
                                    std::uint64_t draw_index) {
  return field_from_increments(nb, sample_mode_increments(nb, dt, rng, draw_index));
}

/// Fine-level per-mode increments of one sample path.
struct BrownianTable {
  long n_fine = 0;
  double dt_fine = 0.0;
  int n_modes = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::vector<double> increments;  // [step * n_modes + mode]

  double increment(long step, int mode) const {
    return increments[static_cast<std::size_t>(step) * n_modes + mode];
  }
};

inline BrownianTable make_brownian_table(const NoiseBasis& nb, long n_fine, double dt_fine, std::uint64_t seed,
                                         std::uint64_t stream = 0) {
  if (n_fine < 1) throw ConfigError("brownian table needs at least one step", "n_fine");
  if (!(dt_fine > 0.0)) throw ConfigError("fine step must be positive", "dt_fine");
  BrownianTable t;
  t.n_fine = n_fine;
  t.dt_fine = dt_fine;
  t.n_modes = nb.size();
  t.seed = seed;
  t.stream = stream;
  t.increments.resize(static_cast<std::size_t>(n_fine) * t.n_modes);
  const NormalStream rng(seed, stream);
  const double sq = std::sqrt(dt_fine);
  for (std::size_t k = 0; k < t.increments.size(); ++k) t.increments[k] = sq * rng(k);
  return t;
}

/// Per-mode increment over fine steps [m*k, (m+1)*k), summed left to right.
inline std::vector<double> aggregate_increment(const BrownianTable& t, long k, long m) {
  if (k < 1 || t.n_fine % k != 0)
    throw ConfigError("level factor " + std::to_string(k) + " does not divide " + std::to_string(t.n_fine) +
                          " fine steps",
                      "level_factor");
  if (m < 0 || m >= t.n_fine / k) throw UsageError("coarse step index out of range");
  std::vector<double> dB(t.n_modes, 0.0);
  for (long s = m * k; s < (m + 1) * k; ++s)
    for (int q = 0; q < t.n_modes; ++q) dB[q] += t.increment(s, q);
  return dB;
}

}  // namespace tavns
