#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tavns/errors.hpp"

namespace tavns {

enum class BoundaryMode { dirichlet, periodic };

/// Expansion family along one direction.
///
/// Dirichlet grids use sin(a*pi*x), a = 1..n-1 (vanishes at x = 0, 1) or
/// cos(a*pi*x), a = 0..n (zero normal derivative). Periodic grids use
/// exp(2*pi*i*k*x).
enum class BasisKind { fourier, sine, cosine };

inline std::string to_string(BoundaryMode m) {
  return m == BoundaryMode::dirichlet ? "dirichlet" : "periodic";
}

inline std::string to_string(BasisKind k) {
  switch (k) {
    case BasisKind::fourier: return "fourier";
    case BasisKind::sine: return "sine";
    case BasisKind::cosine: return "cosine";
  }
  return "?";
}

/// Uniform grid on [0,1]^2.
///
/// Dirichlet: n intervals, nodes x_i = i/n for i = 0..n (boundary included).
/// Periodic: n nodes x_i = i/n for i = 0..n-1.
struct Grid {
  int n = 0;
  BoundaryMode mode = BoundaryMode::dirichlet;

  int nodes() const noexcept { return mode == BoundaryMode::dirichlet ? n + 1 : n; }
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(nodes()) * static_cast<std::size_t>(nodes());
  }
  double h() const noexcept { return 1.0 / n; }
  double coord(int i) const noexcept { return static_cast<double>(i) / n; }

  /// Highest retained mode index of the 2/3 dealiasing filter: sine/cosine
  /// index a <= cutoff (dirichlet), |k| <= cutoff (periodic).
  int dealias_cutoff() const noexcept {
    return mode == BoundaryMode::dirichlet ? (2 * n) / 3 : n / 3;
  }

  friend bool operator==(const Grid&, const Grid&) = default;
};

/// Smallest transform-friendly grid (2^p or 3*2^p) holding `modes` modes per
/// direction after 2/3 dealiasing.
inline Grid grid_for_modes(int modes, BoundaryMode mode) {
  if (modes < 4) throw ConfigError("at least 4 modes per direction required", "grid.modes");
  const int need = (3 * modes + 1) / 2;
  // Candidates 8, 12, 16, 24, 32, 48, ...
  for (int p = 8;; p *= 2) {
    if (p >= need) return Grid{p, mode};
    if (p + p / 2 >= need) return Grid{p + p / 2, mode};
  }
}

struct Basis {
  BasisKind x = BasisKind::fourier;
  BasisKind y = BasisKind::fourier;
  friend bool operator==(const Basis&, const Basis&) = default;
};

inline constexpr Basis kFourier{BasisKind::fourier, BasisKind::fourier};
inline constexpr Basis kSineSine{BasisKind::sine, BasisKind::sine};
inline constexpr Basis kCosCos{BasisKind::cosine, BasisKind::cosine};
/// Slots of a divergence-free velocity with u.n = 0 on a dirichlet grid.
inline constexpr Basis kVelocityX{BasisKind::sine, BasisKind::cosine};
inline constexpr Basis kVelocityY{BasisKind::cosine, BasisKind::sine};

inline void check_basis(const Grid& g, Basis b) {
  const bool periodic = g.mode == BoundaryMode::periodic;
  for (BasisKind k : {b.x, b.y}) {
    if (periodic != (k == BasisKind::fourier))
      throw UsageError("basis " + to_string(k) + " is not available on a " +
                       to_string(g.mode) + " grid");
  }
}

/// Grid values of a scalar, tagged with the basis that interprets them.
/// Sine directions hold exact zeros on their boundary nodes.
struct ScalarField {
  Grid grid;
  Basis basis;
  std::vector<double> v;

  ScalarField() = default;
  ScalarField(Grid g, Basis b) : grid(g), basis(b), v(g.size(), 0.0) { check_basis(g, b); }

  double& operator()(int i, int j) noexcept { return v[static_cast<std::size_t>(j) * grid.nodes() + i]; }
  double operator()(int i, int j) const noexcept {
    return v[static_cast<std::size_t>(j) * grid.nodes() + i];
  }

  template <class F>
  static ScalarField sample(Grid g, Basis b, F&& f) {
    ScalarField out(g, b);
    const int m = g.nodes();
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) out(i, j) = f(g.coord(i), g.coord(j));
    out.enforce_basis();
    return out;
  }

  /// Zero boundary nodes along sine directions.
  void enforce_basis() noexcept {
    if (grid.mode != BoundaryMode::dirichlet) return;
    const int n = grid.n;
    if (basis.x == BasisKind::sine)
      for (int j = 0; j <= n; ++j) (*this)(0, j) = (*this)(n, j) = 0.0;
    if (basis.y == BasisKind::sine)
      for (int i = 0; i <= n; ++i) (*this)(i, 0) = (*this)(i, n) = 0.0;
  }

  /// Same grid values read in another basis. Switching a direction to sine
  /// discards that direction's boundary values.
  ScalarField retag(Basis b) const {
    ScalarField out = *this;
    check_basis(grid, b);
    out.basis = b;
    out.enforce_basis();
    return out;
  }

  double max_abs() const noexcept {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }

  bool all_finite() const noexcept {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  }
};

/// The basis covering both inputs' grid values: cosine absorbs sine.
inline BasisKind widen(BasisKind a, BasisKind b) noexcept {
  return a == b ? a : (a == BasisKind::fourier ? a : BasisKind::cosine);
}
inline Basis widen(Basis a, Basis b) noexcept { return {widen(a.x, b.x), widen(a.y, b.y)}; }

/// Pointwise products vanish wherever either factor does.
inline BasisKind narrow(BasisKind a, BasisKind b) noexcept {
  return (a == BasisKind::sine || b == BasisKind::sine) ? BasisKind::sine : a;
}
inline Basis product_basis(Basis a, Basis b) noexcept { return {narrow(a.x, b.x), narrow(a.y, b.y)}; }

inline void check_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw UsageError("fields live on different grids");
}

/// y <- y + alpha*x; the result basis widens to cover both.
inline void axpy(double alpha, const ScalarField& x, ScalarField& y) {
  check_same_grid(x.grid, y.grid);
  y.basis = widen(x.basis, y.basis);
  for (std::size_t k = 0; k < y.v.size(); ++k) y.v[k] += alpha * x.v[k];
}

inline ScalarField operator+(ScalarField a, const ScalarField& b) { axpy(1.0, b, a); return a; }
inline ScalarField operator-(ScalarField a, const ScalarField& b) { axpy(-1.0, b, a); return a; }
inline ScalarField operator*(double s, ScalarField a) {
  for (double& x : a.v) x *= s;
  return a;
}

inline ScalarField pointwise_product(const ScalarField& a, const ScalarField& b) {
  check_same_grid(a.grid, b.grid);
  ScalarField out(a.grid, product_basis(a.basis, b.basis));
  for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] = a.v[k] * b.v[k];
  out.enforce_basis();
  return out;
}

struct VectorField {
  ScalarField x;
  ScalarField y;

  VectorField() = default;
  VectorField(ScalarField cx, ScalarField cy) : x(std::move(cx)), y(std::move(cy)) {
    check_same_grid(x.grid, y.grid);
  }
  VectorField(Grid g, Basis bx, Basis by) : x(g, bx), y(g, by) {}

  const Grid& grid() const noexcept { return x.grid; }
  double max_abs() const noexcept { return std::max(x.max_abs(), y.max_abs()); }
  bool all_finite() const noexcept { return x.all_finite() && y.all_finite(); }
  VectorField retag(Basis bx, Basis by) const { return {x.retag(bx), y.retag(by)}; }

  template <class F>
  static VectorField sample(Grid g, Basis bx, Basis by, F&& f) {
    return {ScalarField::sample(g, bx, [&](double s, double t) { return f(s, t)[0]; }),
            ScalarField::sample(g, by, [&](double s, double t) { return f(s, t)[1]; })};
  }
};

inline void axpy(double alpha, const VectorField& x, VectorField& y) {
  axpy(alpha, x.x, y.x);
  axpy(alpha, x.y, y.y);
}
inline VectorField operator+(VectorField a, const VectorField& b) { axpy(1.0, b, a); return a; }
inline VectorField operator-(VectorField a, const VectorField& b) { axpy(-1.0, b, a); return a; }
inline VectorField operator*(double s, VectorField a) {
  a.x = s * std::move(a.x);
  a.y = s * std::move(a.y);
  return a;
}

/// Zero field in the natural velocity slots of `g`.
inline VectorField zero_velocity(const Grid& g) {
  return g.mode == BoundaryMode::dirichlet ? VectorField(g, kVelocityX, kVelocityY)
                                           : VectorField(g, kFourier, kFourier);
}

/// Zero field in the momentum-solve slots of `g` (vanishing on a dirichlet boundary).
inline VectorField zero_momentum(const Grid& g) {
  return g.mode == BoundaryMode::dirichlet ? VectorField(g, kSineSine, kSineSine)
                                           : VectorField(g, kFourier, kFourier);
}

inline Basis momentum_basis(const Grid& g) {
  return g.mode == BoundaryMode::dirichlet ? kSineSine : kFourier;
}

inline Basis pressure_basis(const Grid& g) {
  return g.mode == BoundaryMode::dirichlet ? kCosCos : kFourier;
}

}  // namespace tavns
