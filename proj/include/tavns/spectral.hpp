#pragma once

// Spectral discretization on [0,1]^2.
//
// Dirichlet grids expand each direction in sine or cosine series collocated
// on the n+1 nodes x_i = i/n; periodic grids use the full Fourier series on
// n nodes. Coefficients are function coefficients:
//
//   f(x, y) = sum_{a,b} c_ab phi_a(x) psi_b(y)
//
// with phi/psi = sin(a*pi*x), cos(a*pi*x) or exp(2*pi*i*k*x). Under the grid
// quadrature used by inner_product() the basis is orthogonal and
//
//   ||f||^2 = sum_{a,b} w_a w_b |c_ab|^2,
//
// where w = 1/2 for sine modes and interior cosine modes, w = 1 for the
// cosine end modes a = 0 and a = n, and w = 1 for every Fourier mode.
//
// Derivatives are exact on the expansion: sine <-> cosine flip under d/dx.
// The cosine end mode cos(n*pi*x) differentiates to zero on the grid, and the
// Fourier Nyquist mode is given zero derivative, so div(grad) and the
// Laplacian share one symbol -(kx^2 + ky^2) and discrete integration by parts
// holds exactly.

#include <cmath>
#include <complex>
#include <map>
#include <tuple>
#include <numbers>
#include <vector>

#include "tavns/detail/fft_plans.hpp"
#include "tavns/errors.hpp"
#include "tavns/field.hpp"

namespace tavns {

struct SpectralField {
  Grid grid;
  Basis basis;
  int nx = 0;  // coefficients along x (contiguous)
  int ny = 0;  // coefficients along y
  std::vector<double> real;                   // dirichlet
  std::vector<std::complex<double>> fourier;  // periodic, r2c half spectrum

  double& r(int ix, int iy) noexcept { return real[static_cast<std::size_t>(iy) * nx + ix]; }
  double r(int ix, int iy) const noexcept { return real[static_cast<std::size_t>(iy) * nx + ix]; }
  std::complex<double>& c(int ix, int iy) noexcept {
    return fourier[static_cast<std::size_t>(iy) * nx + ix];
  }
  std::complex<double> c(int ix, int iy) const noexcept {
    return fourier[static_cast<std::size_t>(iy) * nx + ix];
  }
};

namespace spectral_detail {

inline int coeff_count(const Grid& g, BasisKind k, bool fast_axis) {
  switch (k) {
    case BasisKind::sine: return g.n - 1;
    case BasisKind::cosine: return g.n + 1;
    case BasisKind::fourier: return fast_axis ? g.n / 2 + 1 : g.n;
  }
  return 0;
}

/// Mode number a (sine/cosine) or signed wavenumber k (fourier) of a slot.
inline int mode_of(const Grid& g, BasisKind k, int idx, bool fast_axis) {
  switch (k) {
    case BasisKind::sine: return idx + 1;
    case BasisKind::cosine: return idx;
    case BasisKind::fourier: return (fast_axis || idx <= g.n / 2) ? idx : idx - g.n;
  }
  return 0;
}

inline int first_node(BasisKind k) { return k == BasisKind::sine ? 1 : 0; }

inline fftw_r2r_kind r2r_kind(BasisKind k) {
  return k == BasisKind::sine ? FFTW_RODFT00 : FFTW_REDFT00;
}

inline bool is_cos_end(const Grid& g, BasisKind k, int a) {
  return k == BasisKind::cosine && (a == 0 || a == g.n);
}

/// Parseval weight of one direction.
inline double weight(const Grid& g, BasisKind k, int a) {
  if (k == BasisKind::fourier) return 1.0;
  return is_cos_end(g, k, a) ? 1.0 : 0.5;
}

/// Derivative symbol magnitude of one direction.
inline double wavenumber(const Grid& g, BasisKind k, int a) {
  switch (k) {
    case BasisKind::sine: return a * std::numbers::pi;
    case BasisKind::cosine: return a < g.n ? a * std::numbers::pi : 0.0;
    case BasisKind::fourier:
      return 2 * a == g.n || -2 * a == g.n ? 0.0 : 2.0 * std::numbers::pi * a;
  }
  return 0.0;
}

/// Number of times an r2c column appears in the full spectrum.
inline double r2c_multiplicity(const Grid& g, int kx) {
  return (kx == 0 || 2 * kx == g.n) ? 1.0 : 2.0;
}

/// Per-slot constants of one direction.
struct AxisTable {
  std::vector<int> mode;
  std::vector<double> weight;  // Parseval weight
  std::vector<double> k2;      // squared derivative symbol
  std::vector<double> fwd;     // values -> coefficients scale
  std::vector<double> inv;     // coefficients -> values scale
};

inline const AxisTable& axis_table(const Grid& g, BasisKind kind, bool fast_axis) {
  using Key = std::tuple<int, int, int, bool>;
  thread_local std::map<Key, AxisTable> cache;
  auto [it, fresh] = cache.try_emplace(Key{g.n, static_cast<int>(g.mode), static_cast<int>(kind), fast_axis});
  AxisTable& t = it->second;
  if (fresh) {
    const int count = coeff_count(g, kind, fast_axis);
    for (int i = 0; i < count; ++i) {
      const int a = mode_of(g, kind, i, fast_axis);
      const double k = wavenumber(g, kind, a);
      t.mode.push_back(a);
      t.weight.push_back(weight(g, kind, a));
      t.k2.push_back(k * k);
      t.fwd.push_back(is_cos_end(g, kind, a) ? 0.5 / g.n : 1.0 / g.n);
      t.inv.push_back(is_cos_end(g, kind, a) ? 1.0 : 0.5);
    }
  }
  return t;
}

inline SpectralField empty_like(const Grid& g, Basis b) {
  SpectralField c;
  c.grid = g;
  c.basis = b;
  c.nx = coeff_count(g, b.x, true);
  c.ny = coeff_count(g, b.y, false);
  const auto count = static_cast<std::size_t>(c.nx) * c.ny;
  if (g.mode == BoundaryMode::periodic)
    c.fourier.assign(count, {0.0, 0.0});
  else
    c.real.assign(count, 0.0);
  return c;
}

}  // namespace spectral_detail

/// Grid values -> coefficients in basis `b`. Sine directions read interior
/// nodes only. Throws UsageError when `b` does not suit the grid.
inline SpectralField to_coeffs(const ScalarField& f, Basis b) {
  namespace sd = spectral_detail;
  check_basis(f.grid, b);
  const Grid& g = f.grid;
  SpectralField c = sd::empty_like(g, b);
  if (g.mode == BoundaryMode::periodic) {
    auto& plan = detail::r2c_plan(g.n);
    std::copy(f.v.begin(), f.v.end(), plan.real());
    plan.forward();
    const double s = 1.0 / (static_cast<double>(g.n) * g.n);
    const auto* out = plan.cplx();
    for (std::size_t k = 0; k < c.fourier.size(); ++k) c.fourier[k] = out[k] * s;
    return c;
  }
  auto& plan = detail::r2r_plan(c.ny, c.nx, sd::r2r_kind(b.y), sd::r2r_kind(b.x));
  double* buf = plan.buffer();
  const int i0 = sd::first_node(b.x);
  const int j0 = sd::first_node(b.y);
  for (int iy = 0; iy < c.ny; ++iy)
    for (int ix = 0; ix < c.nx; ++ix) buf[iy * c.nx + ix] = f(i0 + ix, j0 + iy);
  plan.execute();
  const auto& tx = sd::axis_table(g, b.x, true).fwd;
  const auto& ty = sd::axis_table(g, b.y, false).fwd;
  for (int iy = 0; iy < c.ny; ++iy)
    for (int ix = 0; ix < c.nx; ++ix) c.r(ix, iy) = buf[iy * c.nx + ix] * ty[iy] * tx[ix];
  return c;
}

inline SpectralField to_coeffs(const ScalarField& f, BasisKind k) { return to_coeffs(f, Basis{k, k}); }

/// Coefficients -> grid values, tagged with the coefficients' basis.
inline ScalarField to_values(const SpectralField& c) {
  namespace sd = spectral_detail;
  const Grid& g = c.grid;
  ScalarField f(g, c.basis);
  if (g.mode == BoundaryMode::periodic) {
    auto& plan = detail::r2c_plan(g.n);
    std::copy(c.fourier.begin(), c.fourier.end(), plan.cplx());
    plan.backward();
    std::copy(plan.real(), plan.real() + f.v.size(), f.v.begin());
    return f;
  }
  auto& plan = detail::r2r_plan(c.ny, c.nx, sd::r2r_kind(c.basis.y), sd::r2r_kind(c.basis.x));
  double* buf = plan.buffer();
  const auto& tx = sd::axis_table(g, c.basis.x, true).inv;
  const auto& ty = sd::axis_table(g, c.basis.y, false).inv;
  for (int iy = 0; iy < c.ny; ++iy)
    for (int ix = 0; ix < c.nx; ++ix) buf[iy * c.nx + ix] = c.r(ix, iy) * ty[iy] * tx[ix];
  plan.execute();
  const int i0 = sd::first_node(c.basis.x);
  const int j0 = sd::first_node(c.basis.y);
  for (int iy = 0; iy < c.ny; ++iy)
    for (int ix = 0; ix < c.nx; ++ix) f(i0 + ix, j0 + iy) = buf[iy * c.nx + ix];
  return f;
}

/// Visit every coefficient slot with its mode numbers (a, b).
template <class F>
void for_each_mode(const SpectralField& c, F&& fn) {
  namespace sd = spectral_detail;
  const auto& mx = sd::axis_table(c.grid, c.basis.x, true).mode;
  const auto& my = sd::axis_table(c.grid, c.basis.y, false).mode;
  for (int iy = 0; iy < c.ny; ++iy)
    for (int ix = 0; ix < c.nx; ++ix) fn(ix, iy, mx[ix], my[iy]);
}

/// Symbol of -Laplacian for a slot.
inline double neg_laplacian_symbol(const SpectralField& c, int a, int b) {
  namespace sd = spectral_detail;
  const double kx = sd::wavenumber(c.grid, c.basis.x, a);
  const double ky = sd::wavenumber(c.grid, c.basis.y, b);
  return kx * kx + ky * ky;
}

/// Exact derivative of an expansion along `axis` (0 = x, 1 = y).
inline SpectralField differentiate(const SpectralField& c, int axis) {
  namespace sd = spectral_detail;
  const Grid& g = c.grid;
  if (g.mode == BoundaryMode::periodic) {
    SpectralField d = c;
    for_each_mode(c, [&](int ix, int iy, int a, int b) {
      const double k = sd::wavenumber(g, BasisKind::fourier, axis == 0 ? a : b);
      d.c(ix, iy) = c.c(ix, iy) * std::complex<double>(0.0, k);
    });
    return d;
  }
  const BasisKind src = axis == 0 ? c.basis.x : c.basis.y;
  const BasisKind dst = src == BasisKind::sine ? BasisKind::cosine : BasisKind::sine;
  const Basis out_basis = axis == 0 ? Basis{dst, c.basis.y} : Basis{c.basis.x, dst};
  SpectralField d = sd::empty_like(g, out_basis);
  // sin(a pi x)' = a pi cos(a pi x);  cos(a pi x)' = -a pi sin(a pi x)
  const double sign = src == BasisKind::sine ? 1.0 : -1.0;
  for_each_mode(d, [&](int ix, int iy, int a, int b) {
    const int m = axis == 0 ? a : b;
    if (m < 1 || m > g.n - 1) return;  // no source slot, or derivative vanishes on the grid
    const int sx = axis == 0 ? (src == BasisKind::sine ? m - 1 : m) : ix;
    const int sy = axis == 1 ? (src == BasisKind::sine ? m - 1 : m) : iy;
    d.r(ix, iy) = sign * m * std::numbers::pi * c.r(sx, sy);
  });
  return d;
}

/// Zero all modes above the 2/3-rule cutoff.
inline SpectralField& truncate(SpectralField& c, int cutoff) {
  for_each_mode(c, [&](int ix, int iy, int a, int b) {
    if (std::abs(a) <= cutoff && std::abs(b) <= cutoff) return;
    if (c.grid.mode == BoundaryMode::periodic)
      c.c(ix, iy) = 0.0;
    else
      c.r(ix, iy) = 0.0;
  });
  return c;
}

/// c <- symbol(a, b) * c, slot by slot.
template <class S>
SpectralField& scale_modes(SpectralField& c, S&& symbol) {
  for_each_mode(c, [&](int ix, int iy, int a, int b) {
    const double s = symbol(a, b);
    if (c.grid.mode == BoundaryMode::periodic)
      c.c(ix, iy) *= s;
    else
      c.r(ix, iy) *= s;
  });
  return c;
}

inline void axpy(double alpha, const SpectralField& x, SpectralField& y) {
  if (!(x.grid == y.grid) || !(x.basis == y.basis)) throw UsageError("axpy: mismatched expansions");
  for (std::size_t k = 0; k < y.real.size(); ++k) y.real[k] += alpha * x.real[k];
  for (std::size_t k = 0; k < y.fourier.size(); ++k) y.fourier[k] += alpha * x.fourier[k];
}

inline SpectralField operator*(double s, SpectralField c) {
  for (double& x : c.real) x *= s;
  for (auto& x : c.fourier) x *= s;
  return c;
}

/// Coefficients of both components of a vector field.
struct VectorHat {
  SpectralField x;
  SpectralField y;
};

inline VectorHat to_coeffs(const VectorField& u, Basis bx, Basis by) {
  return {to_coeffs(u.x, bx), to_coeffs(u.y, by)};
}

inline VectorField to_values(const VectorHat& h) { return {to_values(h.x), to_values(h.y)}; }

inline void axpy(double alpha, const VectorHat& x, VectorHat& y) {
  axpy(alpha, x.x, y.x);
  axpy(alpha, x.y, y.y);
}

inline VectorHat operator*(double s, VectorHat h) {
  h.x = s * std::move(h.x);
  h.y = s * std::move(h.y);
  return h;
}

/// Inverts (I - tau*Laplacian) on the expansion.
inline SpectralField& helmholtz_invert(SpectralField& c, double tau) {
  namespace sd = spectral_detail;
  const auto& kx = sd::axis_table(c.grid, c.basis.x, true).k2;
  const auto& ky = sd::axis_table(c.grid, c.basis.y, false).k2;
  for (int iy = 0; iy < c.ny; ++iy) {
    for (int ix = 0; ix < c.nx; ++ix) {
      const double d = 1.0 / (1.0 + tau * (kx[ix] + ky[iy]));
      if (c.grid.mode == BoundaryMode::periodic)
        c.c(ix, iy) *= d;
      else
        c.r(ix, iy) *= d;
    }
  }
  return c;
}

inline VectorHat& helmholtz_invert(VectorHat& h, double tau) {
  helmholtz_invert(h.x, tau);
  helmholtz_invert(h.y, tau);
  return h;
}

/// Projection of `f` onto the modes <= dealias cutoff of basis `b`.
inline ScalarField dealias(const ScalarField& f, Basis b) {
  auto c = to_coeffs(f, b);
  return to_values(truncate(c, f.grid.dealias_cutoff()));
}

namespace spectral_detail {

/// sum over slots of wx*wy*(sx*kx^2 + sy*ky^2 + s0) * Re(f conj(g)).
inline double weighted_sum(const SpectralField& f, const SpectralField& g, double s0, double s1) {
  if (!(f.grid == g.grid) || !(f.basis == g.basis)) throw UsageError("mismatched expansions");
  const AxisTable& tx = axis_table(f.grid, f.basis.x, true);
  const AxisTable& ty = axis_table(f.grid, f.basis.y, false);
  const bool periodic = f.grid.mode == BoundaryMode::periodic;
  double s = 0.0;
  for (int iy = 0; iy < f.ny; ++iy) {
    double row = 0.0;
    for (int ix = 0; ix < f.nx; ++ix) {
      const double w = s0 + s1 * (tx.k2[ix] + ty.k2[iy]);
      if (periodic) {
        const auto a = f.c(ix, iy);
        const auto b = g.c(ix, iy);
        row += w * r2c_multiplicity(f.grid, tx.mode[ix]) * (a.real() * b.real() + a.imag() * b.imag());
      } else {
        row += w * tx.weight[ix] * f.r(ix, iy) * g.r(ix, iy);
      }
    }
    s += ty.weight[iy] * row;
  }
  return s;
}

}  // namespace spectral_detail

/// Weighted coefficient sum <f, g> (Parseval form of inner_product()).
inline double parseval_inner(const SpectralField& f, const SpectralField& g) {
  return spectral_detail::weighted_sum(f, g, 1.0, 0.0);
}

inline double parseval_inner(const VectorHat& f, const VectorHat& g) {
  return parseval_inner(f.x, g.x) + parseval_inner(f.y, g.y);
}

// ---------------------------------------------------------------------------
// Grid-value operators

inline ScalarField derivative(const ScalarField& f, int axis) {
  return to_values(differentiate(to_coeffs(f, f.basis), axis));
}

inline VectorField gradient(const ScalarField& p) {
  const auto c = to_coeffs(p, p.basis);
  return {to_values(differentiate(c, 0)), to_values(differentiate(c, 1))};
}

inline ScalarField divergence(const VectorField& u) {
  return derivative(u.x, 0) + derivative(u.y, 1);
}

/// omega = d(u_y)/dx - d(u_x)/dy
inline ScalarField vorticity(const VectorField& u) {
  return derivative(u.y, 0) - derivative(u.x, 1);
}

inline ScalarField laplacian(const ScalarField& f) {
  auto c = to_coeffs(f, f.basis);
  return to_values(scale_modes(c, [&](int a, int b) { return -neg_laplacian_symbol(c, a, b); }));
}

/// Solves (I - tau*Laplacian) u = rhs with u = 0 on a dirichlet boundary
/// (sine basis) or periodic. Dirichlet data on the boundary nodes of `rhs`
/// is ignored.
inline ScalarField solve_helmholtz(const ScalarField& rhs, double tau) {
  if (!(tau > 0.0)) throw UsageError("solve_helmholtz: tau must be positive");
  auto c = to_coeffs(rhs, momentum_basis(rhs.grid));
  return to_values(helmholtz_invert(c, tau));
}

inline VectorField solve_helmholtz(const VectorField& rhs, double tau) {
  return {solve_helmholtz(rhs.x, tau), solve_helmholtz(rhs.y, tau)};
}

/// Zero-mean phi with Laplacian(phi) = div_field / tau, homogeneous Neumann
/// (cosine basis) on dirichlet grids, periodic otherwise.
inline ScalarField pressure_poisson_solve(const ScalarField& div_field, double tau) {
  if (!(tau > 0.0)) throw UsageError("pressure_poisson_solve: tau must be positive");
  auto c = to_coeffs(div_field, pressure_basis(div_field.grid));
  return to_values(scale_modes(c, [&](int a, int b) {
    const double l = neg_laplacian_symbol(c, a, b);
    return l > 0.0 ? -1.0 / (tau * l) : 0.0;
  }));
}

struct Projection {
  VectorField u;     // divergence-free, u.n = 0
  ScalarField phi;   // zero mean; u = u_tilde - tau * grad(phi)
};

/// Coefficient form of project(): `h` holds u_tilde in the velocity slots
/// (fourier, or sine x cosine / cosine x sine) and is projected in place.
/// Returns the coefficients of phi.
inline SpectralField project_coeffs(VectorHat& h, double tau) {
  namespace sd = spectral_detail;
  if (!(tau > 0.0)) throw UsageError("project: tau must be positive");
  const Grid& g = h.x.grid;
  const double pi = std::numbers::pi;
  if (g.mode == BoundaryMode::periodic) {
    auto& U = h.x;
    auto& V = h.y;
    auto P = sd::empty_like(g, kFourier);
    const std::complex<double> I(0.0, 1.0);
    for_each_mode(U, [&](int ix, int iy, int a, int b) {
      const double kx = sd::wavenumber(g, BasisKind::fourier, a);
      const double ky = sd::wavenumber(g, BasisKind::fourier, b);
      const double l = kx * kx + ky * ky;
      if (l == 0.0) return;
      const auto d = I * kx * U.c(ix, iy) + I * ky * V.c(ix, iy);
      const auto phi = -d / (tau * l);
      P.c(ix, iy) = phi;
      U.c(ix, iy) -= tau * I * kx * phi;
      V.c(ix, iy) -= tau * I * ky * phi;
    });
    return P;
  }
  if (!(h.x.basis == kVelocityX) || !(h.y.basis == kVelocityY))
    throw UsageError("project_coeffs: velocity must be in the (sine x cosine, cosine x sine) slots");
  const int n = g.n;
  auto& A = h.x;  // (n-1) x (n+1)
  auto& B = h.y;  // (n+1) x (n-1)
  auto P = sd::empty_like(g, kCosCos);
  for (int b = 0; b <= n; ++b) {
    const bool by = b >= 1 && b <= n - 1;
    for (int a = 0; a <= n; ++a) {
      const bool ax = a >= 1 && a <= n - 1;
      const double kx = ax ? a * pi : 0.0;
      const double ky = by ? b * pi : 0.0;
      const double l = kx * kx + ky * ky;
      if (l == 0.0) continue;
      const double d = (ax ? kx * A.r(a - 1, b) : 0.0) + (by ? ky * B.r(a, b - 1) : 0.0);
      const double phi = -d / (tau * l);
      P.r(a, b) = phi;
      if (ax) A.r(a - 1, b) += tau * kx * phi;
      if (by) B.r(a, b - 1) += tau * ky * phi;
    }
  }
  return P;
}

/// Pressure-correction projection: finds phi with Laplacian(phi) =
/// div(u_tilde)/tau and returns u = u_tilde - tau*grad(phi). On dirichlet
/// grids u lands in the (sine x cosine, cosine x sine) slots where the
/// discrete divergence is exactly representable, so div(u) vanishes to
/// round-off.
inline Projection project(const VectorField& u_tilde, double tau) {
  const Grid& g = u_tilde.grid();
  const bool periodic = g.mode == BoundaryMode::periodic;
  VectorHat h = to_coeffs(u_tilde, periodic ? kFourier : kVelocityX, periodic ? kFourier : kVelocityY);
  const SpectralField phi = project_coeffs(h, tau);
  return {to_values(h), to_values(phi)};
}

/// Helmholtz-Leray projector (periodic grids only).
inline VectorField leray_project(const VectorField& u) {
  if (u.grid().mode != BoundaryMode::periodic)
    throw UsageError("leray_project requires a periodic grid; use project() on dirichlet grids");
  return project(u, 1.0).u;
}

// ---------------------------------------------------------------------------
// Quadrature

/// Discrete L2 product: rectangle rule (periodic), trapezoid rule including
/// the boundary nodes (dirichlet).
inline double inner_product(const ScalarField& f, const ScalarField& g) {
  check_same_grid(f.grid, g.grid);
  const Grid& gr = f.grid;
  const double h2 = gr.h() * gr.h();
  if (gr.mode == BoundaryMode::periodic) {
    double s = 0.0;
    for (std::size_t k = 0; k < f.v.size(); ++k) s += f.v[k] * g.v[k];
    return s * h2;
  }
  const int n = gr.n;
  double s = 0.0;
  for (int j = 0; j <= n; ++j) {
    const double wj = (j == 0 || j == n) ? 0.5 : 1.0;
    double row = 0.0;
    for (int i = 0; i <= n; ++i) row += ((i == 0 || i == n) ? 0.5 : 1.0) * f(i, j) * g(i, j);
    s += wj * row;
  }
  return s * h2;
}

inline double inner_product(const VectorField& f, const VectorField& g) {
  return inner_product(f.x, g.x) + inner_product(f.y, g.y);
}

inline double l2_norm(const ScalarField& f) { return std::sqrt(inner_product(f, f)); }
inline double l2_norm(const VectorField& f) { return std::sqrt(inner_product(f, f)); }

/// (grad f, grad g) on coefficients of one expansion.
inline double h1_inner(const SpectralField& cf, const SpectralField& cg) {
  return spectral_detail::weighted_sum(cf, cg, 0.0, 1.0);
}

/// (grad f, grad g). Evaluated on the coefficients when both fields share a
/// basis (equal to the grid quadrature of the spectral gradients).
inline double h1_inner(const ScalarField& f, const ScalarField& g) {
  check_same_grid(f.grid, g.grid);
  if (!(f.basis == g.basis)) return inner_product(gradient(f), gradient(g));
  if (&f == &g) {
    const auto c = to_coeffs(f, f.basis);
    return h1_inner(c, c);
  }
  return h1_inner(to_coeffs(f, f.basis), to_coeffs(g, g.basis));
}

inline double h1_inner(const VectorHat& f, const VectorHat& g) {
  return h1_inner(f.x, g.x) + h1_inner(f.y, g.y);
}

inline double h1_inner(const VectorField& f, const VectorField& g) {
  return h1_inner(f.x, g.x) + h1_inner(f.y, g.y);
}

inline double h1_seminorm(const ScalarField& f) { return std::sqrt(h1_inner(f, f)); }
inline double h1_seminorm(const VectorField& f) { return std::sqrt(h1_inner(f, f)); }

// ---------------------------------------------------------------------------
// Nonlinear terms

/// [v . grad] u formed pseudo-spectrally, returned as coefficients in the
/// momentum basis (sine-sine on dirichlet grids). With `dealias` the inputs
/// and the product are truncated by the 2/3 rule.
inline VectorHat convection_coeffs(const VectorField& v, const VectorField& u, bool dealias = true) {
  check_same_grid(v.grid(), u.grid());
  const Grid& g = u.grid();
  const int cut = g.dealias_cutoff();
  struct Prepared {
    ScalarField value, dx, dy;
  };
  auto prepare = [&](const ScalarField& f, bool need_derivs) {
    auto c = to_coeffs(f, f.basis);
    if (dealias) truncate(c, cut);
    Prepared p;
    p.value = dealias ? to_values(c) : f;
    if (need_derivs) {
      p.dx = to_values(differentiate(c, 0));
      p.dy = to_values(differentiate(c, 1));
    }
    return p;
  };
  const Prepared ux = prepare(u.x, true);
  const Prepared uy = prepare(u.y, true);
  const bool same = &u == &v;
  const ScalarField vx = same ? ux.value : prepare(v.x, false).value;
  const ScalarField vy = same ? uy.value : prepare(v.y, false).value;

  const Basis target = momentum_basis(g);
  auto component = [&](const Prepared& uc) {
    ScalarField raw(g, g.mode == BoundaryMode::dirichlet ? kCosCos : kFourier);
    for (std::size_t k = 0; k < raw.v.size(); ++k)
      raw.v[k] = vx.v[k] * uc.dx.v[k] + vy.v[k] * uc.dy.v[k];
    auto c = to_coeffs(raw, target);
    return dealias ? truncate(c, cut) : c;
  };
  return {component(ux), component(uy)};
}

/// Grid values of convection_coeffs().
inline VectorField convection(const VectorField& v, const VectorField& u, bool dealias = true) {
  return to_values(convection_coeffs(v, u, dealias));
}

/// b(v, u, w) = ([v . grad] u, w).
inline double trilinear(const VectorField& v, const VectorField& u, const VectorField& w,
                        bool dealias = true) {
  return inner_product(convection(v, u, dealias), w);
}

}  // namespace tavns
