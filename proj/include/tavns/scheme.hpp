#pragma once

// Explicit two-auxiliary-variable pressure-correction step.
//
//   u~ - u^n = tau nu Lap u~ - tau xi' [v.grad]u^n - tau grad p^n + eta' G
//   u' - u~ + tau (grad p' - grad p^n) = 0,   div u' = 0
//   xi' - xi  = tau ([v.grad]u^n, u~)
//   eta' - eta = -(G, u~ - u^n - G)
//
// with G = g(u^n) dW and v = u^n (nonlinear) or a supplied advector
// (linearized). Writing u~ = u~1 + xi' u~2 + eta' u~3 splits one step into
// three Helmholtz solves, three projections and a 2x2 solve.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>

#include "tavns/errors.hpp"
#include "tavns/field.hpp"
#include "tavns/spectral.hpp"

namespace tavns {

enum class GKind { identity_one, two_minus_cos, constant };

struct GSpec {
  GKind kind = GKind::identity_one;
  double c = 1.0;  // constant kind only
};

/// "identity_one" (or "1"), "two_minus_cos", "constant:<c>" (or a bare number).
inline GSpec parse_g(const std::string& s) {
  if (s == "identity_one" || s == "1" || s == "I") return {GKind::identity_one, 1.0};
  if (s == "two_minus_cos" || s == "2-cos") return {GKind::two_minus_cos, 1.0};
  std::string num = s.rfind("constant:", 0) == 0 ? s.substr(9) : s;
  try {
    std::size_t used = 0;
    const double c = std::stod(num, &used);
    if (used == num.size() && std::isfinite(c)) return {GKind::constant, c};
  } catch (const std::exception&) {
  }
  throw ConfigError("unknown g kind '" + s + "'", "scheme.g");
}

inline std::string to_string(const GSpec& g) {
  switch (g.kind) {
    case GKind::identity_one: return "identity_one";
    case GKind::two_minus_cos: return "two_minus_cos";
    case GKind::constant: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "constant:%.17g", g.c);
      return buf;
    }
  }
  return "?";
}

enum class SchemeMode { nonlinear, linearized };

struct SchemeConfig {
  double tau = 1e-3;
  double viscosity = 1.0;
  GSpec g;
  bool dealias = true;
  SchemeMode mode = SchemeMode::nonlinear;
  /// Advector at time t for linearized mode.
  std::function<VectorField(double t)> advector;
  /// Skip the diagnostics pass (production runs).
  bool diagnostics = true;
};

inline void validate(const SchemeConfig& c) {
  if (!(c.tau > 0.0) || !std::isfinite(c.tau)) throw ConfigError("tau must be positive", "scheme.tau");
  if (!(c.viscosity > 0.0) || !std::isfinite(c.viscosity))
    throw ConfigError("viscosity must be positive", "scheme.viscosity");
  if (c.mode == SchemeMode::linearized && !c.advector)
    throw ConfigError("linearized mode needs an advector", "scheme.mode");
}

struct SchemeState {
  VectorField u;
  ScalarField p;
  double xi = 1.0;
  double eta = 1.0;
  long step_index = 0;
  double t = 0.0;
};

/// Divergence-free start: u0 is projected once, p = 0, xi = eta = 1.
inline SchemeState make_initial_state(const VectorField& u0) {
  const Grid& g = u0.grid();
  const VectorField slots = g.mode == BoundaryMode::dirichlet ? u0.retag(kVelocityX, kVelocityY) : u0;
  SchemeState s;
  s.u = project(slots, 1.0).u;
  s.p = ScalarField(g, pressure_basis(g));
  return s;
}

/// Pointwise multiplier g(u).
inline VectorField apply_g(const VectorField& u, const GSpec& g) {
  VectorField m = u;
  auto fill = [&](ScalarField& f) {
    for (double& x : f.v) {
      switch (g.kind) {
        case GKind::identity_one: x = 1.0; break;
        case GKind::two_minus_cos: x = 2.0 - std::cos(x); break;
        case GKind::constant: x = g.c; break;
      }
    }
  };
  fill(m.x);
  fill(m.y);
  if (u.grid().mode == BoundaryMode::dirichlet) m = m.retag(kCosCos, kCosCos);
  return m;
}

struct NoiseTerm {
  VectorField values;  // G = g(u^n) dW
  VectorHat hat;       // momentum-basis coefficients of G
};

/// G = g(u) dW. Products with a non-constant multiplier are dealiased when
/// requested; constant multipliers keep dW's span.
inline NoiseTerm noise_term(const VectorField& u, const VectorField& dW, const SchemeConfig& cfg) {
  const Grid& g = u.grid();
  const Basis M = momentum_basis(g);
  NoiseTerm out;
  if (cfg.g.kind != GKind::two_minus_cos) {
    out.values = cfg.g.kind == GKind::constant ? cfg.g.c * dW : dW;
    out.hat = to_coeffs(out.values, M, M);
    return out;
  }
  const VectorField m = apply_g(u, cfg.g);
  const VectorField raw{pointwise_product(m.x, dW.x), pointwise_product(m.y, dW.y)};
  out.hat = to_coeffs(raw, M, M);
  if (cfg.dealias) {
    truncate(out.hat.x, g.dealias_cutoff());
    truncate(out.hat.y, g.dealias_cutoff());
    out.values = to_values(out.hat);
  } else {
    out.values = raw;
  }
  return out;
}

/// Intermediate velocities as momentum-basis coefficients.
struct TildeHats {
  VectorHat u1, u2, u3;
  VectorHat N;         // [v.grad]u^n
  NoiseTerm G;
  VectorField grad_p;  // grad p^n on the grid
};

inline TildeHats compute_tilde_hats(const SchemeState& s, const VectorField& advector, const VectorField& dW,
                                    const SchemeConfig& cfg) {
  const double tn = cfg.tau * cfg.viscosity;
  const Basis M = momentum_basis(s.u.grid());
  TildeHats t;
  t.N = convection_coeffs(advector, s.u, cfg.dealias);
  t.G = noise_term(s.u, dW, cfg);
  t.grad_p = gradient(s.p);
  VectorField rhs1 = s.u;
  axpy(-cfg.tau, t.grad_p, rhs1);
  t.u1 = to_coeffs(rhs1, M, M);
  helmholtz_invert(t.u1, tn);
  t.u2 = -cfg.tau * t.N;
  helmholtz_invert(t.u2, tn);
  t.u3 = t.G.hat;
  helmholtz_invert(t.u3, tn);
  return t;
}

struct TildeFields {
  VectorField u1, u2, u3;
  VectorField N;  // [v.grad]u^n
  VectorField G;  // g(u^n) dW
  TildeHats hat;
};

/// The three intermediate velocities of one step:
///   (I - tau nu Lap) u~1 = u^n - tau grad p^n
///   (I - tau nu Lap) u~2 = -tau [v.grad]u^n
///   (I - tau nu Lap) u~3 = g(u^n) dW
inline TildeFields compute_tilde_fields(const SchemeState& s, const VectorField& advector, const VectorField& dW,
                                        const SchemeConfig& cfg) {
  TildeFields t;
  t.hat = compute_tilde_hats(s, advector, dW, cfg);
  t.u1 = to_values(t.hat.u1);
  t.u2 = to_values(t.hat.u2);
  t.u3 = to_values(t.hat.u3);
  t.N = to_values(t.hat.N);
  t.G = t.hat.G.values;
  return t;
}

struct ProjectedFields {
  VectorField u1, u2, u3;
  ScalarField p1, p2, p3;
};

/// u_i = u~_i - tau grad phi_i with p1 = p^n + phi1, p2 = phi2, p3 = phi3.
inline ProjectedFields project_fields(const TildeFields& t, const ScalarField& p_n, double tau) {
  auto a = project(t.u1, tau);
  auto b = project(t.u2, tau);
  auto c = project(t.u3, tau);
  return {std::move(a.u), std::move(b.u), std::move(c.u), p_n + a.phi, std::move(b.phi), std::move(c.phi)};
}

struct AuxSystem {
  double a11 = 1, a12 = 0, a21 = 0, a22 = 1;
  double b1 = 0, b2 = 0;

  double det() const noexcept { return a11 * a22 - a12 * a21; }
  /// (xi', eta') by Cramer's rule.
  std::pair<double, double> solve() const {
    const double d = det();
    return {(b1 * a22 - a12 * b2) / d, (a11 * b2 - a21 * b1) / d};
  }
};

/// Symmetric positive-definite assembly (the form step() solves):
///   a11 = 1 + tau nu |grad u~2|^2 + |u~2|^2,  a22 likewise with u~3,
///   a12 = a21 = tau nu (grad u~2, grad u~3) + (u~2, u~3),
///   b1 = xi^n + tau ([v.grad]u^n, u~1),
///   b2 = eta^n - (G, u~1 - u^n - G).
inline AuxSystem assemble_aux_system(const TildeHats& t, const SchemeState& s, const SchemeConfig& cfg) {
  const double tn = cfg.tau * cfg.viscosity;
  AuxSystem A;
  A.a11 = 1.0 + tn * h1_inner(t.u2, t.u2) + parseval_inner(t.u2, t.u2);
  A.a22 = 1.0 + tn * h1_inner(t.u3, t.u3) + parseval_inner(t.u3, t.u3);
  A.a12 = A.a21 = tn * h1_inner(t.u2, t.u3) + parseval_inner(t.u2, t.u3);
  A.b1 = s.xi + cfg.tau * parseval_inner(t.N, t.u1);
  A.b2 = s.eta - (parseval_inner(t.G.hat, t.u1) - inner_product(t.G.values, s.u) -
                  parseval_inner(t.G.hat, t.G.hat));
  return A;
}

inline AuxSystem assemble_aux_system(const TildeFields& t, const SchemeState& s, const SchemeConfig& cfg) {
  return assemble_aux_system(t.hat, s, cfg);
}

/// Raw assembly from grid inner products, before the Helmholtz identities
/// are used to symmetrize:
///   A = [[1 - tau (N, u~2), -tau (N, u~3)], [(G, u~2), 1 + (G, u~3)]].
inline AuxSystem assemble_aux_system_raw(const TildeFields& t, const SchemeState& s, const SchemeConfig& cfg) {
  AuxSystem A;
  A.a11 = 1.0 - cfg.tau * inner_product(t.N, t.u2);
  A.a12 = -cfg.tau * inner_product(t.N, t.u3);
  A.a21 = inner_product(t.G, t.u2);
  A.a22 = 1.0 + inner_product(t.G, t.u3);
  A.b1 = s.xi + cfg.tau * inner_product(t.N, t.u1);
  VectorField r = t.u1 - s.u;
  axpy(-1.0, t.G, r);
  A.b2 = s.eta - inner_product(t.G, r);
  return A;
}

struct StepDiagnostics {
  double energy_identity_residual = 0.0;  // relative
  double divergence_norm = 0.0;           // max |div u'|
  double xi = 1.0, eta = 1.0;
  double tilde_minus_u_norm = 0.0;        // ||u~' - u'||
  double xi_identity_residual = 0.0;
  double eta_identity_residual = 0.0;
  AuxSystem system;
};

struct StepResult {
  SchemeState state;
  StepDiagnostics diag;
};

namespace scheme_detail {

inline bool finite(const SchemeState& s) {
  return std::isfinite(s.xi) && std::isfinite(s.eta) && s.u.all_finite() && s.p.all_finite();
}

inline double quadrature_mean(const ScalarField& f) {
  ScalarField one(f.grid, f.basis);
  for (double& x : one.v) x = 1.0;
  return inner_product(f, one);
}

// The three projections are linear in u~_i, so u' = u1 + xi' u2 + eta' u3
// and p' = p1 + xi' p2 + eta' p3 are obtained from one projection of
// u~' = u~1 + xi' u~2 + eta' u~3.
inline StepResult advance(const SchemeState& s, const VectorField& advector, const VectorField& dW,
                          const SchemeConfig& cfg) {
  validate(cfg);
  const double tau = cfg.tau;
  const TildeHats t = compute_tilde_hats(s, advector, dW, cfg);
  const AuxSystem A = assemble_aux_system(t, s, cfg);
  const auto [xi, eta] = A.solve();

  VectorHat ut_hat = t.u1;
  axpy(xi, t.u2, ut_hat);
  axpy(eta, t.u3, ut_hat);
  const VectorField ut = to_values(ut_hat);
  Projection pr = project(ut, tau);

  StepResult out;
  SchemeState& n = out.state;
  n.u = std::move(pr.u);
  n.p = s.p + pr.phi;
  const double mean = quadrature_mean(n.p);
  for (double& x : n.p.v) x -= mean;
  n.xi = xi;
  n.eta = eta;
  n.step_index = s.step_index + 1;
  n.t = s.t + tau;

  if (!finite(n))
    throw BlowUpError("non-finite state after step " + std::to_string(n.step_index), n.step_index);

  StepDiagnostics& d = out.diag;
  d.xi = xi;
  d.eta = eta;
  d.system = A;
  if (cfg.diagnostics) {
    const VectorField& gp = t.grad_p;
    const double lhs = inner_product(n.u, n.u) + tau * tau * h1_inner(n.p, n.p);
    const double rhs = inner_product(ut, ut) + 2.0 * tau * inner_product(ut, gp) + tau * tau * inner_product(gp, gp);
    d.energy_identity_residual = std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    d.divergence_norm = divergence(n.u).max_abs();
    d.tilde_minus_u_norm = l2_norm(ut - n.u);
    d.xi_identity_residual = xi - s.xi - tau * inner_product(to_values(t.N), ut);
    VectorField r = ut - s.u;
    axpy(-1.0, t.G.values, r);
    d.eta_identity_residual = eta - s.eta + inner_product(t.G.values, r);
  }
  return out;
}

}  // namespace scheme_detail

/// One step of the nonlinear scheme (advector = u^n).
inline StepResult step(const SchemeState& s, const VectorField& dW, const SchemeConfig& cfg) {
  return scheme_detail::advance(s, s.u, dW, cfg);
}

/// One step with [v.grad]u^n in place of [u^n.grad]u^n.
inline StepResult step_linearized(const SchemeState& s, const VectorField& v, const VectorField& dW,
                                  const SchemeConfig& cfg) {
  return scheme_detail::advance(s, v, dW, cfg);
}

/// Dispatches on cfg.mode.
inline StepResult advance(const SchemeState& s, const VectorField& dW, const SchemeConfig& cfg) {
  if (cfg.mode == SchemeMode::linearized) {
    validate(cfg);
    return step_linearized(s, cfg.advector(s.t), dW, cfg);
  }
  return step(s, dW, cfg);
}

}  // namespace tavns
