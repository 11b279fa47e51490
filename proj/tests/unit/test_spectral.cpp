#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tavns/harness.hpp"
#include "tavns/scheme.hpp"
#include "tavns/spectral.hpp"

using namespace tavns;

namespace {

constexpr double pi = std::numbers::pi;
const Grid kDir{24, BoundaryMode::dirichlet};
const Grid kPer{24, BoundaryMode::periodic};

ScalarField random_field(const Grid& g, Basis b, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ScalarField f(g, b);
  for (double& x : f.v) x = u(gen);
  f.enforce_basis();
  return f;
}

/// Random coefficients on the lowest 6 modes per direction.
ScalarField smooth_random(const Grid& g, Basis b, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto c = spectral_detail::empty_like(g, b);
  for_each_mode(c, [&](int ix, int iy, int a, int bb) {
    if (std::abs(a) > 6 || std::abs(bb) > 6) return;
    if (g.mode == BoundaryMode::periodic) c.c(ix, iy) = {u(gen), u(gen)};
    else c.r(ix, iy) = u(gen);
  });
  return to_values(c);
}

double max_diff(const ScalarField& a, const ScalarField& b) { return (a - b).max_abs(); }

/// Divergence-free fields from psi = sin(k x) sin(k y) + s sin(3k x) sin(2k y),
/// u = (-d_y psi, d_x psi), placed in the velocity slots.
VectorField smooth_velocity(const Grid& g, double s) {
  const bool d = g.mode == BoundaryMode::dirichlet;
  const double k = d ? pi : 2 * pi;
  return VectorField::sample(g, d ? kVelocityX : kFourier, d ? kVelocityY : kFourier, [&](double x, double y) {
    return std::array<double, 2>{
        -k * std::sin(k * x) * std::cos(k * y) - 2 * k * s * std::sin(3 * k * x) * std::cos(2 * k * y),
        k * std::cos(k * x) * std::sin(k * y) + 3 * k * s * std::cos(3 * k * x) * std::sin(2 * k * y)};
  });
}

}  // namespace

TEST(Grid, SizesForModeCounts) {
  EXPECT_EQ(grid_for_modes(32, BoundaryMode::dirichlet).n, 48);
  EXPECT_EQ(grid_for_modes(40, BoundaryMode::dirichlet).n, 64);
  EXPECT_EQ(grid_for_modes(128, BoundaryMode::periodic).n, 192);
  EXPECT_THROW(grid_for_modes(3, BoundaryMode::dirichlet), ConfigError);
}

TEST(Transforms, SineEigenfunctionHasOneCoefficient) {
  const auto f = ScalarField::sample(kDir, kSineSine, [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); });
  const auto c = to_coeffs(f, BasisKind::sine);
  for (int iy = 0; iy < c.ny; ++iy)
    for (int ix = 0; ix < c.nx; ++ix) EXPECT_NEAR(c.r(ix, iy), ix == 0 && iy == 0 ? 1.0 : 0.0, 1e-14);
}

TEST(Transforms, ConstantOnPeriodicGridIsZeroMode) {
  ScalarField f(kPer, kFourier);
  for (double& x : f.v) x = 2.5;
  const auto c = to_coeffs(f, BasisKind::fourier);
  for (int iy = 0; iy < c.ny; ++iy)
    for (int ix = 0; ix < c.nx; ++ix) EXPECT_NEAR(std::abs(c.c(ix, iy) - (ix == 0 && iy == 0 ? 2.5 : 0.0)), 0.0, 1e-14);
}

TEST(Transforms, FourierCoefficientsOfKnownField) {
  // 2 cos(2 pi (x + 2y)) - sin(6 pi x)
  const auto f = ScalarField::sample(kPer, kFourier, [](double x, double y) {
    return 2.0 * std::cos(2 * pi * (x + 2 * y)) - std::sin(6 * pi * x);
  });
  const auto c = to_coeffs(f, BasisKind::fourier);
  EXPECT_NEAR(std::abs(c.c(1, 2) - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(c.c(3, 0) - std::complex<double>(0.0, 0.5)), 0.0, 1e-14);
}

TEST(Transforms, DirectSumOracleRecoversCoefficients) {
  // coefficients -> values by explicit trigonometric sums, then back
  const Grid g{12, BoundaryMode::dirichlet};
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (Basis b : {kSineSine, kCosCos, kVelocityX, kVelocityY}) {
    auto c = spectral_detail::empty_like(g, b);
    for (double& x : c.real) x = u(gen);
    auto phi = [&](BasisKind k, int a, double x) { return k == BasisKind::sine ? std::sin(a * pi * x) : std::cos(a * pi * x); };
    const auto f = ScalarField::sample(g, b, [&](double x, double y) {
      double s = 0.0;
      for (int iy = 0; iy < c.ny; ++iy)
        for (int ix = 0; ix < c.nx; ++ix)
          s += c.r(ix, iy) * phi(b.x, spectral_detail::mode_of(g, b.x, ix, true), x) *
               phi(b.y, spectral_detail::mode_of(g, b.y, iy, false), y);
      return s;
    });
    const auto back = to_coeffs(f, b);
    for (std::size_t k = 0; k < c.real.size(); ++k) EXPECT_NEAR(back.real[k], c.real[k], 1e-12);
  }
}

TEST(Transforms, RoundTripAllBases) {
  int seed = 0;
  for (Basis b : {kSineSine, kCosCos, kVelocityX, kVelocityY}) {
    const auto f = random_field(kDir, b, ++seed);
    EXPECT_LE(max_diff(to_values(to_coeffs(f, b)), f), 1e-12 * f.max_abs());
  }
  const auto f = random_field(kPer, kFourier, 99);
  EXPECT_LE(max_diff(to_values(to_coeffs(f, kFourier)), f), 1e-12 * f.max_abs());
}

TEST(Transforms, BasisBoundaryMismatchIsUsageError) {
  const ScalarField d(kDir, kSineSine);
  const ScalarField p(kPer, kFourier);
  EXPECT_THROW(to_coeffs(d, BasisKind::fourier), UsageError);
  EXPECT_THROW(to_coeffs(p, BasisKind::sine), UsageError);
  EXPECT_THROW(ScalarField(kPer, kCosCos), UsageError);
}

TEST(Transforms, ParsevalMatchesQuadrature) {
  int seed = 10;
  for (Basis b : {kSineSine, kCosCos, kVelocityX}) {
    const auto f = random_field(kDir, b, ++seed);
    const auto g = random_field(kDir, b, ++seed);
    const double q = inner_product(f, g);
    EXPECT_NEAR(parseval_inner(to_coeffs(f, b), to_coeffs(g, b)), q, 1e-10 * std::abs(q) + 1e-14);
  }
  const auto f = random_field(kPer, kFourier, 50);
  const double q = inner_product(f, f);
  EXPECT_NEAR(parseval_inner(to_coeffs(f, kFourier), to_coeffs(f, kFourier)), q, 1e-10 * q);
}

TEST(Operators, LaplacianOfEigenfunctions) {
  const auto s = ScalarField::sample(kDir, kSineSine, [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); });
  EXPECT_LE(max_diff(laplacian(s), -2 * pi * pi * s), 1e-11);
  const auto p = ScalarField::sample(kPer, kFourier, [](double x, double y) { return std::cos(2 * pi * x) * std::cos(4 * pi * y); });
  EXPECT_LE(max_diff(laplacian(p), -20 * pi * pi * p), 1e-10);
}

TEST(Operators, AccuracyInitialVelocityIsDivergenceFreeAfterProjection) {
  // The nodal samples of the polynomial vortex are divergence-free only up
  // to the interpolation error, which falls like 1/n; the projected start
  // state is divergence-free to round-off and stays close to the samples.
  double prev = 1e300;
  for (int modes : {32, 64}) {
    const Grid g = grid_for_modes(modes, BoundaryMode::dirichlet);
    const VectorField u0 = accuracy_initial_velocity(g);
    const double raw = divergence(u0).max_abs();
    EXPECT_LT(raw, prev);
    prev = raw;
    const VectorField u = make_initial_state(u0).u;
    EXPECT_LE(divergence(u).max_abs(), 1e-10);
    EXPECT_LE((u - u0).max_abs(), 2e-3 * u0.max_abs());
  }
}

TEST(Operators, VorticityOfStreamFunctionVelocity) {
  // psi = sin(pi x) sin(pi y), u = (-d_y psi, d_x psi)
  const auto u = VectorField::sample(kDir, kVelocityX, kVelocityY, [](double x, double y) {
    return std::array<double, 2>{-pi * std::sin(pi * x) * std::cos(pi * y), pi * std::cos(pi * x) * std::sin(pi * y)};
  });
  const auto psi = ScalarField::sample(kDir, kCosCos, [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); });
  const auto w = vorticity(u);
  for (std::size_t k = 0; k < w.v.size(); ++k) EXPECT_NEAR(w.v[k], -2 * pi * pi * psi.v[k], 1e-11);
}

TEST(Helmholtz, ZeroRightHandSide) {
  EXPECT_EQ(solve_helmholtz(ScalarField(kDir, kSineSine), 0.3).max_abs(), 0.0);
}

TEST(Helmholtz, EigenfunctionSolve) {
  const auto s = ScalarField::sample(kDir, kSineSine, [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); });
  // 1/(1 + 2 pi^2) to 30 digits
  const double factor = 0.0482178471482936680426653700737;
  EXPECT_LE(max_diff(solve_helmholtz(s, 1.0), factor * s), 1e-15);
}

TEST(Helmholtz, ForwardOperatorRecoversRandomRhs) {
  for (const Grid& g : {kDir, kPer}) {
    const auto rhs = random_field(g, momentum_basis(g), 7);
    for (double tau : {1e-3, 0.1, 2.0}) {
      const auto u = solve_helmholtz(rhs, tau);
      const auto back = u - tau * laplacian(u);
      EXPECT_LE(max_diff(back, rhs), 1e-10 * rhs.max_abs()) << tau;
    }
  }
}

TEST(PressurePoisson, ZeroInputAndCosineEigenfunction) {
  EXPECT_EQ(pressure_poisson_solve(ScalarField(kDir, kCosCos), 0.5).max_abs(), 0.0);
  const double tau = 0.25;
  const auto d = ScalarField::sample(kDir, kCosCos, [&](double x, double y) { return tau * std::cos(pi * x) * std::cos(pi * y); });
  const auto phi = pressure_poisson_solve(d, tau);
  const auto expect = ScalarField::sample(kDir, kCosCos, [](double x, double y) { return std::cos(pi * x) * std::cos(pi * y); });
  // -1/(2 pi^2) to 30 digits
  EXPECT_LE(max_diff(phi, -0.0506605918211688857219397316049 * expect), 1e-15);
}

TEST(Projection, KillsDivergenceOnBothGrids) {
  for (const Grid& g : {kDir, kPer}) {
    const bool d = g.mode == BoundaryMode::dirichlet;
    const VectorField ut{random_field(g, d ? kVelocityX : kFourier, 1), random_field(g, d ? kVelocityY : kFourier, 2)};
    const double tau = 0.01;
    const auto pr = project(ut, tau);
    EXPECT_LE(divergence(pr.u).max_abs(), 1e-10);
    // u~ = u + tau grad phi
    const VectorField rebuilt = pr.u + tau * gradient(pr.phi);
    EXPECT_LE((rebuilt - ut).max_abs(), 1e-10);
  }
}

TEST(Projection, DirichletSlotsAreChecked) {
  VectorHat h{spectral_detail::empty_like(kDir, kSineSine), spectral_detail::empty_like(kDir, kSineSine)};
  EXPECT_THROW(project_coeffs(h, 1.0), UsageError);
}

TEST(Leray, FixesDivergenceFreeFields) {
  const auto u = smooth_velocity(kPer, 0.0);
  ASSERT_LE(divergence(u).max_abs(), 1e-11);
  EXPECT_LE((leray_project(u) - u).max_abs(), 1e-12);
}

TEST(Leray, KillsGradients) {
  const auto p = ScalarField::sample(kPer, kFourier, [](double x, double) { return std::cos(2 * pi * x); });
  EXPECT_LE(leray_project(gradient(p)).max_abs(), 1e-12);
}

TEST(Leray, Idempotent) {
  const VectorField u{random_field(kPer, kFourier, 5), random_field(kPer, kFourier, 6)};
  const auto once = leray_project(u);
  EXPECT_LE((leray_project(once) - once).max_abs(), 1e-12);
}

TEST(Leray, DirichletIsUsageError) {
  EXPECT_THROW(leray_project(zero_velocity(kDir)), UsageError);
}

TEST(Convection, ConstantFieldHasNoConvection) {
  VectorField c(kPer, kFourier, kFourier);
  for (double& x : c.x.v) x = 1.5;
  for (double& x : c.y.v) x = -0.5;
  const auto v = smooth_velocity(kPer, 0.3);
  EXPECT_LE(convection(v, c).max_abs(), 1e-13);
}

TEST(Convection, DirectionalDerivative) {
  VectorField v(kPer, kFourier, kFourier);
  for (double& x : v.x.v) x = 1.0;
  const auto u = VectorField::sample(kPer, kFourier, kFourier, [](double x, double) {
    return std::array<double, 2>{std::sin(2 * pi * x), 0.0};
  });
  const auto expect = VectorField::sample(kPer, kFourier, kFourier, [](double x, double) {
    return std::array<double, 2>{2 * pi * std::cos(2 * pi * x), 0.0};
  });
  for (bool dealias : {true, false}) EXPECT_LE((convection(v, u, dealias) - expect).max_abs(), 1e-12);
}

TEST(Convection, SkewSymmetryForDivergenceFreeAdvector) {
  // v divergence-free with v.n = 0; u, w smooth and vanishing on a
  // dirichlet boundary
  for (const Grid& g : {kDir, kPer}) {
    const auto v = smooth_velocity(g, 0.4);
    ASSERT_LE(divergence(v).max_abs(), 1e-10);
    const Basis m = momentum_basis(g);
    int seed = 40;
    for (bool dealias : {true, false}) {
      const VectorField u{smooth_random(g, m, ++seed), smooth_random(g, m, ++seed)};
      const VectorField w{smooth_random(g, m, ++seed), smooth_random(g, m, ++seed)};
      const double su = l2_norm(v) * h1_seminorm(u) * l2_norm(u);
      EXPECT_LE(std::abs(trilinear(v, u, u, dealias)), 1e-8 * su);
      const double s2 = trilinear(v, u, w, dealias) + trilinear(v, w, u, dealias);
      EXPECT_LE(std::abs(s2), 1e-8 * l2_norm(v) * (h1_seminorm(u) * l2_norm(w) + h1_seminorm(w) * l2_norm(u)));
    }
  }
}

TEST(Quadrature, SineProductIntegrals) {
  const auto s = ScalarField::sample(kDir, kSineSine, [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); });
  EXPECT_NEAR(inner_product(s, s), 0.25, 1e-15);
  // pi^2/2 to 30 digits
  EXPECT_NEAR(h1_seminorm(s) * h1_seminorm(s), 4.93480220054467930941724549994, 1e-13);
}

TEST(Quadrature, PositiveDefiniteAndSymmetric) {
  const ScalarField z(kDir, kCosCos);
  EXPECT_EQ(inner_product(z, z), 0.0);
  const auto f = random_field(kDir, kCosCos, 31);
  const auto g = random_field(kDir, kCosCos, 32);
  EXPECT_GT(inner_product(f, f), 0.0);
  EXPECT_DOUBLE_EQ(inner_product(f, g), inner_product(g, f));
}

TEST(Quadrature, GridMismatchIsUsageError) {
  EXPECT_THROW(inner_product(ScalarField(kDir, kCosCos), ScalarField(Grid{16, BoundaryMode::dirichlet}, kCosCos)),
               UsageError);
}
