#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>

#include "tavns/langevin.hpp"

using namespace tavns;

namespace {

/// Gaussian elimination with partial pivoting on a small dense system.
template <std::size_t N>
std::array<double, N> gauss_solve(std::array<std::array<double, N>, N> A, std::array<double, N> b) {
  for (std::size_t c = 0; c < N; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < N; ++r)
      if (std::abs(A[r][c]) > std::abs(A[p][c])) p = r;
    std::swap(A[c], A[p]);
    std::swap(b[c], b[p]);
    for (std::size_t r = c + 1; r < N; ++r) {
      const double f = A[r][c] / A[c][c];
      for (std::size_t k = c; k < N; ++k) A[r][k] -= f * A[c][k];
      b[r] -= f * b[c];
    }
  }
  std::array<double, N> x{};
  for (std::size_t i = N; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < N; ++k) s -= A[i][k] * x[k];
    x[i] = s / A[i][i];
  }
  return x;
}

}  // namespace

TEST(Potential, GradientValues) {
  EXPECT_EQ(grad_v(0.0), 0.0);
  EXPECT_EQ(grad_v(1.0), 0.0);
  EXPECT_EQ(grad_v(2.0), 6.0);
  EXPECT_EQ(potential(1.0), 0.0);
  EXPECT_EQ(potential(0.0), 0.25);
}

TEST(OavStep, FlatPotentialAndNoNoiseIsStationary) {
  const LangevinState s{0.0, 1.7, 1.0};
  const auto n = oav_step(s, 0.0, 0.1);
  EXPECT_EQ(n.x, 0.0);
  EXPECT_EQ(n.xi, 1.7);
}

TEST(OavStep, UnitAuxiliaryFixedWithoutNoise) {
  for (double x : {-3.0, -0.4, 0.8, 2.5, 10.0}) EXPECT_EQ(oav_step({x, 1.0, 1.0}, 0.0, 0.05).xi, 1.0);
}

TEST(OavStep, MatchesCoupledLinearSolve) {
  // unknowns (X', xi'):  X' + a xi' = X + b,   -a X' + xi' = xi + a^2 - a X
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 1000; ++k) {
    const LangevinState s{u(gen), 1.0 + 0.3 * u(gen), 1.0};
    const double dB = 0.3 * u(gen), tau = 0.02 + 0.05 * std::abs(u(gen));
    const double a = tau * grad_v(s.x), b = std::sqrt(2.0) * dB;
    const auto ref = gauss_solve<2>({{{1.0, a}, {-a, 1.0}}}, {s.x + b, s.xi + a * a - a * s.x});
    const auto n = oav_step(s, dB, tau);
    EXPECT_NEAR(n.x, ref[0], 1e-12 * std::max(1.0, std::abs(ref[0])));
    EXPECT_NEAR(n.xi, ref[1], 1e-12 * std::max(1.0, std::abs(ref[1])));
  }
}

TEST(TavStep, FlatPotentialAndNoNoiseIsStationary) {
  const LangevinState s{0.0, 1.2, 0.8};
  const auto n = tav_step(s, 0.0, 0.3);
  EXPECT_EQ(n.x, 0.0);
  EXPECT_EQ(n.xi, 1.2);
  EXPECT_EQ(n.eta, 0.8);
}

TEST(TavStep, MatchesThreeUnknownLinearSolve) {
  // unknowns (X', xi', eta'):
  //   X' + a xi' - b eta' = X
  //   (1 + a^2) xi' - a b eta' = xi + a^2
  //   -a b xi' + (1 + b^2) eta' = eta + b^2
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 1000; ++k) {
    const LangevinState s{u(gen), 1.0 + 0.3 * u(gen), 1.0 + 0.3 * u(gen)};
    const double dB = 0.3 * u(gen), tau = 0.02 + 0.05 * std::abs(u(gen));
    const double a = tau * grad_v(s.x), b = std::sqrt(2.0) * dB;
    const auto ref = gauss_solve<3>({{{1.0, a, -b}, {0.0, 1 + a * a, -a * b}, {0.0, -a * b, 1 + b * b}}},
                                    {s.x, s.xi + a * a, s.eta + b * b});
    const auto n = tav_step(s, dB, tau);
    EXPECT_NEAR(n.x, ref[0], 1e-12 * std::max(1.0, std::abs(ref[0])));
    EXPECT_NEAR(n.xi, ref[1], 1e-12 * std::max(1.0, std::abs(ref[1])));
    EXPECT_NEAR(n.eta, ref[2], 1e-12 * std::max(1.0, std::abs(ref[2])));
  }
}

TEST(TavStep, DeterminantIdentity) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 1000; ++k) {
    const double x = u(gen), dB = u(gen), tau = std::abs(u(gen));
    const double a = tau * grad_v(x), b = std::sqrt(2.0) * dB;
    const double det = (1 + a * a) * (1 + b * b) - (a * b) * (a * b);
    const double expect = 1 + tau * tau * grad_v(x) * grad_v(x) + 2 * dB * dB;
    EXPECT_NEAR(det, expect, 1e-12 * expect);
  }
}

TEST(TavStep, UnitPairFixedWhenCouplingVanishes) {
  // (1,1) is preserved when grad V(X) dB = 0 (the coupling a b drops out)
  for (double x : {-1.0, 0.0, 1.0}) {
    const auto n = tav_step({x, 1.0, 1.0}, 0.37, 0.1);
    EXPECT_DOUBLE_EQ(n.xi, 1.0);
    EXPECT_DOUBLE_EQ(n.eta, 1.0);
  }
  const auto n = tav_step({2.0, 1.0, 1.0}, 0.0, 0.1);
  EXPECT_DOUBLE_EQ(n.xi, 1.0);
  EXPECT_DOUBLE_EQ(n.eta, 1.0);
}

TEST(TavStep, UnitPairDriftsByCouplingTerm) {
  // with a b != 0 the right-hand side differs from A (1,1) by (a b, a b)
  const double x = 2.0, dB = 0.2, tau = 0.1;
  const double a = tau * grad_v(x), b = std::sqrt(2.0) * dB;
  const auto n = tav_step({x, 1.0, 1.0}, dB, tau);
  const double det = 1 + a * a + b * b;
  EXPECT_NEAR(n.xi - 1.0, a * b * (1 + b * b + a * b) / det, 1e-14);
  EXPECT_NEAR(n.eta - 1.0, a * b * (1 + a * a + a * b) / det, 1e-14);
}

TEST(TavStep, EtaContractsTowardOneInFreeMotion) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 1000; ++k) {
    const double eta = 1.0 + u(gen), dB = u(gen);
    const auto n = tav_step({0.0, 1.0, eta}, dB, 0.1);  // grad V(0) = 0
    EXPECT_NEAR(n.eta - 1.0, (eta - 1.0) / (1.0 + 2.0 * dB * dB), 1e-14);
    EXPECT_LE(std::abs(n.eta - 1.0), std::abs(eta - 1.0) + 1e-15);
    EXPECT_NEAR(n.x, std::sqrt(2.0) * n.eta * dB, 1e-14);
  }
}

TEST(ReferenceDensity, SymmetricNormalizedPeakedAtWells) {
  const Density d = reference_density(3.0, 120);
  double mass = 0;
  for (int i = 0; i < d.bins(); ++i) {
    EXPECT_NEAR(d.values[i], d.values[d.bins() - 1 - i], 1e-14);
    mass += d.values[i];
  }
  EXPECT_NEAR(mass * d.dx(), 1.0, 1e-10);
  // bins with centers 0.975 and 1.025 are the largest on the right half
  const auto it = std::max_element(d.values.begin() + 60, d.values.end());
  const int imax = static_cast<int>(it - d.values.begin());
  EXPECT_TRUE(imax == 79 || imax == 80);
  EXPECT_NEAR(std::abs(d.center(imax)), 1.0, d.dx());
}

TEST(ReferenceDensity, MatchesIndependentEvaluation) {
  // numpy: exp(-(c^2-1)^2/4) normalized by sum*dx on 120 bins of [-3, 3]
  const Density d = reference_density(3.0, 120);
  EXPECT_NEAR(d.values[80], 0.32859357399495664, 1e-15);
  EXPECT_NEAR(d.values[60], 0.2561529622178455, 1e-15);
}

TEST(ReferenceDensity, RejectsBadSupport) { EXPECT_THROW(reference_density(0.0, 10), ConfigError); }

TEST(KlDivergence, ZeroForIdenticalDensities) {
  const Density q = reference_density(3.0, 120);
  EXPECT_EQ(kl_divergence(q, q), 0.0);
}

TEST(KlDivergence, TwoBinOracle) {
  const Density p{-1.0, 1.0, {0.75, 0.25}};
  const Density q{-1.0, 1.0, {0.5, 0.5}};
  // 0.75 ln 1.5 + 0.25 ln 0.5
  EXPECT_NEAR(kl_divergence(p, q), 0.13081203594113697, 1e-15);
}

TEST(KlDivergence, NonNegativeOnRandomHistograms) {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> bin(0, 29);
  for (int k = 0; k < 100; ++k) {
    Histogram h{-3.0, 3.0, std::vector<long>(30, 0), 0};
    for (int s = 0; s < 500; ++s) ++h.counts[bin(gen)];
    EXPECT_GE(kl_divergence(h.density(), reference_density(3.0, 30)), 0.0);
  }
}

TEST(KlDivergence, ReferenceFloorOnEmptyBins) {
  const Density p{-1.0, 1.0, {1.0, 0.0}};
  const Density q{-1.0, 1.0, {0.0, 1.0}};
  EXPECT_NEAR(kl_divergence(p, q), -std::log(1e-12), 1e-9);
}

TEST(KlDivergence, MismatchedBinningIsUsageError) {
  EXPECT_THROW(kl_divergence(reference_density(3.0, 120), reference_density(3.0, 60)), UsageError);
  EXPECT_THROW(kl_divergence(reference_density(3.0, 60), reference_density(2.0, 60)), UsageError);
}

TEST(Histogram, SingleSpikeOracle) {
  Histogram h{-3.0, 3.0, std::vector<long>(120, 0), 0};
  h.add(1.01);
  EXPECT_EQ(h.counts[80], 1);
  // numpy: all mass in the bin centered at 1.025
  EXPECT_NEAR(kl_divergence(h.density(), reference_density(3.0, 120)), 4.108665902830333, 1e-12);
}

TEST(Histogram, OutsideSamplesKeepTheirMass) {
  Histogram h{-1.0, 1.0, std::vector<long>(2, 0), 0};
  h.add(-0.5);
  h.add(5.0);
  EXPECT_EQ(h.outside, 1);
  EXPECT_DOUBLE_EQ(h.density().values[0], 0.5);
}

TEST(LangevinConfig, Validation) {
  LangevinConfig c;
  c.tau = 0.3;
  EXPECT_THROW(validate(c), ConfigError);
  c.tau = 0.1;
  c.n_paths = 0;
  EXPECT_THROW(validate(c), ConfigError);
}

TEST(LangevinStudy, SinglePathIsFiniteSpike) {
  LangevinConfig c;
  c.n_paths = 1;
  c.tau = c.T / 3200;
  c.x0_scale = 1.0;
  const auto r = run_langevin_study(c, LangevinMethod::tav, 3);
  EXPECT_EQ(r.histogram.in_range() + r.histogram.outside + r.blown_up, 1);
  EXPECT_TRUE(std::isfinite(r.kl));
}

TEST(LangevinStudy, DeterministicAcrossThreadCounts) {
  LangevinConfig c;
  c.n_paths = 2000;
  c.tau = c.T / 400;
  c.threads = 1;
  const auto a = run_langevin_study(c, LangevinMethod::tav, 9);
  c.threads = 3;
  const auto b = run_langevin_study(c, LangevinMethod::tav, 9);
  EXPECT_EQ(a.histogram.counts, b.histogram.counts);
  EXPECT_EQ(a.kl, b.kl);
  EXPECT_EQ(a.blown_up, b.blown_up);
}

TEST(LangevinStudy, SharedInitialDrawsAcrossMethods) {
  LangevinConfig c;
  EXPECT_EQ(langevin_x0(c, 4, 17), langevin_x0(c, 4, 17));
  for (long p = 0; p < 1000; ++p) EXPECT_LE(std::abs(langevin_x0(c, 4, p)), c.x0_clip);
}

TEST(LangevinStudy, NonFinitePathsAreReported) {
  LangevinConfig c;
  c.n_paths = 200;
  c.tau = c.T / 200;
  const auto r = run_langevin_study(c, LangevinMethod::oav, 1);
  ASSERT_GT(r.blown_up, 0);
  EXPECT_GE(r.first_blown_path, 0);
  EXPECT_GE(r.first_blown_step, 1);
  EXPECT_EQ(r.histogram.in_range() + r.histogram.outside + r.blown_up, c.n_paths);
}

TEST(LangevinStudy, FineStepMatchesGibbsDensity) {
  // full ensemble at tau = T/3200: KL <= 0.005 for both methods
  LangevinConfig c;
  c.tau = c.T / 3200;
  for (LangevinMethod m : {LangevinMethod::oav, LangevinMethod::tav}) {
    const auto r = run_langevin_study(c, m, 1);
    EXPECT_LE(r.kl, 0.005) << to_string(m);
  }
}

TEST(LangevinStudy, TavAtT800WithinBandOfPublishedValue) {
  // published value 0.0020, factor-3 band either way
  LangevinConfig c;
  c.tau = c.T / 800;
  const auto r = run_langevin_study(c, LangevinMethod::tav, 1);
  EXPECT_GE(r.kl, 0.0020 / 3);
  EXPECT_LE(r.kl, 0.0020 * 3);
}
