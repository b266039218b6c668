#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hflow/directions.hpp"
#include "hflow/lemmas.hpp"
#include "hflow/nehari.hpp"
#include "oracles.hpp"

using namespace hflow;

namespace {

// Fiber maximum of the cutoff polynomial from its exact coefficients:
// A^3 / (24 B^2) = 15657036009472 / 15069796875.
constexpr double kCutoffPolyFiberMax = 15657036009472.0 / 15069796875.0;

}  // namespace

TEST(FiberingCoeffs, ZeroField) {
  const auto c = fibering_coeffs(VectorField(make_grid(7)), 1.0);
  EXPECT_EQ(c.A, 0.0);
  EXPECT_EQ(c.B, 0.0);
}

TEST(FiberingCoeffs, PolynomialMatchesSymbolicIntegrals) {
  const auto c = fibering_coeffs(sample<WithTrace>(oracle::poly, make_grid(63)), 1.0);
  EXPECT_NEAR(c.A, oracle::kPolyA, 1e-3 * oracle::kPolyA);
  EXPECT_NEAR(c.B, oracle::kPolyB, 1e-3 * std::abs(oracle::kPolyB));
}

TEST(FiberingCoeffs, DoublingScalesExactly) {
  const auto u = random_bandlimited_field(make_grid(31), RandomFieldSpec{3});
  const auto c1 = fibering_coeffs(u, 1.3), c2 = fibering_coeffs(2.0 * u, 1.3);
  EXPECT_EQ(c2.A, 4.0 * c1.A);
  EXPECT_EQ(c2.B, 8.0 * c1.B);
}

TEST(FiberingCoeffs, PolynomialsReproduceDirectEvaluation) {
  const auto u = random_bandlimited_field(make_grid(31), RandomFieldSpec{4});
  const auto c = fibering_coeffs(u, 0.8);
  for (double s : {0.3, 1.0, 2.7}) {
    const auto v = s * u;
    const double scale = s * s * c.A + std::abs(s * s * s * c.B);
    EXPECT_NEAR(c.energy(s), energy_E(v, 0.8), 1e-13 * scale);
    EXPECT_NEAR(c.nehari(s), nehari_D(v, 0.8), 1e-13 * scale);
    EXPECT_NEAR(c.nehari_delta(s, 0.6), nehari_D_delta(v, 0.8, 0.6), 1e-13 * scale);
  }
}

TEST(LambdaStar, HandExamples) {
  const FiberingCoefficients unit{1.0, -0.5};
  EXPECT_DOUBLE_EQ(lambda_star(unit), 1.0);
  EXPECT_DOUBLE_EQ(fiber_max_energy(unit), 1.0 / 6.0);

  const FiberingCoefficients poly{oracle::kPolyA, oracle::kPolyB};
  EXPECT_DOUBLE_EQ(lambda_star(poly), 16.0 / 3.0);
  EXPECT_DOUBLE_EQ(fiber_max_energy(poly), 1024.0 / 81.0);
  EXPECT_NEAR(fiber_max_energy(poly), 12.642, 1e-3);
}

TEST(LambdaStar, NoMaximizerWithoutNegativeVolume) {
  EXPECT_THROW(lambda_star(FiberingCoefficients{1.0, 1.0}), NoMaximizerError);
  EXPECT_THROW(lambda_star(FiberingCoefficients{1.0, 0.0}), NoMaximizerError);
  EXPECT_THROW(lambda_star(FiberingCoefficients{0.0, -1.0}), NoMaximizerError);
}

TEST(ProjectNehariDelta, Examples) {
  const FiberingCoefficients poly{8.0 / 3.0, -0.25};
  EXPECT_DOUBLE_EQ(project_nehari_delta(poly, 1.0), lambda_star(poly));
  EXPECT_DOUBLE_EQ(project_nehari_delta(poly, 0.5), 8.0 / 3.0);
  for (double d : {0.1, 0.4, 0.9, 1.3}) {
    EXPECT_DOUBLE_EQ(project_nehari_delta(poly, d) / lambda_star(poly), d);
    const double l = project_nehari_delta(poly, d);
    EXPECT_NEAR(poly.nehari_delta(l, d), 0.0, 1e-12 * l * l * poly.A);
    EXPECT_NEAR(poly.energy(l), a_of_delta(d) * l * l * poly.A, 1e-12 * l * l * poly.A);
  }
  EXPECT_THROW(project_nehari_delta(poly, 1.5), DomainError);
  EXPECT_THROW(project_nehari_delta(FiberingCoefficients{1.0, 0.5}, 0.5), NoMaximizerError);
}

TEST(DepthCurve, Values) {
  const double d = 4.2;
  EXPECT_DOUBLE_EQ(d_of_delta(1.0, d), d);
  EXPECT_EQ(d_of_delta(1.5, d), 0.0);
  EXPECT_DOUBLE_EQ(d_of_delta(0.5, d), d / 2.0);
  EXPECT_THROW(d_of_delta(0.0, d), DomainError);
  EXPECT_THROW(d_of_delta(1.6, d), DomainError);
  EXPECT_THROW(d_of_delta(0.5, 0.0), DomainError);
}

TEST(DepthCurve, MonotoneOnEachSideOfOne) {
  double prev = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double v = d_of_delta(k / 100.0, 1.0);
    EXPECT_GT(v, prev);
    prev = v;
  }
  for (int k = 101; k <= 150; ++k) {
    const double v = d_of_delta(k / 100.0, 1.0);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(DeltaRoots, Examples) {
  EXPECT_EQ(delta_roots(3.0, 3.0), (std::pair{1.0, 1.0}));
  const auto [a, b] = delta_roots(1.5, 3.0);
  // (3 - 2 s) s^2 = 1/2 factors as -2 (s - 1/2)(s^2 - s - 1/2)
  EXPECT_NEAR(a, 0.5, 1e-11);
  EXPECT_NEAR(b, (1.0 + std::sqrt(3.0)) / 2.0, 1e-11);
  const auto [lo, hi] = delta_roots(1e-9, 1.0);
  EXPECT_LT(lo, 1e-3);
  EXPECT_GT(hi, 1.5 - 1e-3);
}

TEST(DeltaRoots, RootsSolveTheCubic) {
  for (double r : {0.01, 0.2, 0.5, 0.9, 0.999}) {
    const auto [a, b] = delta_roots(r * 2.0, 2.0);
    EXPECT_LT(a, 1.0);
    EXPECT_GT(b, 1.0);
    EXPECT_NEAR(d_of_delta(a, 2.0), 2.0 * r, 1e-10);
    EXPECT_NEAR(d_of_delta(b, 2.0), 2.0 * r, 1e-10);
  }
}

TEST(DeltaRoots, OutsideRangeIsRejected) {
  EXPECT_THROW(delta_roots(0.0, 1.0), DomainError);
  EXPECT_THROW(delta_roots(-1.0, 1.0), DomainError);
  EXPECT_THROW(delta_roots(1.1, 1.0), DomainError);
}

TEST(EstimateD, SingleCutoffPolynomialDirection) {
  const auto g = make_grid(127);
  const std::vector<Direction> family{{"cutoff poly", sample(oracle::cutoff_poly, g)}};
  const auto wp = estimate_d(1.0, g, family);
  EXPECT_NEAR(wp.d, kCutoffPolyFiberMax, 1e-2 * kCutoffPolyFiberMax);
  EXPECT_EQ(wp.best_index, 0u);
  EXPECT_EQ(wp.provenance, "direction family");
}

TEST(EstimateD, BubbleFamilyBandAndMonotonicity) {
  const auto g = make_grid(63);
  const auto wp = estimate_d(1.0, g);
  const double sphere = oracle::sphere_depth(1.0);
  EXPECT_GE(wp.d, 0.98 * sphere);
  EXPECT_LE(wp.d, 1.25 * sphere);
  ASSERT_EQ(wp.members.size(), 12u);
  for (std::size_t k = 1; k < wp.members.size(); ++k) {
    ASSERT_TRUE(wp.members[k].fiber_max.has_value());
    EXPECT_LE(*wp.members[k].fiber_max, *wp.members[k - 1].fiber_max) << k;
  }
  EXPECT_EQ(wp.best_index, 11u);
  EXPECT_FALSE(wp.provenance.empty());
}

TEST(EstimateD, DepthScalesAsInverseSquareOfH) {
  const auto g = make_grid(31);
  const double d1 = estimate_d(1.0, g).d;
  const double d2 = estimate_d(2.0, g).d;
  EXPECT_NEAR(d2, d1 / 4.0, 1e-12 * d1);
  EXPECT_GE(d2, 0.98 * oracle::sphere_depth(2.0));
  EXPECT_NEAR(oracle::sphere_depth(2.0), 1.0472, 1e-4);
}

TEST(EstimateD, EmptyOrPositiveVolumeFamilyIsAnError) {
  const auto g = make_grid(15);
  EXPECT_THROW(estimate_d(1.0, g, std::span<const Direction>{}), EstimationError);
  const std::vector<Direction> flat{{"single component", eigenmode_field(g, EigenmodeSpec{})}};
  EXPECT_THROW(estimate_d(1.0, g, flat), EstimationError);
  EXPECT_THROW(estimate_d(1.0, g, BubbleFamilySpec{0.5, 0.5, 0}), EstimationError);
  EXPECT_THROW(estimate_d(0.0, g), DomainError);
}

TEST(FiberProperties, SignChangeAndMaximum) {
  const auto g = make_grid(63);
  auto dirs = random_corpus(g, 99, 5, 4);
  dirs.push_back(bubble_field(g, BubbleSpec{0.4, 0.55, 0.08}, 1.0));
  for (const auto& u : dirs) {
    const auto c = fibering_coeffs(u, 1.0);
    ASSERT_LT(c.B, 0.0);
    const double ls = lambda_star(c);
    const double scale = c.A * ls * ls;
    EXPECT_GT(nehari_D(0.5 * ls * u, 1.0), 0.0);
    EXPECT_LE(std::abs(nehari_D(ls * u, 1.0)), 1e-8 * scale);
    EXPECT_LT(nehari_D(2.0 * ls * u, 1.0), 0.0);
    const double top = energy_E(ls * u, 1.0);
    EXPECT_NEAR(top, fiber_max_energy(c), 1e-12 * top);
    for (double m : {0.25, 0.5, 2.0, 4.0}) EXPECT_GE(top, energy_E(m * ls * u, 1.0));
    // g(s) = 3 s^2 - 2 s^3 along the normalised fiber: g(4) = -80
    EXPECT_NEAR(energy_E(4.0 * ls * u, 1.0), -80.0 * top, 1e-10 * top);
    EXPECT_NEAR(energy_E(1e-6 * ls * u, 1.0), 0.0, 1e-10 * top);
  }
}

TEST(FiberProperties, GoldenSectionFindsLambdaStar) {
  const auto g = make_grid(31);
  for (const auto& u : random_corpus(g, 5, 4, 4)) {
    const double ls = lambda_star(fibering_coeffs(u, 1.0));
    EXPECT_NEAR(fiber_argmax(u, 1.0), ls, 1e-6 * ls);
  }
}

TEST(FiberProperties, ProjectedNormAtLeastR1) {
  const auto g = make_grid(63);
  auto corpus = random_corpus(g, 31, 10, 4);
  for (auto& d : bubble_family(g, 1.0, BubbleFamilySpec{})) corpus.push_back(std::move(d.field));
  const double r1 = r_of_delta(1.0, 1.0);
  for (const auto& u : corpus) {
    const auto c = fibering_coeffs(u, 1.0);
    EXPECT_GE(lambda_star(c) * std::sqrt(c.A), 0.98 * r1);
  }
}

TEST(LambdaSampling, OrderingAndMonotonicity) {
  const auto g = make_grid(31);
  const auto wp = estimate_d(1.0, g);
  const auto samples = lambda_samples(g, 1.0, 17, 20);
  ASSERT_EQ(samples.size(), 32u);
  const auto e1 = sample_lambda_Lambda(1.01 * wp.d, wp.d, 1.0, samples);
  EXPECT_GT(e1.lambda_hat, 0.0);
  EXPECT_LE(e1.lambda_hat, e1.Lambda_hat);
  EXPECT_TRUE(std::isfinite(e1.Lambda_hat));
  EXPECT_GE(e1.kept, 1u);
  const auto e2 = sample_lambda_Lambda(2.02 * wp.d, wp.d, 1.0, samples);
  EXPECT_LE(e2.lambda_hat, e1.lambda_hat);
  EXPECT_GE(e2.Lambda_hat, e1.Lambda_hat);
  EXPECT_GE(e2.kept, e1.kept);
}

TEST(LambdaSampling, SingleDirectionGivesEqualEstimates) {
  const auto g = make_grid(31);
  const std::vector<VectorField> one{bubble_field(g, BubbleSpec{}, 1.0)};
  const double fm = fiber_max_energy(fibering_coeffs(one[0], 1.0));
  const auto e = sample_lambda_Lambda(1.1 * fm, 0.9 * fm, 1.0, one);
  EXPECT_EQ(e.lambda_hat, e.Lambda_hat);
  EXPECT_EQ(e.kept, 1u);
}

TEST(LambdaSampling, Errors) {
  const auto g = make_grid(31);
  const std::vector<VectorField> one{bubble_field(g, BubbleSpec{}, 1.0)};
  const double fm = fiber_max_energy(fibering_coeffs(one[0], 1.0));
  EXPECT_THROW(sample_lambda_Lambda(1.0, 1.0, 1.0, one), DomainError);
  EXPECT_THROW(sample_lambda_Lambda(0.5 * fm, 0.4 * fm, 1.0, one), EstimationError);
}
