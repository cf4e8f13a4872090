#include <cmath>

#include <gtest/gtest.h>

#include "wkbspec/oracle.hpp"

using namespace wkbspec;

namespace {
const UnitsContext kUnits;
double relative(double a, double b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST(RadialGrid, Validation) {
  EXPECT_THROW(RadialGrid(0.0, 1.0, 400, GridSpacing::Uniform), InvalidArgument);
  EXPECT_THROW(RadialGrid(2.0, 1.0, 400, GridSpacing::Uniform), InvalidArgument);
  EXPECT_THROW(RadialGrid(0.1, 1.0, 100, GridSpacing::Uniform), InvalidArgument);
  RadialGrid g(1e-3, 10.0, 200, GridSpacing::Logarithmic);
  auto r = g.nodes();
  EXPECT_GT(r.front(), 1e-3);
  EXPECT_LT(r.back(), 10.0);
  EXPECT_NEAR(std::log(r[1] / r[0]), std::log(r[101] / r[100]), 1e-12);
  EXPECT_EQ(g.refined().points, 401);
}

// A Dirichlet wall at r_min lifts the ground state by about u'(0)^2 r_min / 2 = 2 r_min.
TEST(DiagonalizeRadial, CoulombUniformGrid) {
  RadialGrid grid(1e-8, 60.0, 4000, GridSpacing::Uniform);
  auto res = diagonalize_radial(PotentialSpec::coulomb(1.0), 0, CentrifugalVariant::Ll1, kUnits, grid, 1);
  EXPECT_NEAR(res.eigenvalues[0], -0.5, 1e-4);
  EXPECT_TRUE(std::isfinite(res.refinement_estimate[0]));
}

// The (l+1/2)^2 operator at l = 0 is -1/r + 1/(8 r^2), whose exact ground
// state is -1/(2 (s+1)^2) with s(s+1) = 1/4.
TEST(DiagonalizeRadial, CoulombLangerVariantHasItsOwnLimit) {
  RadialGrid grid(1e-4, 60.0, 4000, GridSpacing::Uniform);
  auto res = diagonalize_radial(PotentialSpec::coulomb(1.0), 0, CentrifugalVariant::LangerHalfSquared, kUnits, grid, 1);
  const double s = 0.5 * (std::sqrt(2.0) - 1.0);
  EXPECT_NEAR(res.eigenvalues[0], -0.5 / ((s + 1) * (s + 1)), 1e-3);
  EXPECT_EQ(res.centrifugal_variant, CentrifugalVariant::LangerHalfSquared);
}

TEST(DiagonalizeRadial, OscillatorLowestThree) {
  auto spec = PotentialSpec::oscillator(1.0);
  auto res = diagonalize_radial(spec, 0, CentrifugalVariant::Ll1, kUnits, suggest_grid(spec, 0, kUnits, 3), 3);
  ASSERT_EQ(res.eigenvalues.size(), 3u);
  EXPECT_NEAR(res.eigenvalues[0], 1.5, 1e-4);
  EXPECT_NEAR(res.eigenvalues[1], 3.5, 1e-4);
  EXPECT_NEAR(res.eigenvalues[2], 5.5, 1e-4);
  EXPECT_LT(res.eigenvalues[0], res.eigenvalues[1]);
  EXPECT_LT(res.eigenvalues[1], res.eigenvalues[2]);
}

TEST(DiagonalizeRadial, ReproducesAnalyticLevels) {
  auto coulomb = PotentialSpec::coulomb(1.0);
  auto osc = PotentialSpec::oscillator(1.0);
  for (int l = 0; l <= 2; ++l) {
    auto c = diagonalize_radial(coulomb, l, CentrifugalVariant::Ll1, kUnits, suggest_grid(coulomb, l, kUnits, 4), 4);
    auto o = diagonalize_radial(osc, l, CentrifugalVariant::Ll1, kUnits, suggest_grid(osc, l, kUnits, 4), 4);
    for (int n = 0; n < 4; ++n) {
      const double N = n + l + 1;
      EXPECT_LT(relative(c.eigenvalues[n], -0.5 / (N * N)), 1e-4) << "coulomb n_r=" << n << " l=" << l;
      EXPECT_LT(relative(o.eigenvalues[n], 2.0 * n + l + 1.5), 1e-4) << "oscillator n_r=" << n << " l=" << l;
    }
  }
}

TEST(DiagonalizeRadial, SecondOrderConvergence) {
  auto spec = PotentialSpec::coulomb(1.0);
  RadialGrid grid = suggest_grid(spec, 0, kUnits, 1, 1000);
  const double e1 = finite_difference_levels(spec, 0, CentrifugalVariant::Ll1, kUnits, grid, 1)[0];
  const double e2 = finite_difference_levels(spec, 0, CentrifugalVariant::Ll1, kUnits, grid.refined(), 1)[0];
  const double ratio = (e1 + 0.5) / (e2 + 0.5);
  EXPECT_GE(ratio, 3.0);
  EXPECT_LE(ratio, 5.0);
}

TEST(DiagonalizeRadial, WidensOnceThenGivesUp) {
  auto spec = PotentialSpec::oscillator(1.0);
  // r_max = 2 is still too short after one doubling; 5 is fine after one
  RadialGrid tight(1e-12, 2.0, 400, GridSpacing::Logarithmic);
  EXPECT_THROW(diagonalize_radial(spec, 0, CentrifugalVariant::Ll1, kUnits, tight, 1), DomainTooSmall);
  RadialGrid almost(1e-12, 5.0, 2000, GridSpacing::Logarithmic);
  auto res = diagonalize_radial(spec, 0, CentrifugalVariant::Ll1, kUnits, almost, 1);
  EXPECT_GT(res.grid.r_max, 5.0);
  EXPECT_NEAR(res.eigenvalues[0], 1.5, 1e-4);
}

TEST(DiagonalizeRadial, QuadratureAgreesWithOracleLimitForExactCases) {
  auto coulomb = PotentialSpec::coulomb(1.0);
  auto osc = PotentialSpec::oscillator(1.0);
  auto c = diagonalize_radial(coulomb, 1, CentrifugalVariant::Ll1, kUnits, suggest_grid(coulomb, 1, kUnits, 3), 3);
  auto o = diagonalize_radial(osc, 1, CentrifugalVariant::Ll1, kUnits, suggest_grid(osc, 1, kUnits, 3), 3);
  for (int n = 0; n < 3; ++n) {
    EXPECT_LT(relative(quantize_2tp(coulomb, QuantumNumbers(n, 1)).energy, c.eigenvalues[n]), 1e-4);
    EXPECT_LT(relative(quantize_2tp(osc, QuantumNumbers(n, 1)).energy, o.eigenvalues[n]), 1e-4);
  }
}

TEST(CompareMethods, CoulombAllAgree) {
  auto rows = compare_methods(PotentialSpec::coulomb(1.0), 0, 0, 2, kUnits);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    ASSERT_TRUE(r.closed && r.quadrature && r.oracle_ll1 && r.oracle_langer);
    EXPECT_LT(std::abs(*r.delta_quadrature()), 1e-3);
    EXPECT_LT(std::abs(*r.delta_oracle_ll1()), 1e-3);
    EXPECT_FALSE(r.closed_alt.has_value());
  }
}

TEST(CompareMethods, MorseReportsBothClosedForms) {
  auto rows = compare_methods(PotentialSpec::morse(1.0, 1.0, 1.0), 0, 0, 0, kUnits);
  ASSERT_EQ(rows.size(), 1u);
  ASSERT_TRUE(rows[0].closed && rows[0].closed_alt && rows[0].quadrature);
  EXPECT_NEAR(*rows[0].closed, -0.41789322, 1e-8);
  EXPECT_NEAR(*rows[0].closed_alt, -std::pow(1.0 - 1.5 / std::sqrt(2.0), 2), 1e-15);
  EXPECT_NEAR(*rows[0].delta_closed_alt(), 0.414, 1e-3);
  EXPECT_NEAR(*rows[0].delta_quadrature(), 0.0, 1e-8);
}

TEST(CompareMethods, MissingCellsCarryErrors) {
  // v0 = 1, r0 = 1 binds only N = 1; n_r = 1 is unbound everywhere
  auto rows = compare_methods(PotentialSpec::hulthen(1.0, 1.0), 0, 1, 1, kUnits);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_FALSE(rows[0].closed.has_value());
  EXPECT_FALSE(rows[0].quadrature.has_value());
  EXPECT_FALSE(rows[0].errors.empty());
}
