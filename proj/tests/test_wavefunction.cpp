#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "wkbspec/wavefunction.hpp"

using namespace wkbspec;
using std::numbers::pi;

namespace {

const UnitsContext kUnits;

struct Solved {
  EnergyLevel level;
  TurningStructure structure;
};

Solved solve(const PotentialSpec& spec, int n_r, int l) {
  auto level = quantize_2tp(spec, QuantumNumbers(n_r, l));
  auto st = find_turning_structure(spec, level.M2, level.energy, kUnits, default_domain(spec, level.M2, kUnits));
  return {level, st};
}

}  // namespace

TEST(StandingWave, Examples) {
  EXPECT_DOUBLE_EQ(radial_standing_wave(-0.5, 0, kUnits, 0.0), 1.0);
  EXPECT_NEAR(radial_standing_wave(-0.5, 1, kUnits, 0.0), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(radial_standing_wave(-0.5, 0, kUnits, pi), -1.0);
  EXPECT_THROW(radial_standing_wave(0.5, 0, kUnits, 1.0), InvalidArgument);
}

TEST(StandingWave, ParityAboutPhaseOrigin) {
  for (int n = 0; n < 6; ++n)
    for (double r : {0.1, 0.7, 2.3}) {
      const double plus = radial_standing_wave(-0.5, n, kUnits, r);
      const double minus = radial_standing_wave(-0.5, n, kUnits, -r);
      if (n % 2 == 0) EXPECT_NEAR(plus, minus, 1e-14);
      else EXPECT_NEAR(plus, -minus, 1e-14);
    }
}

// Independent values at 30 digits: phase S(r) from r1 and cos(S - pi/4) / sqrt(p).
TEST(FullWKB, CoulombGroundStateReferenceValues) {
  auto spec = PotentialSpec::coulomb(1.0);
  auto st = find_turning_structure(spec, 0.25, -0.5, kUnits, default_domain(spec, 0.25, kUnits));
  EXPECT_NEAR(full_wkb_radial(spec, 0.25, -0.5, kUnits, st, 1.0), 1.0121832399826014572, 1e-11);
  EXPECT_NEAR(full_wkb_radial(spec, 0.25, -0.5, kUnits, st, 0.5), 0.82133580257592188639, 1e-11);
  EXPECT_NEAR(full_wkb_radial(spec, 0.25, -0.5, kUnits, st, 1.5), 1.1370715504584744537, 1e-11);
  EffectiveMomentumSquared p2{spec, 0.25, -0.5, kUnits};
  EXPECT_NEAR(cumulative_action(p2, st.intervals[0].left, 1.0), 1.1278247915835880833, 1e-12);
}

TEST(FullWKB, AmplitudeIsInverseRootMomentumWherePhaseIsQuarterPi) {
  auto spec = PotentialSpec::oscillator(1.0);
  auto [level, st] = solve(spec, 2, 0);
  EffectiveMomentumSquared p2{spec, level.M2, level.energy, kUnits};
  const double left = st.intervals[0].left;
  auto phase = [&](double r) { return cumulative_action(p2, left, r) - pi / 4; };
  double a = left + 1e-2 * st.intervals[0].width(), b = st.intervals[0].midpoint();
  ASSERT_LT(phase(a), 0.0);
  ASSERT_GT(phase(b), 0.0);
  for (int i = 0; i < 200; ++i) {
    double m = 0.5 * (a + b);
    (phase(m) < 0.0 ? a : b) = m;
  }
  const double r = 0.5 * (a + b);
  EXPECT_NEAR(full_wkb_radial(spec, level.M2, level.energy, kUnits, st, r), 1.0 / std::sqrt(std::sqrt(p2(r))), 1e-10);
}

TEST(FullWKB, RefusesTurningPointBandAndForbiddenRegion) {
  auto spec = PotentialSpec::coulomb(1.0);
  auto [level, st] = solve(spec, 0, 0);
  const auto& iv = st.intervals[0];
  const double band = turning_point_band(iv);
  EXPECT_THROW(full_wkb_radial(spec, level.M2, level.energy, kUnits, st, iv.left + 0.5 * band), TurningPointProximity);
  EXPECT_THROW(full_wkb_radial(spec, level.M2, level.energy, kUnits, st, iv.right - 0.5 * band), TurningPointProximity);
  EXPECT_THROW(full_wkb_radial(spec, level.M2, level.energy, kUnits, st, iv.right * 2.0), InvalidArgument);
  // grows towards the turning point, like p^(-1/2)
  const double near = std::abs(full_wkb_radial(spec, level.M2, level.energy, kUnits, st, iv.right - 1.01 * band));
  const double mid = std::abs(full_wkb_radial(spec, level.M2, level.energy, kUnits, st, iv.midpoint()));
  EXPECT_GT(near, mid);
}

TEST(SampleFullWKB, EqualPhaseGridIsIncreasingAndFinite) {
  auto spec = PotentialSpec::coulomb(1.0);
  auto [level, st] = solve(spec, 3, 1);
  auto sample = sample_full_wkb(spec, level, kUnits, st, 1024);
  ASSERT_EQ(sample.grid.size(), 1024u);
  const double band = turning_point_band(st.intervals[0]);
  EXPECT_NEAR(sample.grid.front(), st.intervals[0].left + band, 1e-12);
  EXPECT_NEAR(sample.grid.back(), st.intervals[0].right - band, 1e-9);
  for (std::size_t i = 0; i + 1 < sample.grid.size(); ++i) EXPECT_LT(sample.grid[i], sample.grid[i + 1]);
  for (double v : sample.values) EXPECT_TRUE(std::isfinite(v));
  // equal spacing in phase
  EffectiveMomentumSquared p2{spec, level.M2, level.energy, kUnits};
  const double left = st.intervals[0].left;
  const double step = (cumulative_action(p2, left, sample.grid.back()) - cumulative_action(p2, left, sample.grid.front())) / 1023;
  for (std::size_t i : {1u, 100u, 511u, 1000u})
    EXPECT_NEAR(cumulative_action(p2, left, sample.grid[i]) - cumulative_action(p2, left, sample.grid[i - 1]), step, 1e-9);
}

TEST(CountNodes, MatchesRadialNumber) {
  for (auto spec : {PotentialSpec::coulomb(1.0), PotentialSpec::oscillator(1.0)})
    for (int l = 0; l <= 1; ++l)
      for (int n = 0; n <= 4; ++n) {
        auto [level, st] = solve(spec, n, l);
        EXPECT_EQ(count_nodes(sample_full_wkb(spec, level, kUnits, st)), n)
            << to_string(spec.kind()) << " n_r=" << n << " l=" << l;
      }
}

TEST(CountNodes, CoulombSecondExcitedOnDenseGrid) {
  auto spec = PotentialSpec::coulomb(1.0);
  auto [level, st] = solve(spec, 2, 0);
  EXPECT_EQ(count_nodes(sample_full_wkb(spec, level, kUnits, st, 10000)), 2);
}

TEST(CountNodes, ConstantSignAndUndersampling) {
  WavefunctionSample flat;
  flat.grid = {0.0, 1.0, 2.0, 3.0};
  flat.values = {1.0, 2.0, 0.5, 3.0};
  EXPECT_EQ(count_nodes(flat), 0);

  WavefunctionSample coarse;
  coarse.grid = {0.0, 1.0, 2.0};
  coarse.values = {1.0, -1.0, 1.0};
  coarse.local_momentum = {3.0, 3.0, 3.0};
  EXPECT_THROW(count_nodes(coarse), Undersampled);
}

TEST(Normalize, UnitNormAndScaleInvariance) {
  auto spec = PotentialSpec::oscillator(1.0);
  auto [level, st] = solve(spec, 1, 0);
  auto sample = sample_full_wkb(spec, level, kUnits, st, 2048);
  auto normalized = normalize_on_interval(sample);
  double norm = 0.0;
  for (std::size_t i = 0; i + 1 < normalized.grid.size(); ++i)
    norm += 0.5 * (std::pow(normalized.values[i], 2) + std::pow(normalized.values[i + 1], 2)) *
            (normalized.grid[i + 1] - normalized.grid[i]);
  EXPECT_NEAR(norm, 1.0, 1e-6);

  auto scaled = sample;
  for (double& v : scaled.values) v *= 7.0;
  auto renormalized = normalize_on_interval(scaled);
  for (std::size_t i = 0; i < renormalized.values.size(); ++i)
    EXPECT_NEAR(renormalized.values[i], normalized.values[i], 1e-12);
}

TEST(Normalize, ZeroSampleIsDegenerate) {
  WavefunctionSample zero;
  zero.grid = {0.0, 1.0, 2.0};
  zero.values = {0.0, 0.0, 0.0};
  EXPECT_THROW(normalize_on_interval(zero), DegenerateSample);
}

TEST(SampleCsv, HeaderAndRows) {
  auto spec = PotentialSpec::coulomb(1.0);
  auto [level, st] = solve(spec, 0, 0);
  auto sample = sample_full_wkb(spec, level, kUnits, st, 16);
  std::ostringstream os;
  write_sample_csv(os, sample);
  std::istringstream in(os.str());
  std::string header, columns;
  std::getline(in, header);
  std::getline(in, columns);
  EXPECT_EQ(header.rfind("# n_r=0 l=0 m_z=0 method=quadrature form=full-wkb", 0), 0u) << header;
  EXPECT_EQ(columns, "r,psi");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 16);
}
