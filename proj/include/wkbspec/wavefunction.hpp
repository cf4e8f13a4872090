#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "wkbspec/core.hpp"
#include "wkbspec/quadrature.hpp"
#include "wkbspec/quantizer.hpp"

namespace wkbspec {

enum class WavefunctionForm { ElementaryStandingWave, FullWKB };

inline const char* to_string(WavefunctionForm f) {
  return f == WavefunctionForm::FullWKB ? "full-wkb" : "standing-wave";
}

struct WavefunctionSample {
  std::vector<double> grid;
  std::vector<double> values;
  QuantumNumbers qn{0, 0};
  WavefunctionForm form = WavefunctionForm::FullWKB;
  TurningInterval allowed_interval;
  double energy = 0.0;
  QuantizationMethod method = QuantizationMethod::Quadrature2TP;
  /// Local momentum p(r) at each grid point, used for the resolution check.
  /// Empty when unknown; the check is then skipped.
  std::vector<double> local_momentum;
  double hbar = 1.0;
};

/// Width of the band around each turning point where the leading-order form is refused.
inline double turning_point_band(const TurningInterval& iv) { return 1e-3 * iv.width(); }

/// cos(p_n r / hbar + (pi/2) n_r) with p_n = sqrt(2 m |E_n|); unnormalized.
inline double radial_standing_wave(double E_n, int n_r, const UnitsContext& units, double r) {
  if (!(E_n < 0.0)) throw InvalidArgument("standing-wave form needs a bound energy E_n < 0");
  if (n_r < 0) throw InvalidArgument("n_r must be non-negative");
  const double p_n = std::sqrt(2.0 * units.mass() * std::abs(E_n));
  return std::cos(p_n * r / units.hbar() + 0.5 * std::numbers::pi * n_r);
}

/// int_{left}^{r} p dr', with r' = left + (r - left) t^2 absorbing the
/// square-root zero at the turning point.
inline double cumulative_action(const EffectiveMomentumSquared& p2, double left, double r,
                                const QuadratureOptions& quad = {}) {
  if (!(r > left)) return 0.0;
  const double span = r - left;
  auto integrand = [&](double t) {
    double v = p2(left + span * t * t);
    return v > 0.0 ? std::sqrt(v) * 2.0 * span * t : 0.0;
  };
  return integrate_adaptive(integrand, 0.0, 1.0, quad).value;
}

namespace detail {

inline const TurningInterval& interval_containing(const TurningStructure& st, double r) {
  for (const auto& iv : st.intervals)
    if (iv.contains(r)) return iv;
  throw InvalidArgument("r=" + std::to_string(r) + " is outside every classically allowed interval");
}

inline double local_momentum(const EffectiveMomentumSquared& p2, double r) {
  double v = p2(r);
  return v > 0.0 ? std::sqrt(v) : 0.0;
}

}  // namespace detail

/// Leading-order WKB radial function B / sqrt(p) cos(int_{r1}^{r} p dr'/hbar - pi/4), B = 1.
inline double full_wkb_radial(const PotentialSpec& spec, double M2, double E, const UnitsContext& units,
                              const TurningStructure& structure, double r, const QuadratureOptions& quad = {}) {
  const auto& iv = detail::interval_containing(structure, r);
  const double band = turning_point_band(iv);
  if (r < iv.left + band || r > iv.right - band)
    throw TurningPointProximity("r=" + std::to_string(r) + " lies within " + std::to_string(band) +
                                " of a turning point, where the leading-order form diverges");
  const EffectiveMomentumSquared p2{spec, M2, E, units};
  const double p = detail::local_momentum(p2, r);
  const double phase = cumulative_action(p2, iv.left, r, quad) / units.hbar();
  return std::cos(phase - 0.25 * std::numbers::pi) / std::sqrt(p);
}

/// Samples the full WKB form on `points` positions equally spaced in phase
/// across the allowed interval `interval_index`, excluding the turning-point bands.
inline WavefunctionSample sample_full_wkb(const PotentialSpec& spec, const EnergyLevel& level,
                                          const UnitsContext& units, const TurningStructure& structure,
                                          int points = 4096, std::size_t interval_index = 0,
                                          const QuadratureOptions& quad = {}) {
  if (points < 2) throw InvalidArgument("need at least two sample points");
  if (interval_index >= structure.intervals.size()) throw InvalidArgument("no such allowed interval");
  const auto& iv = structure.intervals[interval_index];
  const EffectiveMomentumSquared p2{spec, level.M2, level.energy, units};
  const double band = turning_point_band(iv);
  const double a = iv.left + band, b = iv.right - band;
  const double hbar = units.hbar();

  const double phase_a = cumulative_action(p2, iv.left, a, quad);
  const double phase_b = phase_a + cumulative_action(p2, a, b, quad);

  WavefunctionSample out;
  out.qn = level.qn;
  out.form = WavefunctionForm::FullWKB;
  out.allowed_interval = iv;
  out.energy = level.energy;
  out.method = level.method;
  out.hbar = hbar;
  out.grid.reserve(points);
  out.values.reserve(points);
  out.local_momentum.reserve(points);

  auto push = [&](double r, double phase) {
    const double p = detail::local_momentum(p2, r);
    out.grid.push_back(r);
    out.local_momentum.push_back(p);
    out.values.push_back(std::cos(phase / hbar - 0.25 * std::numbers::pi) / std::sqrt(p));
  };

  double r_prev = a, phase_prev = phase_a;
  push(a, phase_a);
  for (int j = 1; j < points; ++j) {
    const double target = phase_a + (phase_b - phase_a) * j / (points - 1);
    double r = b;
    if (j + 1 < points) {
      auto f = [&](double x) {
        const double step = integrate_fixed(
            [&](double y) { return detail::local_momentum(p2, y); }, r_prev, x, 16);
        return std::pair{phase_prev + step - target, detail::local_momentum(p2, x)};
      };
      const double p_prev = std::max(detail::local_momentum(p2, r_prev), 1e-300);
      const double guess = std::clamp(r_prev + (target - phase_prev) / p_prev, r_prev, b);
      std::uintmax_t iters = 100;
      r = boost::math::tools::newton_raphson_iterate(f, guess, r_prev, b, 50, iters);
    }
    const double phase = phase_prev + integrate_fixed([&](double y) { return detail::local_momentum(p2, y); },
                                                      r_prev, r, 16);
    push(r, j + 1 < points ? phase : phase_b);
    r_prev = r;
    phase_prev = phase;
  }
  return out;
}

/// Samples cos(p_n r/hbar + (pi/2) n_r) uniformly across the allowed interval.
inline WavefunctionSample sample_standing_wave(double E_n, const QuantumNumbers& qn, const UnitsContext& units,
                                               const TurningInterval& interval, int points = 4096) {
  if (points < 2) throw InvalidArgument("need at least two sample points");
  WavefunctionSample out;
  out.qn = qn;
  out.form = WavefunctionForm::ElementaryStandingWave;
  out.allowed_interval = interval;
  out.energy = E_n;
  out.method = QuantizationMethod::ClosedForm;
  out.hbar = units.hbar();
  const double p_n = std::sqrt(2.0 * units.mass() * std::abs(E_n));
  for (int j = 0; j < points; ++j) {
    const double r = interval.left + interval.width() * j / (points - 1);
    out.grid.push_back(r);
    out.values.push_back(radial_standing_wave(E_n, qn.n_r(), units, r));
    out.local_momentum.push_back(p_n);
  }
  return out;
}

/// Number of strict sign changes. Requires >= 32 samples per local
/// wavelength 2 pi hbar / p wherever the momentum is known.
inline int count_nodes(const WavefunctionSample& sample) {
  if (sample.grid.size() != sample.values.size()) throw InvalidArgument("sample grid and values differ in size");
  if (!sample.local_momentum.empty()) {
    if (sample.local_momentum.size() != sample.grid.size())
      throw InvalidArgument("sample momentum and grid differ in size");
    const double max_phase_step = 2.0 * std::numbers::pi / 32.0;
    for (std::size_t i = 0; i + 1 < sample.grid.size(); ++i) {
      const double p = std::max(sample.local_momentum[i], sample.local_momentum[i + 1]);
      const double step = p * std::abs(sample.grid[i + 1] - sample.grid[i]) / sample.hbar;
      if (step > max_phase_step)
        throw Undersampled("phase advances " + std::to_string(step) + " rad between r=" +
                           std::to_string(sample.grid[i]) + " and the next point (limit 2pi/32)");
    }
  }
  int nodes = 0, last_sign = 0;
  for (double v : sample.values) {
    const int s = (v > 0.0) - (v < 0.0);
    if (s == 0) continue;
    if (last_sign != 0 && s != last_sign) ++nodes;
    last_sign = s;
  }
  return nodes;
}

/// Rescales so that the trapezoid integral of psi^2 over the grid is 1.
inline WavefunctionSample normalize_on_interval(WavefunctionSample sample) {
  double norm = 0.0;
  for (std::size_t i = 0; i + 1 < sample.grid.size(); ++i) {
    const double a = sample.values[i], b = sample.values[i + 1];
    norm += 0.5 * (a * a + b * b) * (sample.grid[i + 1] - sample.grid[i]);
  }
  if (!std::isfinite(norm)) throw DegenerateSample("sample contains non-finite values");
  if (!(norm > 0.0)) throw DegenerateSample("sample has zero norm");
  const double scale = 1.0 / std::sqrt(norm);
  for (double& v : sample.values) v *= scale;
  return sample;
}

/// Two-column CSV (r, psi) with a comment header carrying the quantum numbers.
inline void write_sample_csv(std::ostream& os, const WavefunctionSample& sample) {
  const auto old_precision = os.precision(17);
  os << "# n_r=" << sample.qn.n_r() << " l=" << sample.qn.l() << " m_z=" << sample.qn.m_z()
     << " method=" << to_string(sample.method) << " form=" << to_string(sample.form) << " energy=" << sample.energy
     << "\n";
  os << "r,psi\n";
  for (std::size_t i = 0; i < sample.grid.size(); ++i) os << sample.grid[i] << ',' << sample.values[i] << '\n';
  os.precision(old_precision);
}

}  // namespace wkbspec
