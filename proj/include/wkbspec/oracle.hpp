#pragma once

// Reference spectra from finite-difference diagonalization of the radial
// equation -hbar^2/(2m) u'' + [V + hbar^2 c / (2 m r^2)] u = E u with
// c = l(l+1) (textbook) or (l+1/2)^2 (Langer form), Dirichlet at both ends.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <lapacke.h>

#include "wkbspec/core.hpp"
#include "wkbspec/quantizer.hpp"
#include "wkbspec/spectra.hpp"

namespace wkbspec {

enum class GridSpacing { Uniform, Logarithmic };
enum class CentrifugalVariant { Ll1, LangerHalfSquared };

inline const char* to_string(CentrifugalVariant v) { return v == CentrifugalVariant::Ll1 ? "l(l+1)" : "(l+1/2)^2"; }

/// Interior nodes strictly between r_min and r_max, uniform in r or in ln r.
struct RadialGrid {
  double r_min = 0.0;
  double r_max = 0.0;
  int points = 0;
  GridSpacing spacing = GridSpacing::Logarithmic;

  RadialGrid() = default;
  RadialGrid(double r_min_, double r_max_, int points_, GridSpacing spacing_)
      : r_min(r_min_), r_max(r_max_), points(points_), spacing(spacing_) {
    if (!(r_min > 0.0)) throw InvalidArgument("radial grid needs r_min > 0");
    if (!(r_min < r_max)) throw InvalidArgument("radial grid needs r_min < r_max");
    if (points < 200) throw InvalidArgument("radial grid needs at least 200 points");
  }

  /// Same extent with the step halved (2P + 1 interior nodes).
  RadialGrid refined() const { return {r_min, r_max, 2 * points + 1, spacing}; }

  std::vector<double> nodes() const {
    std::vector<double> r(points);
    if (spacing == GridSpacing::Uniform) {
      const double h = (r_max - r_min) / (points + 1);
      for (int i = 0; i < points; ++i) r[i] = r_min + (i + 1) * h;
    } else {
      const double a = std::log(r_min), h = (std::log(r_max) - a) / (points + 1);
      for (int i = 0; i < points; ++i) r[i] = std::exp(a + (i + 1) * h);
    }
    return r;
  }
};

struct OracleResult {
  std::vector<double> eigenvalues;  ///< Richardson-extrapolated, ascending
  CentrifugalVariant centrifugal_variant = CentrifugalVariant::Ll1;
  RadialGrid grid;                  ///< coarse grid actually used (after any widening)
  std::vector<double> refinement_estimate;
  std::vector<double> coarse;       ///< raw eigenvalues on `grid`
  std::vector<double> fine;         ///< raw eigenvalues on `grid.refined()`
};

/// Raw eigenvalues on one grid plus the boundary amplitudes of each
/// eigenfunction u(r), relative to its maximum.
struct FiniteDifferenceSolution {
  std::vector<double> eigenvalues;
  std::vector<double> inner_amplitude;
  std::vector<double> outer_amplitude;
};

namespace detail {

inline double centrifugal_coefficient(int l, CentrifugalVariant v) {
  return v == CentrifugalVariant::Ll1 ? l * (l + 1.0) : (l + 0.5) * (l + 0.5);
}

}  // namespace detail

inline FiniteDifferenceSolution solve_finite_difference(const PotentialSpec& spec, int l, CentrifugalVariant variant,
                                                        const UnitsContext& units, const RadialGrid& grid,
                                                        int n_levels) {
  if (l < 0) throw InvalidArgument("l must be non-negative");
  if (n_levels < 1 || n_levels > grid.points) throw InvalidArgument("n_levels out of range");
  const double kinetic = units.hbar() * units.hbar() / (2.0 * units.mass());
  const double c = detail::centrifugal_coefficient(l, variant);
  const auto r = grid.nodes();
  const int n = grid.points;
  std::vector<double> d(n), e(n - 1);

  if (grid.spacing == GridSpacing::Uniform) {
    const double h = (grid.r_max - grid.r_min) / (n + 1);
    for (int i = 0; i < n; ++i) d[i] = 2.0 * kinetic / (h * h) + evaluate_potential(spec, r[i], units) + kinetic * c / (r[i] * r[i]);
    for (int i = 0; i + 1 < n; ++i) e[i] = -kinetic / (h * h);
  } else {
    // u = sqrt(r) w, x = ln r gives -k w'' + [k (c + 1/4) + r^2 V] w = E r^2 w;
    // v = r w makes the pencil a symmetric tridiagonal matrix.
    const double h = (std::log(grid.r_max) - std::log(grid.r_min)) / (n + 1);
    for (int i = 0; i < n; ++i) {
      const double r2 = r[i] * r[i];
      d[i] = (2.0 * kinetic / (h * h) + kinetic * (c + 0.25) + r2 * evaluate_potential(spec, r[i], units)) / r2;
    }
    for (int i = 0; i + 1 < n; ++i) e[i] = -kinetic / (h * h) / (r[i] * r[i + 1]);
  }

  lapack_int found = 0, nsplit = 0;
  std::vector<double> w(n);
  std::vector<lapack_int> iblock(n), isplit(n);
  // The log-grid matrix is strongly graded; the smallest safe abstol asks
  // bisection for relative rather than norm-wise accuracy.
  const double abstol = 2.0 * LAPACKE_dlamch('S');
  lapack_int info = LAPACKE_dstebz('I', 'E', n, 0.0, 0.0, 1, n_levels, abstol, d.data(), e.data(), &found, &nsplit,
                                   w.data(), iblock.data(), isplit.data());
  if (info != 0 || found != n_levels)
    throw ConvergenceFailure("tridiagonal eigenvalue bisection failed (info=" + std::to_string(info) + ")");

  std::vector<double> z(static_cast<std::size_t>(n) * n_levels);
  std::vector<lapack_int> ifail(n_levels);
  info = LAPACKE_dstein(LAPACK_COL_MAJOR, n, d.data(), e.data(), found, w.data(), iblock.data(), isplit.data(),
                        z.data(), n, ifail.data());
  if (info != 0) throw ConvergenceFailure("inverse iteration failed (info=" + std::to_string(info) + ")");

  FiniteDifferenceSolution out;
  out.eigenvalues.assign(w.begin(), w.begin() + n_levels);
  for (int k = 0; k < n_levels; ++k) {
    const double* v = z.data() + static_cast<std::size_t>(k) * n;
    auto u = [&](int i) { return grid.spacing == GridSpacing::Uniform ? v[i] : v[i] / std::sqrt(r[i]); };
    double peak = 0.0;
    for (int i = 0; i < n; ++i) peak = std::max(peak, std::abs(u(i)));
    out.inner_amplitude.push_back(std::abs(u(0)) / peak);
    out.outer_amplitude.push_back(std::abs(u(n - 1)) / peak);
  }
  return out;
}

/// Lowest eigenvalues on a single grid, no extrapolation.
inline std::vector<double> finite_difference_levels(const PotentialSpec& spec, int l, CentrifugalVariant variant,
                                                    const UnitsContext& units, const RadialGrid& grid, int n_levels) {
  return solve_finite_difference(spec, l, variant, units, grid, n_levels).eigenvalues;
}

inline constexpr double kOracleDecayTolerance = 1e-10;

namespace detail {

inline bool decayed(const FiniteDifferenceSolution& s, const RadialGrid& grid, const PotentialSpec& spec,
                    const UnitsContext& units) {
  // A uniform grid starting near the origin stands in for u(0) = 0.
  const bool check_inner =
      grid.spacing == GridSpacing::Logarithmic || grid.r_min > 1e-3 * spec.length_scale(units);
  for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
    if (s.outer_amplitude[k] >= kOracleDecayTolerance) return false;
    if (check_inner && s.inner_amplitude[k] >= kOracleDecayTolerance) return false;
  }
  return true;
}

inline RadialGrid widened(const RadialGrid& g) {
  const double r_min = g.spacing == GridSpacing::Logarithmic ? g.r_min / 100.0 : g.r_min;
  return {r_min, 2.0 * g.r_max, g.points, g.spacing};
}

}  // namespace detail

/// Lowest `n_levels` eigenvalues with one Richardson step between `grid` and
/// its refinement. The grid is widened once if an eigenfunction has not
/// decayed below 1e-10 of its peak at the boundaries.
inline OracleResult diagonalize_radial(const PotentialSpec& spec, int l, CentrifugalVariant variant,
                                       const UnitsContext& units, const RadialGrid& grid, int n_levels) {
  RadialGrid current = grid;
  for (int attempt = 0; attempt < 2; ++attempt) {
    if (attempt > 0) current = detail::widened(current);
    auto coarse = solve_finite_difference(spec, l, variant, units, current, n_levels);
    auto fine = solve_finite_difference(spec, l, variant, units, current.refined(), n_levels);
    if (!detail::decayed(coarse, current, spec, units) || !detail::decayed(fine, current.refined(), spec, units))
      continue;
    OracleResult out;
    out.centrifugal_variant = variant;
    out.grid = current;
    out.coarse = coarse.eigenvalues;
    out.fine = fine.eigenvalues;
    for (int k = 0; k < n_levels; ++k) {
      out.eigenvalues.push_back((4.0 * fine.eigenvalues[k] - coarse.eigenvalues[k]) / 3.0);
      out.refinement_estimate.push_back(std::abs(fine.eigenvalues[k] - coarse.eigenvalues[k]) / 3.0);
    }
    return out;
  }
  throw DomainTooSmall("eigenfunctions do not decay below " + detail::format_number(kOracleDecayTolerance) +
                       " at the grid ends even after widening to [" + detail::format_number(current.r_min) + ", " +
                       detail::format_number(current.r_max) + "]");
}

/// Log grid sized for the lowest `n_levels` states: the outer edge sits where
/// the forbidden-region action beyond the highest level's turning point
/// reaches 30 hbar, the inner edge where u ~ r^(l+1) is below 1e-11.
inline RadialGrid suggest_grid(const PotentialSpec& spec, int l, const UnitsContext& units, int n_levels,
                               int points = 4000) {
  const double s = spec.length_scale(units);
  RadialGrid probe(1e-10 * s, 300.0 * s, 2000, GridSpacing::Logarithmic);
  const double top = finite_difference_levels(spec, l, CentrifugalVariant::Ll1, units, probe, n_levels).back();
  if (!(top < spec.dissociation_threshold()))
    throw NoBoundState("only " + std::to_string(n_levels - 1) + " or fewer bound levels for l=" + std::to_string(l));

  const EffectiveMomentumSquared p2{spec, angular_momentum_squared(l, units), top, units};
  double r = s;
  // walk out to the outer turning point of the highest level
  while (r < 1e8 * s && (p2(r) > 0.0 || p2.effective_potential(r) < top)) r *= 1.01;
  double action = 0.0;
  while (action < 30.0 * units.hbar() && r < 1e8 * s) {
    const double dr = 0.01 * r;
    action += std::sqrt(std::max(-p2(r + 0.5 * dr), 0.0)) * dr;
    r += dr;
  }
  const double r_min = s * std::pow(1e-11, 1.0 / (l + 1.0));
  return {r_min, r, points, GridSpacing::Logarithmic};
}

/// One row of the method comparison; missing cells carry an error message.
struct ComparisonRow {
  int n_r = 0;
  int l = 0;
  std::optional<double> closed;
  std::optional<double> closed_alt;  ///< Morse with centrifugal term, when the primary is the l = 0 variant
  std::optional<double> quadrature;
  std::optional<double> oracle_ll1;
  std::optional<double> oracle_langer;
  std::vector<std::pair<std::string, std::string>> errors;

  static std::optional<double> delta(const std::optional<double>& a, const std::optional<double>& b) {
    if (a && b) return *a - *b;
    return std::nullopt;
  }
  std::optional<double> delta_quadrature() const { return delta(quadrature, closed); }
  std::optional<double> delta_oracle_ll1() const { return delta(oracle_ll1, closed); }
  std::optional<double> delta_oracle_langer() const { return delta(oracle_langer, closed); }
  std::optional<double> delta_closed_alt() const { return delta(closed_alt, closed); }

  bool all_failed() const { return !closed && !closed_alt && !quadrature && !oracle_ll1 && !oracle_langer; }
};

struct ComparisonOptions {
  QuantizerOptions quantizer;
  int oracle_points = 4000;
};

/// Closed form, quadrature and both oracle variants side by side for
/// n_r in [n_r_min, n_r_max] at fixed l. Reporting only: failures become
/// empty cells with the error recorded.
inline std::vector<ComparisonRow> compare_methods(const PotentialSpec& spec, int l, int n_r_min, int n_r_max,
                                                  const UnitsContext& units, const ComparisonOptions& opts = {}) {
  if (l < 0 || n_r_min < 0 || n_r_max < n_r_min) throw InvalidArgument("invalid (l, n_r) range");
  const bool morse = spec.kind() == PotentialKind::Morse;
  const int count = n_r_max + 1;

  auto attempt = [](ComparisonRow& row, const char* column, auto&& fn) -> std::optional<double> {
    try {
      return fn();
    } catch (const Error& e) {
      row.errors.emplace_back(column, e.what());
    }
    return std::nullopt;
  };

  std::optional<OracleResult> ll1, langer;
  std::string ll1_error, langer_error;
  try {
    auto grid = suggest_grid(spec, l, units, count, opts.oracle_points);
    try {
      ll1 = diagonalize_radial(spec, l, CentrifugalVariant::Ll1, units, grid, count);
    } catch (const Error& e) {
      ll1_error = e.what();
    }
    try {
      langer = diagonalize_radial(spec, l, CentrifugalVariant::LangerHalfSquared, units, grid, count);
    } catch (const Error& e) {
      langer_error = e.what();
    }
  } catch (const Error& e) {
    ll1_error = langer_error = e.what();
  }

  std::vector<ComparisonRow> rows;
  for (int n_r = n_r_min; n_r <= n_r_max; ++n_r) {
    ComparisonRow row;
    row.n_r = n_r;
    row.l = l;
    if (spec.has_closed_form()) {
      auto primary = morse && l == 0 ? SpectrumVariant::MorseNoCentrifugal
                     : morse         ? SpectrumVariant::MorseWithM
                                     : SpectrumVariant::Standard;
      row.closed = attempt(row, "closed", [&] { return ClosedFormSpectrum(spec, primary, units).energy(n_r, l); });
      if (morse && l == 0)
        row.closed_alt = attempt(row, "closed_alt", [&] {
          return ClosedFormSpectrum(spec, SpectrumVariant::MorseWithM, units).energy(n_r, l);
        });
    }
    row.quadrature = attempt(row, "quadrature", [&] {
      if (spec.kind() == PotentialKind::LinearPlusOscillator)
        return quantize_multiwell(spec, angular_momentum_squared(l, units), 2 * n_r, 2, units,
                                  default_multiwell_domain(spec, units), opts.quantizer)
            .energy;
      if (morse && l == 0) return quantize_2tp(spec, 0.0, n_r, units, opts.quantizer).energy;
      return quantize_2tp(spec, QuantumNumbers(n_r, l), units, opts.quantizer).energy;
    });
    if (ll1) row.oracle_ll1 = ll1->eigenvalues[n_r];
    else row.errors.emplace_back("oracle_ll1", ll1_error);
    if (langer) row.oracle_langer = langer->eigenvalues[n_r];
    else row.errors.emplace_back("oracle_langer", langer_error);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace wkbspec
