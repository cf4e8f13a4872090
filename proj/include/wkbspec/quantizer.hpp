#pragma once

// Turning points, phase-space integrals and bound-state root finding.
//
// Two quantization conditions are supported:
//   * two turning points:  int_{r1}^{r2} p dr = pi hbar (n_r + 1/2)
//   * k cuts on the real axis (Maslov index 2k):
//       sum_i int_{x1i}^{x2i} p dx = pi hbar (N + k/2)
// where p^2 = 2m(E - V) - M^2/r^2.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "wkbspec/angular.hpp"
#include "wkbspec/core.hpp"
#include "wkbspec/quadrature.hpp"

namespace wkbspec {

/// Closed interval of positions to search. r_min < 0 is permitted for
/// potentials that are finite on the whole real line.
struct SearchDomain {
  double r_min = 0.0;
  double r_max = 0.0;
};

struct TurningInterval {
  double left = 0.0;
  double right = 0.0;

  double width() const noexcept { return right - left; }
  double midpoint() const noexcept { return 0.5 * (left + right); }
  bool contains(double r) const noexcept { return left <= r && r <= right; }
};

struct TurningStructure {
  double energy = 0.0;
  std::vector<TurningInterval> intervals;
  /// Set when p^2 > 0 at an edge of the search domain, i.e. the allowed
  /// region continues past it.
  bool truncated_left = false;
  bool truncated_right = false;
  /// Set when p^2 > 0 at the innermost scanned radius next to r = 0.
  bool touches_origin = false;

  std::size_t cut_count() const noexcept { return intervals.size(); }
  bool truncated() const noexcept { return truncated_left || truncated_right || touches_origin; }
};

struct PhaseIntegral {
  double value = 0.0;
  double energy = 0.0;
  std::vector<double> interval_values;
};

/// Local minimum of the effective potential V(r) + M^2 / (2 m r^2).
struct Well {
  double position = 0.0;
  double bottom = 0.0;
};

enum class QuantizationMethod { ClosedForm, Quadrature2TP, QuadratureMultiWell, Oracle };

inline const char* to_string(QuantizationMethod m) {
  switch (m) {
    case QuantizationMethod::ClosedForm: return "closed";
    case QuantizationMethod::Quadrature2TP: return "quadrature";
    case QuantizationMethod::QuadratureMultiWell: return "multiwell";
    case QuantizationMethod::Oracle: return "oracle";
  }
  return "unknown";
}

struct EnergyLevel {
  QuantumNumbers qn{0, 0};
  double M2 = 0.0;
  double energy = 0.0;
  QuantizationMethod method = QuantizationMethod::ClosedForm;
  /// (action - target) / (pi hbar) at the returned energy; 0 for closed forms.
  double residual = 0.0;
  /// Total node count N used by the multi-cut condition (n_r for two turning points).
  int total_nodes = 0;
};

struct ScanOptions {
  int points = 2048;
  double rel_width = 1e-12;
  /// Extra positions always included in the scan grid (well bottoms).
  std::vector<double> anchors;
};

struct QuantizerOptions {
  QuadratureOptions quadrature;
  int scan_points = 2048;
  /// Target |residual| in units of pi hbar; results above 1e-9 are rejected.
  double root_tol = 1e-12;
  std::optional<std::pair<double, double>> bracket;
  std::optional<SearchDomain> domain;
};

inline constexpr double kMaxAcceptedResidual = 1e-9;

namespace detail {

inline std::string format_number(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

inline bool spans_origin(const SearchDomain& d) { return d.r_min < 0.0; }

inline void validate_domain(const PotentialSpec& spec, double M2, const SearchDomain& d) {
  if (!(d.r_min < d.r_max)) throw InvalidArgument("search domain needs r_min < r_max");
  if (d.r_min <= 0.0 && !spec.is_entire())
    throw InvalidArgument("potential '" + std::string(to_string(spec.kind())) +
                          "' is only defined for r > 0; search domain must be positive");
  if (d.r_max <= 0.0 && M2 > 0.0) throw InvalidArgument("search domain must reach r > 0");
}

inline std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * i / (n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

inline std::vector<double> uniform_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  g.back() = hi;
  return g;
}

// Scan grids, one per segment. Segments never straddle r = 0 when a
// centrifugal term is present.
inline std::vector<std::vector<double>> scan_segments(const PotentialSpec& spec, double M2, const SearchDomain& d,
                                                      const UnitsContext& units, int points) {
  std::vector<std::vector<double>> segments;
  if (M2 == 0.0 && spans_origin(d)) {
    segments.push_back(uniform_grid(d.r_min, d.r_max, points));
    return segments;
  }
  const double inner = d.r_min > 0.0 ? d.r_min : std::min(1e-6 * spec.length_scale(units), 1e-6 * d.r_max);
  if (spans_origin(d)) segments.push_back(uniform_grid(d.r_min, -inner, points));
  if (d.r_max > 0.0) segments.push_back(log_grid(inner, d.r_max, points));
  return segments;
}

template <class F>
double bisect_sign_change(const F& f, double lo, double hi, double rel_width) {
  const bool lo_positive = f(lo) > 0.0;
  for (int i = 0; i < 400; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if ((f(mid) > 0.0) == lo_positive) lo = mid;
    else hi = mid;
    if (hi - lo <= rel_width * std::max(std::abs(lo), std::abs(hi))) break;
  }
  return 0.5 * (lo + hi);
}

inline QuantumNumbers qn_from_M2(int n_r, double M2, const UnitsContext& units) {
  const double M = std::sqrt(std::max(M2, 0.0));
  const double l = std::round(M / units.hbar() - 0.5);
  if (l >= 0.0) {
    const double expected = (l + 0.5) * units.hbar();
    if (std::abs(expected * expected - M2) <= 1e-12 * M2) return {n_r, static_cast<int>(l)};
  }
  return {n_r, 0};
}

}  // namespace detail

/// Default search domain: (1e-6, 1e3) natural lengths for r > 0, or a
/// line segment around the well when there is no centrifugal term.
inline SearchDomain default_domain(const PotentialSpec& spec, double M2, const UnitsContext& units = {}) {
  const double s = spec.length_scale(units);
  if (M2 > 0.0) return {1e-6 * s, 1e3 * s};
  switch (spec.kind()) {
    case PotentialKind::Morse: {
      const auto& p = spec.as<MorseParams>();
      return {p.r0 * (1.0 - std::log(1e4) / p.alpha), p.r0 * (1.0 + 60.0 / p.alpha)};
    }
    case PotentialKind::IsotropicOscillator:
    case PotentialKind::LinearPlusOscillator: return {-20.0 * s, 20.0 * s};
    default: break;
  }
  throw InvalidArgument("potential '" + std::string(to_string(spec.kind())) +
                        "' has no bound states without a centrifugal term on a signed domain");
}

/// Signed domain spanning both sides of the origin, for multi-cut problems.
inline SearchDomain default_multiwell_domain(const PotentialSpec& spec, const UnitsContext& units = {}) {
  const double s = spec.length_scale(units);
  return {-1e3 * s, 1e3 * s};
}

inline TurningStructure find_turning_structure(const PotentialSpec& spec, double M2, double E,
                                               const UnitsContext& units, const SearchDomain& domain,
                                               const ScanOptions& opts = {}) {
  detail::validate_domain(spec, M2, domain);
  if (opts.points < 16) throw InvalidArgument("turning-point scan needs at least 16 points");
  const EffectiveMomentumSquared p2{spec, M2, E, units};
  TurningStructure out;
  out.energy = E;

  auto segments = detail::scan_segments(spec, M2, domain, units, opts.points);
  for (std::size_t s = 0; s < segments.size(); ++s) {
    auto& grid = segments[s];
    for (double a : opts.anchors)
      if (a > grid.front() && a < grid.back()) grid.push_back(a);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) values[i] = p2(grid[i]);

    const bool first_segment = s == 0;
    const bool last_segment = s + 1 == segments.size();
    std::optional<double> open_left;
    if (values.front() > 0.0) {
      open_left = grid.front();
      (first_segment ? out.truncated_left : out.touches_origin) = true;
    }
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const bool a = values[i] > 0.0, b = values[i + 1] > 0.0;
      if (a == b) continue;
      double root = detail::bisect_sign_change(p2, grid[i], grid[i + 1], opts.rel_width);
      if (b) {
        open_left = root;
      } else {
        out.intervals.push_back({*open_left, root});
        open_left.reset();
      }
    }
    if (open_left) {
      out.intervals.push_back({*open_left, grid.back()});
      (last_segment ? out.truncated_right : out.touches_origin) = true;
    }
  }
  if (out.intervals.empty())
    throw NoClassicalRegion("no classically allowed region at E=" + std::to_string(E) +
                            " (below the effective-potential minimum or above dissociation)");
  return out;
}

/// Action of one allowed interval, int sqrt(p^2) dr.
inline double interval_action(const EffectiveMomentumSquared& p2, const TurningInterval& iv,
                              const QuadratureOptions& quad = {}) {
  if (!(iv.width() > 0.0)) return 0.0;
  auto integrand = [&](double r) {
    double v = p2(r);
    return v > 0.0 ? std::sqrt(v) : 0.0;
  };
  return integrate_sine_mapped(integrand, iv.left, iv.right, quad).value;
}

inline PhaseIntegral phase_integral(const PotentialSpec& spec, double M2, double E, const UnitsContext& units,
                                   const TurningStructure& structure, const QuadratureOptions& quad = {}) {
  const EffectiveMomentumSquared p2{spec, M2, E, units};
  PhaseIntegral out;
  out.energy = E;
  for (const auto& iv : structure.intervals) {
    double a = interval_action(p2, iv, quad);
    out.interval_values.push_back(a);
    out.value += a;
  }
  return out;
}

/// Local minima of the effective potential inside the domain.
inline std::vector<Well> find_wells(const PotentialSpec& spec, double M2, const UnitsContext& units,
                                    const SearchDomain& domain, int points = 2048) {
  detail::validate_domain(spec, M2, domain);
  const EffectiveMomentumSquared p2{spec, M2, 0.0, units};
  auto veff = [&](double r) { return p2.effective_potential(r); };
  std::vector<Well> wells;
  for (const auto& grid : detail::scan_segments(spec, M2, domain, units, points)) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = veff(grid[i]);
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
      if (!(v[i] < v[i - 1] && v[i] <= v[i + 1])) continue;
      auto [pos, val] = boost::math::tools::brent_find_minima(veff, grid[i - 1], grid[i + 1],
                                                              std::numeric_limits<double>::digits);
      wells.push_back({pos, val});
    }
  }
  return wells;
}

/// Analytic continuation of a well's action to energies below its bottom.
///
/// The allowed interval has closed into a complex-conjugate pair of turning
/// points x +/- iy; the action continues to
///   -int_{-y}^{y} Re sqrt(-p^2(x + i s)) ds,
/// which is negative and joins the real action continuously at the bottom.
inline double continued_well_action(const EffectiveMomentumSquared& p2, const Well& well,
                                    const QuadratureOptions& quad = {}) {
  if (!p2.potential.is_analytic())
    throw InvalidArgument("continuing a closed cut requires an analytic potential");
  const double gap = well.bottom - p2.energy;
  if (!(gap > 0.0)) return 0.0;

  const double scale = std::max(std::abs(well.position), p2.potential.length_scale(p2.units));
  const double h = 1e-4 * scale;
  const double curvature = (p2.effective_potential(well.position + h) - 2.0 * well.bottom +
                            p2.effective_potential(well.position - h)) /
                           (h * h);
  if (!(curvature > 0.0)) throw ConvergenceFailure("well at r=" + std::to_string(well.position) + " has no curvature");

  cplx z{well.position, std::sqrt(2.0 * gap / curvature)};
  bool converged = false;
  for (int iter = 0; iter < 200; ++iter) {
    const cplx f = p2(z);
    const double dh = 1e-6 * std::abs(z);
    const cplx df = (p2(z + dh) - p2(z - dh)) / (2.0 * dh);
    const cplx step = f / df;
    z -= step;
    if (z.imag() < 0.0) z = std::conj(z);
    if (std::abs(step) <= 1e-14 * std::abs(z)) {
      converged = true;
      break;
    }
  }
  if (!converged || !(z.imag() > 0.0) || !std::isfinite(z.real()))
    throw ConvergenceFailure("complex turning point near r=" + std::to_string(well.position) + " not found");

  const double x = z.real(), y = z.imag();
  auto integrand = [&](double s) { return std::sqrt(-p2(cplx{x, s})).real(); };
  return -integrate_sine_mapped(integrand, -y, y, quad).value;
}

namespace detail {

// Finds E in the bracket with action(E) = target, where action is
// increasing. Bisection narrows the bracket, then Illinois-style regula
// falsi polishes. Returns (energy, residual in units of pi hbar).
template <class Residual>
std::pair<double, double> solve_increasing(const Residual& f, double lo, double f_lo, double hi, double f_hi,
                                           double root_tol, double energy_scale) {
  for (int i = 0; i < 200; ++i) {
    if (std::isfinite(f_hi) && hi - lo <= 1e-6 * std::max({std::abs(lo), std::abs(hi), energy_scale})) break;
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (std::abs(fm) <= root_tol) return {mid, fm};
    if (fm < 0.0) {
      lo = mid;
      f_lo = fm;
    } else {
      hi = mid;
      f_hi = fm;
    }
  }
  double best = std::abs(f_lo) < std::abs(f_hi) ? lo : hi;
  double best_f = std::abs(f_lo) < std::abs(f_hi) ? f_lo : f_hi;
  int side = 0;
  for (int i = 0; i < 200; ++i) {
    double c = hi - f_hi * (hi - lo) / (f_hi - f_lo);
    if (!(c > lo && c < hi)) c = 0.5 * (lo + hi);
    double fc = f(c);
    if (std::abs(fc) < std::abs(best_f)) {
      best = c;
      best_f = fc;
    }
    if (std::abs(fc) <= root_tol) break;
    if (fc < 0.0) {
      lo = c;
      f_lo = fc;
      if (side == -1) f_hi *= 0.5;
      side = -1;
    } else {
      hi = c;
      f_hi = fc;
      if (side == 1) f_lo *= 0.5;
      side = 1;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi))) break;
  }
  return {best, best_f};
}

// Grows an upper bracket end from `lo` until `f` changes sign.
template <class Residual>
std::pair<double, double> grow_bracket(const Residual& f, const PotentialSpec& spec, double& lo, double& f_lo,
                                       double energy_scale, const std::string& what) {
  const double threshold = spec.dissociation_threshold();
  if (std::isinf(threshold)) {
    double step = energy_scale;
    for (int i = 0; i < 200; ++i) {
      double hi = lo + step;
      double fh = f(hi);
      if (fh > 0.0) return {hi, fh};
      lo = hi;
      f_lo = fh;
      step *= 2.0;
    }
    throw NoBoundState(what + ": bracket growth exhausted");
  }
  const double gap = threshold - lo;
  if (!(gap > 0.0)) throw NoBoundState(what + ": effective potential has no well below dissociation");
  for (int j = 1; j <= 48; ++j) {
    double hi = threshold - gap * std::ldexp(1.0, -j);
    if (!(hi > lo)) continue;
    double fh = f(hi);
    if (fh > 0.0) return {hi, fh};
    lo = hi;
    f_lo = fh;
  }
  throw NoBoundState(what + ": quantization condition not met below dissociation");
}

inline double bracket_floor(double bottom, double energy_scale) {
  return bottom + 1e-6 * std::max(std::abs(bottom), energy_scale);
}

inline std::pair<double, double> solve_in_bracket(const auto& f, double lo, double hi, const QuantizerOptions& opts,
                                                  double energy_scale, const std::string& what) {
  const double f_lo = f(lo), f_hi = f(hi);
  if (!(f_lo < 0.0 && f_hi > 0.0))
    throw NoBoundState(what + ": supplied bracket does not enclose the quantized energy");
  return solve_increasing(f, lo, f_lo, hi, f_hi, opts.root_tol, energy_scale);
}

inline void check_residual(double residual, const std::string& what) {
  if (!(std::abs(residual) < kMaxAcceptedResidual))
    throw ConvergenceFailure(what + ": residual " + std::to_string(residual) + " pi hbar exceeds tolerance");
}

}  // namespace detail

/// Action of the physical (2-turning-point) problem at energy E. Returns 0
/// below the well and +inf when the allowed region runs off the largest
/// domain tried (Coulomb-like tails close to threshold).
inline double two_point_action(const PotentialSpec& spec, double M2, double E, const UnitsContext& units,
                               SearchDomain domain, const std::vector<Well>& wells, const QuantizerOptions& opts) {
  ScanOptions scan;
  scan.points = opts.scan_points;
  for (const auto& w : wells) scan.anchors.push_back(w.position);
  const double limit = 1e12 * spec.length_scale(units);
  for (int attempt = 0; attempt < 12; ++attempt) {
    TurningStructure st;
    try {
      st = find_turning_structure(spec, M2, E, units, domain, scan);
    } catch (const NoClassicalRegion&) {
      return 0.0;
    }
    if (st.truncated_right && domain.r_max > 0.0 && domain.r_max < limit) {
      domain.r_max *= 10.0;
      continue;
    }
    if (st.truncated_left && domain.r_min < 0.0 && -domain.r_min < limit) {
      domain.r_min *= 10.0;
      continue;
    }
    if (st.touches_origin)
      throw DomainTooSmall("allowed region reaches r = 0 at E=" + std::to_string(E));
    if (st.truncated()) return std::numeric_limits<double>::infinity();
    if (st.cut_count() > 1)
      throw StructureMismatch("two-turning-point quantization found " + std::to_string(st.cut_count()) +
                              " allowed intervals at E=" + std::to_string(E));
    return phase_integral(spec, M2, E, units, st, opts.quadrature).value;
  }
  return std::numeric_limits<double>::infinity();
}

/// Energy with int_{r1}^{r2} p dr = pi hbar (n_r + 1/2).
inline EnergyLevel quantize_2tp(const PotentialSpec& spec, double M2, int n_r, const UnitsContext& units = {},
                                const QuantizerOptions& opts = {}) {
  if (n_r < 0) throw InvalidArgument("n_r must be non-negative");
  if (M2 < 0.0) throw InvalidArgument("M2 must be non-negative");
  const SearchDomain domain = opts.domain ? *opts.domain : default_domain(spec, M2, units);
  const std::string what = "quantize_2tp(n_r=" + std::to_string(n_r) + ", M^2=" + detail::format_number(M2) + ")";
  const double pi_hbar = std::numbers::pi * units.hbar();
  const double target = pi_hbar * (n_r + 0.5);
  const double escale = spec.energy_scale(units);

  auto wells = find_wells(spec, M2, units, domain, opts.scan_points);
  if (wells.empty()) throw NoBoundState(what + ": effective potential has no well in the search domain");
  auto lowest = *std::min_element(wells.begin(), wells.end(),
                                  [](const Well& a, const Well& b) { return a.bottom < b.bottom; });

  auto residual = [&](double E) {
    return (two_point_action(spec, M2, E, units, domain, wells, opts) - target) / pi_hbar;
  };

  std::pair<double, double> root;
  if (opts.bracket) {
    root = detail::solve_in_bracket(residual, opts.bracket->first, opts.bracket->second, opts, escale, what);
  } else {
    double lo = detail::bracket_floor(lowest.bottom, escale);
    double f_lo = residual(lo);
    auto [hi, f_hi] = detail::grow_bracket(residual, spec, lo, f_lo, escale, what);
    root = detail::solve_increasing(residual, lo, f_lo, hi, f_hi, opts.root_tol, escale);
  }
  detail::check_residual(root.second, what);
  return {detail::qn_from_M2(n_r, M2, units), M2, root.first, QuantizationMethod::Quadrature2TP, root.second, n_r};
}

inline EnergyLevel quantize_2tp(const PotentialSpec& spec, const QuantumNumbers& qn, const UnitsContext& units = {},
                                const QuantizerOptions& opts = {}) {
  auto level = quantize_2tp(spec, angular_momentum_squared(qn.l(), units), qn.n_r(), units, opts);
  level.qn = qn;
  return level;
}

/// Sum over cuts of the (possibly continued) action at energy E. Each
/// active well contributes its real interval action, or the continued
/// negative action when E lies below its bottom.
inline PhaseIntegral multiwell_action(const PotentialSpec& spec, double M2, double E, const UnitsContext& units,
                                      const SearchDomain& domain, const std::vector<Well>& wells,
                                      const QuadratureOptions& quad = {}, int scan_points = 2048) {
  ScanOptions scan;
  scan.points = scan_points;
  for (const auto& w : wells) scan.anchors.push_back(w.position);
  TurningStructure st;
  try {
    st = find_turning_structure(spec, M2, E, units, domain, scan);
  } catch (const NoClassicalRegion&) {
  }
  if (st.truncated())
    throw DomainTooSmall("allowed region at E=" + std::to_string(E) + " reaches the edge of the search domain");

  const EffectiveMomentumSquared p2{spec, M2, E, units};
  PhaseIntegral out;
  out.energy = E;
  std::vector<bool> used(st.intervals.size(), false);
  for (const auto& w : wells) {
    double action = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < st.intervals.size(); ++i) {
      if (!st.intervals[i].contains(w.position)) continue;
      if (used[i])
        throw StructureMismatch("two wells share one allowed interval at E=" + std::to_string(E));
      used[i] = true;
      action = interval_action(p2, st.intervals[i], quad);
      ++hits;
    }
    if (hits == 0 && E < w.bottom) action = continued_well_action(p2, w, quad);
    out.interval_values.push_back(action);
    out.value += action;
  }
  for (std::size_t i = 0; i < used.size(); ++i)
    if (!used[i]) throw StructureMismatch("allowed interval without a well at E=" + std::to_string(E));
  return out;
}

/// Energy with sum of cut actions = pi hbar (N_total + k/2), Maslov index 2k.
///
/// The cuts are the wells of the effective potential in `domain` whose
/// bottoms lie below dissociation; their number must equal `k`. A cut that
/// is complex at the root energy (E below that well's bottom) enters through
/// its analytic continuation.
inline EnergyLevel quantize_multiwell(const PotentialSpec& spec, double M2, int N_total, int k,
                                      const UnitsContext& units, const SearchDomain& domain,
                                      const QuantizerOptions& opts = {}) {
  if (N_total < 0) throw InvalidArgument("total node count must be non-negative");
  if (k < 1) throw InvalidArgument("cut count k must be positive");
  if (M2 < 0.0) throw InvalidArgument("M2 must be non-negative");
  const std::string what = "quantize_multiwell(N=" + std::to_string(N_total) + ", k=" + std::to_string(k) +
                           ", M^2=" + detail::format_number(M2) + ")";
  const double pi_hbar = std::numbers::pi * units.hbar();
  const double target = pi_hbar * (N_total + 0.5 * k);
  const double escale = spec.energy_scale(units);
  const double threshold = spec.dissociation_threshold();

  std::vector<Well> wells;
  for (const auto& w : find_wells(spec, M2, units, domain, opts.scan_points))
    if (w.bottom < threshold) wells.push_back(w);
  if (static_cast<int>(wells.size()) != k)
    throw StructureMismatch(what + ": found " + std::to_string(wells.size()) +
                            " real cut(s) in the energy range, requested " + std::to_string(k));
  auto lowest = *std::min_element(wells.begin(), wells.end(),
                                  [](const Well& a, const Well& b) { return a.bottom < b.bottom; });

  auto residual = [&](double E) {
    return (multiwell_action(spec, M2, E, units, domain, wells, opts.quadrature, opts.scan_points).value - target) /
           pi_hbar;
  };

  std::pair<double, double> root;
  if (opts.bracket) {
    root = detail::solve_in_bracket(residual, opts.bracket->first, opts.bracket->second, opts, escale, what);
  } else {
    double lo = detail::bracket_floor(lowest.bottom, escale);
    double f_lo = residual(lo);
    auto [hi, f_hi] = detail::grow_bracket(residual, spec, lo, f_lo, escale, what);
    root = detail::solve_increasing(residual, lo, f_lo, hi, f_hi, opts.root_tol, escale);
  }
  detail::check_residual(root.second, what);
  return {detail::qn_from_M2(N_total / k, M2, units), M2, root.first, QuantizationMethod::QuadratureMultiWell,
          root.second, N_total};
}

}  // namespace wkbspec
