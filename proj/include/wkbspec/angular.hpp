#pragma once

// Quasiclassical quantization of the polar and azimuthal motion. The polar
// condition fixes M = (l + 1/2) hbar, which is the centrifugal strength used
// by the radial quantizer for every l, including M0 = hbar/2 at l = 0.

#include <cmath>
#include <complex>
#include <cstdlib>
#include <numbers>
#include <string>

#include "wkbspec/core.hpp"
#include "wkbspec/quadrature.hpp"

namespace wkbspec {

struct AngularEigenvalue {
  double M = 0.0;    ///< magnitude of the angular momentum, (l + 1/2) hbar
  double M_z = 0.0;  ///< projection, m_z hbar
  int l = 0;
  int m_z = 0;

  double M2() const noexcept { return M * M; }
};

inline double quantize_azimuthal(int m_z, const UnitsContext& units = {}) { return units.hbar() * m_z; }

/// Angular momentum magnitude for orbital number l.
inline double angular_momentum(int l, const UnitsContext& units = {}) {
  if (l < 0) throw InvalidArgument("l must be non-negative");
  return (l + 0.5) * units.hbar();
}

inline double angular_momentum_squared(int l, const UnitsContext& units = {}) {
  double M = angular_momentum(l, units);
  return M * M;
}

inline AngularEigenvalue quantize_polar(int n_theta, int m_z, const UnitsContext& units = {}) {
  if (n_theta < 0) throw InvalidArgument("n_theta must be non-negative");
  const int l = n_theta + std::abs(m_z);
  return {angular_momentum(l, units), quantize_azimuthal(m_z, units), l, m_z};
}

/// Closed-form value of the real-axis polar action, pi (M - |M_z|).
inline double polar_phase_integral_exact(double M, double M_z) { return std::numbers::pi * (M - std::abs(M_z)); }

/// Integral of sqrt(M^2 - M_z^2 / sin^2 theta) over the allowed interval.
///
/// The integrand is rewritten as M sqrt(sin(t - t1) sin(t2 - t)) / sin t so
/// that nothing cancels near the turning points t1 = asin(|M_z|/M) and
/// t2 = pi - t1.
inline double polar_phase_integral(double M, double M_z, const QuadratureOptions& opts = {}) {
  const double mz = std::abs(M_z);
  if (!(M > mz)) throw NoClassicalRegion("polar motion needs M > |M_z| (M=" + std::to_string(M) +
                                         ", M_z=" + std::to_string(M_z) + ")");
  if (mz == 0.0) return std::numbers::pi * M;
  const double t1 = std::asin(mz / M);
  const double t2 = std::numbers::pi - t1;
  auto integrand = [&](double t) {
    double s = std::sin(t - t1) * std::sin(t2 - t);
    return s > 0.0 ? M * std::sqrt(s) / std::sin(t) : 0.0;
  };
  return integrate_sine_mapped(integrand, t1, t2, opts).value;
}

/// Far-field polar factor sqrt((2l+1) / (pi (l - |m| + 1/2))) cos[(l+1/2) theta + (pi/2)(l - |m|)].
inline double polar_wavefunction(int l, int m_z, double theta) {
  const int m = std::abs(m_z);
  if (l < 0 || m > l) throw InvalidArgument("polar wavefunction needs 0 <= |m_z| <= l");
  const double norm = std::sqrt((2.0 * l + 1.0) / (std::numbers::pi * (l - m + 0.5)));
  return norm * std::cos((l + 0.5) * theta + 0.5 * std::numbers::pi * (l - m));
}

/// Quasiclassical angular eigenfunction: the polar factor times e^{i m phi} / sqrt(2 pi).
/// At l = m_z = 0 this is the standing half-wave cos(theta/2) / pi.
inline std::complex<double> angular_wavefunction(int l, int m_z, double theta, double phi) {
  const int m = std::abs(m_z);
  if (l < 0 || m > l) throw InvalidArgument("angular wavefunction needs 0 <= |m_z| <= l");
  const double amplitude = std::sqrt((l + 0.5) / (l - m + 0.5)) / std::numbers::pi *
                           std::cos((l + 0.5) * theta + 0.5 * std::numbers::pi * (l - m));
  return std::polar(1.0, m_z * phi) * amplitude;
}

}  // namespace wkbspec
