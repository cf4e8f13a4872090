#pragma once

// Closed-form spectra. Each formula is written once in terms of the angular
// momentum magnitude M; the (n_r, l) entry points substitute M = (l+1/2) hbar.

#include <cmath>
#include <sstream>
#include <string>

#include "wkbspec/angular.hpp"
#include "wkbspec/core.hpp"

namespace wkbspec {

enum class SpectrumVariant { Standard, MorseNoCentrifugal, MorseWithM };

inline const char* to_string(SpectrumVariant v) {
  switch (v) {
    case SpectrumVariant::Standard: return "standard";
    case SpectrumVariant::MorseNoCentrifugal: return "morse-no-centrifugal";
    case SpectrumVariant::MorseWithM: return "morse-with-m";
  }
  return "unknown";
}

namespace detail {

inline void require_quantum_numbers(int n_r, int l) {
  if (n_r < 0) throw InvalidArgument("n_r must be non-negative");
  if (l < 0) throw InvalidArgument("l must be non-negative");
}

}  // namespace detail

// Coulomb: E = -alpha^2 m / (2 [(n_r + 1/2) hbar + M]^2)
inline double coulomb_energy_for_M(double alpha, const UnitsContext& u, int n_r, double M) {
  const double N = (n_r + 0.5) * u.hbar() + M;
  return -alpha * alpha * u.mass() / (2.0 * N * N);
}

inline double coulomb_energy(double alpha, const UnitsContext& u, int n_r, int l) {
  detail::require_quantum_numbers(n_r, l);
  return coulomb_energy_for_M(alpha, u, n_r, angular_momentum(l, u));
}

// Oscillator: E = omega [2 hbar (n_r + 1/2) + M]
inline double oscillator_energy_for_M(double omega, const UnitsContext& u, int n_r, double M) {
  return omega * (2.0 * u.hbar() * (n_r + 0.5) + M);
}

inline double oscillator_energy(double omega, const UnitsContext& u, int n_r, int l) {
  detail::require_quantum_numbers(n_r, l);
  return oscillator_energy_for_M(omega, u, n_r, angular_momentum(l, u));
}

/// Principal quantum number (n_r + 1/2) hbar + M.
inline double principal_action(const UnitsContext& u, int n_r, double M) { return (n_r + 0.5) * u.hbar() + M; }

// Hulthen: E = -(1 / (8 m r0^2)) (2 m v0 r0^2 / N - N)^2, bound while N^2 < 2 m v0 r0^2
inline double hulthen_energy_for_M(double v0, double r0, const UnitsContext& u, int n_r, double M) {
  const double N = principal_action(u, n_r, M);
  const double depth = 2.0 * u.mass() * v0 * r0 * r0;
  if (!(N * N < depth)) {
    std::ostringstream msg;
    msg << "Hulthen level n_r=" << n_r << " with N=" << N / u.hbar() << " hbar is unbound (needs N^2 < 2 m v0 r0^2 = "
        << depth << ")";
    throw NoBoundState(msg.str());
  }
  const double t = depth / N - N;
  return -t * t / (8.0 * u.mass() * r0 * r0);
}

inline double hulthen_energy(double v0, double r0, const UnitsContext& u, int n_r, int l) {
  detail::require_quantum_numbers(n_r, l);
  return hulthen_energy_for_M(v0, r0, u, n_r, angular_momentum(l, u));
}

/// Factor 1 - alpha * action / (r0 sqrt(2 m v0)) inside the Morse formulas.
inline double morse_bracket_factor(double v0, double alpha, double r0, const UnitsContext& u, double action) {
  return 1.0 - alpha * action / (r0 * std::sqrt(2.0 * u.mass() * v0));
}

/// Morse levels.
///
/// MorseNoCentrifugal solves the l = 0 equation without a centrifugal term:
/// action = hbar (n_r + 1/2); a non-positive bracket factor means unbound.
/// MorseWithM keeps the hbar^2/4r^2 term: action = 2 hbar (n_r + 1/2) + M.
/// This variant returns the formula value even when the factor is negative,
/// as happens for the shallow default well (v0 = alpha = r0 = 1).
inline double morse_energy_for_M(double v0, double alpha, double r0, const UnitsContext& u, int n_r, double M,
                                 SpectrumVariant variant) {
  double action = 0.0;
  switch (variant) {
    case SpectrumVariant::MorseNoCentrifugal: action = u.hbar() * (n_r + 0.5); break;
    case SpectrumVariant::MorseWithM: action = 2.0 * u.hbar() * (n_r + 0.5) + M; break;
    case SpectrumVariant::Standard: throw InvalidArgument("Morse levels need a Morse variant");
  }
  const double f = morse_bracket_factor(v0, alpha, r0, u, action);
  if (variant == SpectrumVariant::MorseNoCentrifugal && !(f > 0.0))
    throw NoBoundState("Morse level n_r=" + std::to_string(n_r) + " lies above dissociation");
  return -v0 * f * f;
}

inline double morse_energy(double v0, double alpha, double r0, const UnitsContext& u, int n_r, int l,
                           SpectrumVariant variant) {
  detail::require_quantum_numbers(n_r, l);
  if (variant == SpectrumVariant::MorseNoCentrifugal && l != 0)
    throw InvalidArgument("the no-centrifugal Morse variant is defined for l = 0 only");
  return morse_energy_for_M(v0, alpha, r0, u, n_r, angular_momentum(l, u), variant);
}

// Linear plus oscillator: E = omega [2 hbar (n_r + 1/2) + M] - (k / omega)^2 / (2 m)
inline double linear_oscillator_energy_for_M(double k, double omega, const UnitsContext& u, int n_r, double M) {
  const double shift = k / omega;
  return oscillator_energy_for_M(omega, u, n_r, M) - shift * shift / (2.0 * u.mass());
}

inline double linear_oscillator_energy(double k, double omega, const UnitsContext& u, int n_r, int l) {
  detail::require_quantum_numbers(n_r, l);
  if (k < 0.0) throw InvalidArgument("linear strength k must be non-negative");
  return linear_oscillator_energy_for_M(k, omega, u, n_r, angular_momentum(l, u));
}

/// A potential bundled with the closed-form variant to evaluate.
class ClosedFormSpectrum {
 public:
  ClosedFormSpectrum(PotentialSpec spec, SpectrumVariant variant = SpectrumVariant::Standard, UnitsContext units = {})
      : spec_(std::move(spec)), variant_(variant), units_(units) {
    const bool morse = spec_.kind() == PotentialKind::Morse;
    if (!spec_.has_closed_form())
      throw InvalidArgument("potential '" + std::string(to_string(spec_.kind())) + "' has no closed-form spectrum");
    if (morse && variant_ == SpectrumVariant::Standard) variant_ = SpectrumVariant::MorseWithM;
    if (!morse && variant_ != SpectrumVariant::Standard)
      throw InvalidArgument("Morse variants apply to the Morse potential only");
  }

  const PotentialSpec& spec() const noexcept { return spec_; }
  SpectrumVariant variant() const noexcept { return variant_; }
  const UnitsContext& units() const noexcept { return units_; }

  double energy(int n_r, int l) const {
    detail::require_quantum_numbers(n_r, l);
    if (variant_ == SpectrumVariant::MorseNoCentrifugal && l != 0)
      throw InvalidArgument("the no-centrifugal Morse variant is defined for l = 0 only");
    return energy_for_M(n_r, angular_momentum(l, units_));
  }

  /// Same formula with an arbitrary angular momentum magnitude M.
  double energy_for_M(int n_r, double M) const {
    switch (spec_.kind()) {
      case PotentialKind::Coulomb: return coulomb_energy_for_M(spec_.as<CoulombParams>().alpha, units_, n_r, M);
      case PotentialKind::IsotropicOscillator:
        return oscillator_energy_for_M(spec_.as<OscillatorParams>().omega, units_, n_r, M);
      case PotentialKind::Hulthen: {
        const auto& p = spec_.as<HulthenParams>();
        return hulthen_energy_for_M(p.v0, p.r0, units_, n_r, M);
      }
      case PotentialKind::Morse: {
        const auto& p = spec_.as<MorseParams>();
        return morse_energy_for_M(p.v0, p.alpha, p.r0, units_, n_r, M, variant_);
      }
      case PotentialKind::LinearPlusOscillator: {
        const auto& p = spec_.as<LinearOscillatorParams>();
        return linear_oscillator_energy_for_M(p.k, p.omega, units_, n_r, M);
      }
      case PotentialKind::Tabulated: break;
    }
    throw InvalidArgument("no closed form for tabulated potentials");
  }

 private:
  PotentialSpec spec_;
  SpectrumVariant variant_;
  UnitsContext units_;
};

}  // namespace wkbspec
