#pragma once

// Units, quantum numbers, the built-in central potentials and the squared
// radial momentum 2m(E - V(r)) - M^2/r^2 that every other module integrates.

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

// pchip.hpp in Boost 1.74 calls isnan unqualified.
namespace boost::math::interpolators {
using std::isnan;
}
#include <boost/math/interpolators/pchip.hpp>

#include "wkbspec/errors.hpp"

namespace wkbspec {

using cplx = std::complex<double>;

class UnitsContext {
 public:
  UnitsContext() = default;
  UnitsContext(double hbar, double mass) : hbar_(hbar), mass_(mass) {
    if (!(hbar > 0.0) || !std::isfinite(hbar)) throw InvalidArgument("hbar must be positive and finite");
    if (!(mass > 0.0) || !std::isfinite(mass)) throw InvalidArgument("mass must be positive and finite");
  }

  double hbar() const noexcept { return hbar_; }
  double mass() const noexcept { return mass_; }

  friend bool operator==(const UnitsContext&, const UnitsContext&) = default;

 private:
  double hbar_ = 1.0;
  double mass_ = 1.0;
};

class QuantumNumbers {
 public:
  QuantumNumbers(int n_r, int l, int m_z = 0) : n_r_(n_r), l_(l), m_z_(m_z) {
    if (n_r < 0) throw InvalidArgument("n_r must be non-negative, got " + std::to_string(n_r));
    if (l < 0) throw InvalidArgument("l must be non-negative, got " + std::to_string(l));
    if (std::abs(m_z) > l)
      throw InvalidArgument("|m_z| must not exceed l (l=" + std::to_string(l) +
                            ", m_z=" + std::to_string(m_z) + ")");
  }

  int n_r() const noexcept { return n_r_; }
  int l() const noexcept { return l_; }
  int m_z() const noexcept { return m_z_; }

  friend bool operator==(const QuantumNumbers&, const QuantumNumbers&) = default;

 private:
  int n_r_;
  int l_;
  int m_z_;
};

enum class PotentialKind { Coulomb, IsotropicOscillator, Hulthen, Morse, LinearPlusOscillator, Tabulated };

inline std::string_view to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::Coulomb: return "coulomb";
    case PotentialKind::IsotropicOscillator: return "oscillator";
    case PotentialKind::Hulthen: return "hulthen";
    case PotentialKind::Morse: return "morse";
    case PotentialKind::LinearPlusOscillator: return "linear-oscillator";
    case PotentialKind::Tabulated: return "tabulated";
  }
  return "unknown";
}

inline PotentialKind parse_potential_kind(std::string_view name) {
  for (auto kind : {PotentialKind::Coulomb, PotentialKind::IsotropicOscillator, PotentialKind::Hulthen,
                    PotentialKind::Morse, PotentialKind::LinearPlusOscillator, PotentialKind::Tabulated}) {
    if (to_string(kind) == name) return kind;
  }
  if (name == "linear_oscillator" || name == "linear-plus-oscillator") return PotentialKind::LinearPlusOscillator;
  throw InvalidArgument("unknown potential '" + std::string(name) + "'");
}

/// V(r) = -alpha / r
struct CoulombParams {
  double alpha = 1.0;
};

/// V(r) = m omega^2 r^2 / 2
struct OscillatorParams {
  double omega = 1.0;
};

/// V(r) = -v0 e^{-r/r0} / (1 - e^{-r/r0})
struct HulthenParams {
  double v0 = 1.0;
  double r0 = 1.0;
};

/// V(r) = v0 [e^{-2 alpha (r/r0 - 1)} - 2 e^{-alpha (r/r0 - 1)}]
struct MorseParams {
  double v0 = 1.0;
  double alpha = 1.0;
  double r0 = 1.0;
};

/// V(r) = k r + m omega^2 r^2 / 2
struct LinearOscillatorParams {
  double k = 1.0;
  double omega = 1.0;
};

/// Samples (r_i, V_i) joined by a monotone (PCHIP) cubic and held constant
/// outside the table. No closed-form spectrum exists for these.
class TabulatedPotential {
 public:
  TabulatedPotential(std::vector<double> r, std::vector<double> v) {
    if (r.size() != v.size()) throw InvalidArgument("tabulated potential: r and V sizes differ");
    if (r.size() < 4) throw InvalidArgument("tabulated potential needs at least 4 samples");
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (!std::isfinite(r[i]) || !std::isfinite(v[i])) throw InvalidArgument("tabulated potential: non-finite sample");
      if (r[i] <= 0.0) throw InvalidArgument("tabulated potential: radii must be positive");
      if (i > 0 && !(r[i] > r[i - 1])) throw InvalidArgument("tabulated potential: radii must be strictly increasing");
    }
    r_lo_ = r.front();
    r_hi_ = r.back();
    v_lo_ = v.front();
    v_hi_ = v.back();
    interp_ = std::make_shared<const Interp>(std::move(r), std::move(v));
  }

  double operator()(double r) const {
    if (r <= r_lo_) return v_lo_;
    if (r >= r_hi_) return v_hi_;
    return (*interp_)(r);
  }

  double r_lo() const noexcept { return r_lo_; }
  double r_hi() const noexcept { return r_hi_; }
  double v_hi() const noexcept { return v_hi_; }

 private:
  using Interp = boost::math::interpolators::pchip<std::vector<double>>;
  std::shared_ptr<const Interp> interp_;
  double r_lo_ = 0.0, r_hi_ = 0.0, v_lo_ = 0.0, v_hi_ = 0.0;
};

class PotentialSpec {
 public:
  using Form = std::variant<CoulombParams, OscillatorParams, HulthenParams, MorseParams, LinearOscillatorParams,
                            TabulatedPotential>;

  static PotentialSpec coulomb(double alpha) {
    require_positive("alpha", alpha);
    return PotentialSpec(CoulombParams{alpha});
  }
  static PotentialSpec oscillator(double omega) {
    require_positive("omega", omega);
    return PotentialSpec(OscillatorParams{omega});
  }
  static PotentialSpec hulthen(double v0, double r0) {
    require_positive("v0", v0);
    require_positive("r0", r0);
    return PotentialSpec(HulthenParams{v0, r0});
  }
  static PotentialSpec morse(double v0, double alpha, double r0) {
    require_positive("v0", v0);
    require_positive("morse_alpha", alpha);
    require_positive("r0", r0);
    return PotentialSpec(MorseParams{v0, alpha, r0});
  }
  static PotentialSpec linear_plus_oscillator(double k, double omega) {
    require_positive("k", k);
    require_positive("omega", omega);
    return PotentialSpec(LinearOscillatorParams{k, omega});
  }
  static PotentialSpec tabulated(std::vector<double> r, std::vector<double> v) {
    return PotentialSpec(TabulatedPotential(std::move(r), std::move(v)));
  }

  /// Builds a closed-form potential from named parameters (alpha, omega, v0,
  /// r0, morse_alpha, k). Missing names default to 1; names that do not
  /// belong to `kind` are rejected.
  static PotentialSpec from_parameters(PotentialKind kind, const std::map<std::string, double>& params) {
    auto take = [&](std::initializer_list<std::string_view> allowed) {
      for (const auto& [name, value] : params) {
        bool ok = false;
        for (auto a : allowed) ok = ok || (a == name);
        if (!ok)
          throw InvalidArgument("parameter '" + name + "' does not apply to potential '" +
                                std::string(to_string(kind)) + "'");
        (void)value;
      }
      return [&](const std::string& name) {
        auto it = params.find(name);
        return it == params.end() ? 1.0 : it->second;
      };
    };
    switch (kind) {
      case PotentialKind::Coulomb: {
        auto get = take({"alpha"});
        return coulomb(get("alpha"));
      }
      case PotentialKind::IsotropicOscillator: {
        auto get = take({"omega"});
        return oscillator(get("omega"));
      }
      case PotentialKind::Hulthen: {
        auto get = take({"v0", "r0"});
        return hulthen(get("v0"), get("r0"));
      }
      case PotentialKind::Morse: {
        auto get = take({"v0", "morse_alpha", "r0"});
        return morse(get("v0"), get("morse_alpha"), get("r0"));
      }
      case PotentialKind::LinearPlusOscillator: {
        auto get = take({"k", "omega"});
        return linear_plus_oscillator(get("k"), get("omega"));
      }
      case PotentialKind::Tabulated: break;
    }
    throw InvalidArgument("tabulated potentials are built from samples, not named parameters");
  }

  PotentialKind kind() const noexcept { return static_cast<PotentialKind>(form_.index()); }
  const Form& form() const noexcept { return form_; }

  template <class P>
  const P& as() const {
    return std::get<P>(form_);
  }

  std::map<std::string, double> parameters() const {
    return std::visit(
        [](const auto& p) -> std::map<std::string, double> {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, CoulombParams>) return {{"alpha", p.alpha}};
          else if constexpr (std::is_same_v<P, OscillatorParams>) return {{"omega", p.omega}};
          else if constexpr (std::is_same_v<P, HulthenParams>) return {{"v0", p.v0}, {"r0", p.r0}};
          else if constexpr (std::is_same_v<P, MorseParams>)
            return {{"v0", p.v0}, {"morse_alpha", p.alpha}, {"r0", p.r0}};
          else if constexpr (std::is_same_v<P, LinearOscillatorParams>) return {{"k", p.k}, {"omega", p.omega}};
          else return {};
        },
        form_);
  }

  /// False for tabulated potentials ("numeric-only").
  bool has_closed_form() const noexcept { return kind() != PotentialKind::Tabulated; }

  /// True when V extends analytically into the complex plane.
  bool is_analytic() const noexcept { return kind() != PotentialKind::Tabulated; }

  /// True when V(r) is finite for every real r, so r < 0 is a meaningful
  /// continuation (oscillator, linear-plus-oscillator, Morse).
  bool is_entire() const noexcept {
    auto k = kind();
    return k == PotentialKind::IsotropicOscillator || k == PotentialKind::LinearPlusOscillator ||
           k == PotentialKind::Morse;
  }

  bool is_confining() const noexcept {
    auto k = kind();
    return k == PotentialKind::IsotropicOscillator || k == PotentialKind::LinearPlusOscillator;
  }

  /// Limit of V(r) as r -> infinity; +infinity for confining potentials.
  double dissociation_threshold() const {
    switch (kind()) {
      case PotentialKind::IsotropicOscillator:
      case PotentialKind::LinearPlusOscillator: return std::numeric_limits<double>::infinity();
      case PotentialKind::Tabulated: return as<TabulatedPotential>().v_hi();
      default: return 0.0;
    }
  }

  /// Natural length of the problem: Bohr radius, r0, or oscillator length.
  double length_scale(const UnitsContext& units = {}) const {
    const double h = units.hbar(), m = units.mass();
    switch (kind()) {
      case PotentialKind::Coulomb: return h * h / (m * as<CoulombParams>().alpha);
      case PotentialKind::IsotropicOscillator: return std::sqrt(h / (m * as<OscillatorParams>().omega));
      case PotentialKind::Hulthen: return as<HulthenParams>().r0;
      case PotentialKind::Morse: return as<MorseParams>().r0;
      case PotentialKind::LinearPlusOscillator: return std::sqrt(h / (m * as<LinearOscillatorParams>().omega));
      case PotentialKind::Tabulated: return as<TabulatedPotential>().r_hi();
    }
    return 1.0;
  }

  /// Natural energy step used when growing brackets.
  double energy_scale(const UnitsContext& units = {}) const {
    const double h = units.hbar(), m = units.mass();
    switch (kind()) {
      case PotentialKind::Coulomb: {
        double a = as<CoulombParams>().alpha;
        return m * a * a / (h * h);
      }
      case PotentialKind::IsotropicOscillator: return h * as<OscillatorParams>().omega;
      case PotentialKind::Hulthen: return as<HulthenParams>().v0;
      case PotentialKind::Morse: return as<MorseParams>().v0;
      case PotentialKind::LinearPlusOscillator: return h * as<LinearOscillatorParams>().omega;
      case PotentialKind::Tabulated: {
        double l = length_scale(units);
        return h * h / (m * l * l);
      }
    }
    return 1.0;
  }

 private:
  explicit PotentialSpec(Form form) : form_(std::move(form)) {}

  static void require_positive(const char* name, double value) {
    if (!(value > 0.0) || !std::isfinite(value))
      throw InvalidArgument(std::string("parameter ") + name + " must be strictly positive and finite");
  }

  Form form_;
};

namespace detail {

// Unchecked evaluation, valid for any real r where the form is defined
// (r < 0 only for entire potentials). May return +/-inf.
inline double potential_value(const PotentialSpec& spec, double r, const UnitsContext& units) {
  const double m = units.mass();
  switch (spec.kind()) {
    case PotentialKind::Coulomb: return -spec.as<CoulombParams>().alpha / r;
    case PotentialKind::IsotropicOscillator: {
      double w = spec.as<OscillatorParams>().omega;
      return 0.5 * m * w * w * r * r;
    }
    case PotentialKind::Hulthen: {
      const auto& p = spec.as<HulthenParams>();
      return -p.v0 / std::expm1(r / p.r0);
    }
    case PotentialKind::Morse: {
      const auto& p = spec.as<MorseParams>();
      double e = std::exp(-p.alpha * (r / p.r0 - 1.0));
      return p.v0 * (e * e - 2.0 * e);
    }
    case PotentialKind::LinearPlusOscillator: {
      const auto& p = spec.as<LinearOscillatorParams>();
      return p.k * r + 0.5 * m * p.omega * p.omega * r * r;
    }
    case PotentialKind::Tabulated: return spec.as<TabulatedPotential>()(r);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

inline cplx potential_value(const PotentialSpec& spec, cplx z, const UnitsContext& units) {
  const double m = units.mass();
  switch (spec.kind()) {
    case PotentialKind::Coulomb: return -spec.as<CoulombParams>().alpha / z;
    case PotentialKind::IsotropicOscillator: {
      double w = spec.as<OscillatorParams>().omega;
      return 0.5 * m * w * w * z * z;
    }
    case PotentialKind::Hulthen: {
      const auto& p = spec.as<HulthenParams>();
      return -p.v0 / (std::exp(z / p.r0) - 1.0);
    }
    case PotentialKind::Morse: {
      const auto& p = spec.as<MorseParams>();
      cplx e = std::exp(-p.alpha * (z / p.r0 - 1.0));
      return p.v0 * (e * e - 2.0 * e);
    }
    case PotentialKind::LinearPlusOscillator: {
      const auto& p = spec.as<LinearOscillatorParams>();
      return p.k * z + 0.5 * m * p.omega * p.omega * z * z;
    }
    case PotentialKind::Tabulated: break;
  }
  throw InvalidArgument("potential '" + std::string(to_string(spec.kind())) +
                        "' has no analytic continuation into the complex plane");
}

}  // namespace detail

/// V(r) for r > 0.
inline double evaluate_potential(const PotentialSpec& spec, double r, const UnitsContext& units = {}) {
  if (!(r > 0.0)) throw InvalidArgument("potential evaluated at non-positive radius");
  double v = detail::potential_value(spec, r, units);
  if (!std::isfinite(v)) throw DomainError("potential is not finite at r=" + std::to_string(r));
  return v;
}

/// 2m(E - V(r)) - M2/r^2, viewed as a function of position at fixed energy.
struct EffectiveMomentumSquared {
  PotentialSpec potential;
  double M2 = 0.0;
  double energy = 0.0;
  UnitsContext units;

  /// Signed evaluation: r < 0 is allowed for entire potentials. Infinite
  /// potentials map to -inf (forbidden).
  double operator()(double r) const {
    double v = detail::potential_value(potential, r, units);
    if (std::isnan(v)) return -std::numeric_limits<double>::infinity();
    double p2 = 2.0 * units.mass() * (energy - v);
    if (M2 != 0.0) p2 -= M2 / (r * r);
    return std::isnan(p2) ? -std::numeric_limits<double>::infinity() : p2;
  }

  cplx operator()(cplx z) const {
    cplx p2 = 2.0 * units.mass() * (energy - detail::potential_value(potential, z, units));
    if (M2 != 0.0) p2 -= M2 / (z * z);
    return p2;
  }

  /// V(r) + M2 / (2 m r^2): the energy below which r is forbidden.
  double effective_potential(double r) const {
    double v = detail::potential_value(potential, r, units);
    if (M2 != 0.0) v += M2 / (2.0 * units.mass() * r * r);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  }
};

inline double effective_p2(const PotentialSpec& spec, double M2, double E, const UnitsContext& units, double r) {
  double v = evaluate_potential(spec, r, units);
  return 2.0 * units.mass() * (E - v) - M2 / (r * r);
}

}  // namespace wkbspec
