#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "wkbspec/errors.hpp"

namespace wkbspec {

struct QuadratureOptions {
  double rel_tol = 1e-12;
  double abs_tol = 0.0;
  int min_order = 16;
  int max_order = 1 << 14;
};

struct QuadratureResult {
  double value = 0.0;
  int order = 0;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

inline GaussLegendreRule build_gauss_legendre(int n) {
  // P_n(x) and P_n'(x) by the three-term recurrence
  auto legendre = [n](double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    return std::pair{p1, n * (x * p1 - p0) / (x * x - 1.0)};
  };

  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 20; ++iter) {
      auto [p, dp] = legendre(x);
      double dx = p / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-15) break;
    }
    double dp = legendre(x).second;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace detail

/// Cached rule of order `n`; safe to call concurrently.
inline const GaussLegendreRule& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<const GaussLegendreRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<const GaussLegendreRule>(detail::build_gauss_legendre(n));
  return *slot;
}

template <class F>
double integrate_fixed(F&& f, double a, double b, int order) {
  const auto& rule = gauss_legendre(order);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < order; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

/// Gauss-Legendre with order doubling until two successive orders agree.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
  int order = opts.min_order;
  double prev = integrate_fixed(f, a, b, order);
  while (order < opts.max_order) {
    order *= 2;
    double next = integrate_fixed(f, a, b, order);
    double diff = std::abs(next - prev);
    if (diff <= opts.rel_tol * std::abs(next) || diff <= opts.abs_tol) return {next, order};
    prev = next;
  }
  std::ostringstream msg;
  msg << "Gauss-Legendre did not converge to rel_tol=" << opts.rel_tol << " by order " << opts.max_order;
  throw QuadratureFailure(msg.str());
}

/// Integrates g over [a, b] where g may carry inverse-square-root-type
/// behaviour at both ends, via x = (a+b)/2 + (b-a)/2 sin u.
template <class F>
QuadratureResult integrate_sine_mapped(F&& g, double a, double b, const QuadratureOptions& opts = {}) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  auto mapped = [&](double u) { return g(mid + half * std::sin(u)) * half * std::cos(u); };
  return integrate_adaptive(mapped, -0.5 * std::numbers::pi, 0.5 * std::numbers::pi, opts);
}

}  // namespace wkbspec
