#pragma once

// Orlicz Phi-functions, modulars and Luxemburg norms for the embedding
// studies.  phi_critical(t) = t^2 ln(e+t) is the growth that exactly matches
// the energy space; the log_pow / log_log families are compactly embedded,
// the supercritical family is not even continuously embedded.

#include <algorithm>
#include <cmath>

#include "loglap/grid.hpp"

namespace loglap {

enum class PhiTag { critical, log_pow, log_log, supercritical };

struct PhiFunction {
  PhiTag tag = PhiTag::critical;
  double param = 0.0;  // theta for log_pow, epsilon for supercritical

  double operator()(double t) const {
    t = std::abs(t);
    switch (tag) {
      case PhiTag::critical:
        return t * t * std::log(M_E + t);
      case PhiTag::log_pow:
        return t * t * std::pow(std::log(M_E + t), param);
      case PhiTag::log_log:
        return t * t * std::log(M_E + std::log1p(t));
      case PhiTag::supercritical:
        return t * t * std::pow(std::log(M_E + t), 1.0 + param);
    }
    return 0.0;
  }

  static PhiFunction critical() { return {PhiTag::critical, 0.0}; }
  static PhiFunction log_pow(double theta) {
    if (!(theta >= 0.0 && theta < 1.0))
      throw config_error("PhiFunction::log_pow: theta must lie in [0,1)");
    return {PhiTag::log_pow, theta};
  }
  static PhiFunction log_log() { return {PhiTag::log_log, 0.0}; }
  static PhiFunction supercritical(double eps = 0.5) {
    if (!(eps > 0.0))
      throw config_error("PhiFunction::supercritical: eps must be positive");
    return {PhiTag::supercritical, eps};
  }
};

// modular rho_phi(u) = int_Omega phi(|u|), exact for cell-wise constants
inline double modular(const PhiFunction& phi, const GridFunction& u) {
  double acc = 0.0;
  for (int i = 0; i < u.size(); ++i) acc += phi(u.values[i]);
  return u.h() * acc;
}

// Luxemburg norm inf{ lambda > 0 : modular(u/lambda) <= 1 } by monotone
// bisection; the modular is strictly decreasing in lambda for u != 0.
inline double luxemburg_norm(const PhiFunction& phi, const GridFunction& u) {
  if (u.norm_linf() == 0.0) return 0.0;
  auto scaled_modular = [&](double lambda) {
    double acc = 0.0;
    for (int i = 0; i < u.size(); ++i) acc += phi(u.values[i] / lambda);
    return u.h() * acc;
  };
  double hi = std::max(1.0, u.norm_linf() * u.grid->interval.diameter());
  while (scaled_modular(hi) > 1.0) hi *= 2.0;
  double lo = 1e-14;
  while (scaled_modular(lo) <= 1.0 && lo > 1e-300) lo *= 0.5;
  for (int it = 0; it < 200 && (hi - lo) > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (scaled_modular(mid) <= 1.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

// rescale u so that modular(phi_critical, u) = 1
inline GridFunction normalize_modular(const PhiFunction& phi,
                                      const GridFunction& u) {
  if (u.norm_linf() == 0.0)
    throw domain_error("normalize_modular: zero field");
  double lo = 0.0, hi = 1.0;
  auto mod_scaled = [&](double c) {
    double acc = 0.0;
    for (int i = 0; i < u.size(); ++i) acc += phi(c * u.values[i]);
    return u.h() * acc;
  };
  while (mod_scaled(hi) < 1.0) hi *= 2.0;
  for (int it = 0; it < 200 && (hi - lo) > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mod_scaled(mid) < 1.0 ? lo : hi) = mid;
  }
  const double c = 0.5 * (lo + hi);
  return GridFunction(u.grid, c * u.values);
}

}  // namespace loglap
