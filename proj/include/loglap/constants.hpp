#pragma once

// Special functions and the dimensional constants attached to the
// logarithmic Laplacian:
//
//   c_N   = pi^{-N/2} Gamma(N/2)
//   rho_N = 2 ln 2 + psi(N/2) - gamma
//   a_N   = (2/N) ln(Gamma(N)/Gamma(N/2)) - ln(4 pi) - 2 psi(N/2)
//   omega_N = pi^{N/2} / Gamma(N/2 + 1)          (unit-ball volume)
//
// plus the fractional Sobolev constant kappa_{N,s} and the fractional
// Laplacian normalization c(N,s).  Everything here is a pure function of
// its arguments and safe to call from any thread.

#include <cmath>
#include <string>

#include "loglap/errors.hpp"

namespace loglap {

// Euler-Mascheroni constant gamma = -Gamma'(1), 20 decimal digits.
inline constexpr double euler_gamma = 0.57721566490153286061;

// Gamma function for x > 0, Lanczos approximation (g = 7, 9 coefficients).
// Relative error below 1e-13 on (0, 170).
inline double gamma_fn(double x) {
  if (!(x > 0.0))
    throw domain_error("gamma_fn: argument must be positive, got " +
                       std::to_string(x));
  static constexpr double lanczos[9] = {
      0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
      771.32342877765313,       -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};
  if (x < 0.5) {
    // reflection keeps the series argument away from the pole
    return M_PI / (std::sin(M_PI * x) * gamma_fn(1.0 - x));
  }
  const double z = x - 1.0;
  double a = lanczos[0];
  for (int i = 1; i < 9; ++i) a += lanczos[i] / (z + i);
  const double t = z + 7.5;
  return std::sqrt(2.0 * M_PI) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

// Digamma psi = Gamma'/Gamma for x > 0.  Recurrence up to x >= 8, then the
// asymptotic series through the x^{-14} Bernoulli term; absolute error is
// well below 1e-12 on the whole half line.
inline double digamma_fn(double x) {
  if (!(x > 0.0))
    throw domain_error("digamma_fn: argument must be positive, got " +
                       std::to_string(x));
  double acc = 0.0;
  while (x < 8.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // B_2/2 x^-2, B_4/4 x^-4, ... with B = {1/6, -1/30, 1/42, -1/30, 5/66,
  // -691/2730, 7/6}
  double series = inv2 * (1.0 / 12 -
                  inv2 * (1.0 / 120 -
                  inv2 * (1.0 / 252 -
                  inv2 * (1.0 / 240 -
                  inv2 * (1.0 / 132 -
                  inv2 * (691.0 / 32760 -
                  inv2 * (1.0 / 12)))))));
  return acc + std::log(x) - 0.5 * inv - series;
}

struct DimensionalConstants {
  int N = 1;
  double c_N = 0.0;
  double rho_N = 0.0;
  double a_N = 0.0;
  double omega_N = 0.0;
};

inline DimensionalConstants constants_for(int N) {
  if (N < 1) throw domain_error("constants_for: N must be a positive integer");
  DimensionalConstants c;
  const double n = static_cast<double>(N);
  c.N = N;
  c.c_N = std::pow(M_PI, -0.5 * n) * gamma_fn(0.5 * n);
  c.rho_N = 2.0 * std::log(2.0) + digamma_fn(0.5 * n) - euler_gamma;
  c.a_N = (2.0 / n) * std::log(gamma_fn(n) / gamma_fn(0.5 * n)) -
          std::log(4.0 * M_PI) - 2.0 * digamma_fn(0.5 * n);
  c.omega_N = std::pow(M_PI, 0.5 * n) / gamma_fn(0.5 * n + 1.0);
  return c;
}

// Sharp constant of the fractional Sobolev inequality
// ||u||_{L^{2_s^*}}^2 <= kappa_{N,s} ||u||_s^2, valid for 0 < s < N/2.
inline double kappa_frac_sobolev(int N, double s) {
  if (N < 1) throw domain_error("kappa_frac_sobolev: N must be positive");
  const double n = static_cast<double>(N);
  if (!(s > 0.0 && s < 0.5 * n))
    throw domain_error("kappa_frac_sobolev: need 0 < s < N/2, got s = " +
                       std::to_string(s));
  return std::pow(2.0, -2.0 * s) * std::pow(M_PI, -s) *
         gamma_fn(0.5 * (n - 2.0 * s)) / gamma_fn(0.5 * (n + 2.0 * s)) *
         std::pow(gamma_fn(n) / gamma_fn(0.5 * n), 2.0 * s / n);
}

// Normalization c(N,s) = 2^{2s} pi^{-N/2} s Gamma((N+2s)/2) / Gamma(1-s) of
// the singular-integral fractional Laplacian.
inline double frac_normalization(int N, double s) {
  if (N < 1) throw domain_error("frac_normalization: N must be positive");
  if (!(s > 0.0 && s < 1.0))
    throw domain_error("frac_normalization: need s in (0,1)");
  const double n = static_cast<double>(N);
  return std::pow(2.0, 2.0 * s) * std::pow(M_PI, -0.5 * n) * s *
         gamma_fn(0.5 * (n + 2.0 * s)) / gamma_fn(1.0 - s);
}

// Critical fractional Sobolev exponent 2_s^* = 2N/(N-2s).
inline double critical_exponent(int N, double s) {
  const double n = static_cast<double>(N);
  if (!(s > 0.0 && s < 0.5 * n))
    throw domain_error("critical_exponent: need 0 < s < N/2");
  return 2.0 * n / (n - 2.0 * s);
}

}  // namespace loglap
