#pragma once

// Energies, gradients and Nehari projections for the limiting problem
//   L_Delta u = f(x,u) + sigma u ln|u|
// and the weighted fractional problem
//   (-Delta)^s u = a(s,x) |u|^{p-2} u.
//
// All gradients are coefficient gradients: grad_i = d(energy)/d(u_i), so the
// directional derivative of the energy along v is the plain dot product.

#include <cmath>

#include "loglap/assembly.hpp"
#include "loglap/nonlinearity.hpp"

namespace loglap {

// x ln|x| with the removable singularity at 0
inline double xlogx(double x) { return x == 0.0 ? 0.0 : x * std::log(std::abs(x)); }

// entropy term int_Omega u^2 ln|u| with 0 ln 0 = 0
inline double entropy_term(const GridFunction& u) {
  double acc = 0.0;
  for (int i = 0; i < u.size(); ++i) acc += u.values[i] * xlogx(u.values[i]);
  return u.h() * acc;
}

// int_Omega F(x,u)
inline double primitive_integral(const Nonlinearity& nl, const GridFunction& u) {
  double acc = 0.0;
  for (int i = 0; i < u.size(); ++i) acc += nl.F(i, u.values[i]);
  return u.h() * acc;
}

// int_Omega f(x,u) u
inline double f_times_u_integral(const Nonlinearity& nl, const GridFunction& u) {
  double acc = 0.0;
  for (int i = 0; i < u.size(); ++i) acc += nl.f(i, u.values[i]) * u.values[i];
  return u.h() * acc;
}

// E(u) = 1/2 E_L(u,u) - int F(x,u) - sigma/4 int u^2 (ln u^2 - 1)
inline double energy_limit(const OperatorSet& ops, const Nonlinearity& nl,
                           const GridFunction& u) {
  if (u.grid != ops.grid)
    throw dimension_error("energy_limit: field not on the operator grid");
  const double quad = 0.5 * u.values.dot(ops.A_L * u.values);
  return quad - primitive_integral(nl, u) -
         0.25 * nl.sigma * (2.0 * entropy_term(u) - u.norm_l2_sq());
}

// coefficient gradient of energy_limit: A_L u - M (f(x,u) + sigma u ln|u|)
inline Vector gradient_limit_vec(const OperatorSet& ops, const Nonlinearity& nl,
                                 const GridFunction& u) {
  Vector g = ops.A_L * u.values;
  const double h = u.h();
  for (int i = 0; i < u.size(); ++i)
    g[i] -= h * (nl.f(i, u.values[i]) + nl.sigma * xlogx(u.values[i]));
  return g;
}

inline GridFunction gradient_limit(const OperatorSet& ops,
                                   const Nonlinearity& nl,
                                   const GridFunction& u) {
  return GridFunction(u.grid, gradient_limit_vec(ops, nl, u));
}

// Nehari residual E_L(u,u) - int f(x,u) u - sigma int u^2 ln|u|
inline double nehari_residual_limit(const OperatorSet& ops,
                                    const Nonlinearity& nl,
                                    const GridFunction& u) {
  if (u.norm_linf() == 0.0)
    throw config_error("nehari_residual_limit: u must be nonzero");
  return u.values.dot(ops.A_L * u.values) - f_times_u_integral(nl, u) -
         nl.sigma * entropy_term(u);
}

// Closed-form Nehari projection for the linear-weight family:
//   ln r = [E_L(u,u) - int omega u^2 - sigma int u^2 ln|u|] / (sigma ||u||_2^2)
inline GridFunction nehari_project_limit(const OperatorSet& ops,
                                         const Nonlinearity& nl,
                                         const GridFunction& u) {
  if (!nl.is_linear())
    throw config_error(
        "nehari_project_limit: closed form needs the linear-weight family");
  if (nl.sigma == 0.0)
    throw config_error("nehari_project_limit: sigma must be nonzero");
  const double l2sq = u.norm_l2_sq();
  if (l2sq <= 0.0)
    throw config_error("nehari_project_limit: u vanishes");
  const double quad = u.values.dot(ops.A_L * u.values);
  const double log_r =
      (quad - f_times_u_integral(nl, u) - nl.sigma * entropy_term(u)) /
      (nl.sigma * l2sq);
  return GridFunction(u.grid, std::exp(log_r) * u.values);
}

// ---- fractional problem ----

// int_Omega a |u|^p
inline double weighted_power_integral(const Vector& a_field, double p,
                                      const GridFunction& u) {
  if (a_field.size() != u.size())
    throw dimension_error("weighted_power_integral: weight size mismatch");
  double acc = 0.0;
  for (int i = 0; i < u.size(); ++i)
    acc += a_field[i] * std::pow(std::abs(u.values[i]), p);
  return u.h() * acc;
}

// E_s(u) = 1/2 ||u||_s^2 - (1/p) int a |u|^p
inline double energy_frac(const OperatorSet& ops, double s, double p,
                          const Vector& a_field, const GridFunction& u) {
  if (u.grid != ops.grid)
    throw dimension_error("energy_frac: field not on the operator grid");
  if (!(p > 1.0 && p < critical_exponent(1, s)))
    throw config_error("energy_frac: exponent must lie in (1, 2_s^*)");
  const Matrix& A = ops.frac(s);
  return 0.5 * u.values.dot(A * u.values) -
         weighted_power_integral(a_field, p, u) / p;
}

inline Vector gradient_frac_vec(const OperatorSet& ops, double s, double p,
                                const Vector& a_field, const GridFunction& u) {
  Vector g = ops.frac(s) * u.values;
  const double h = u.h();
  for (int i = 0; i < u.size(); ++i) {
    const double t = u.values[i];
    g[i] -= h * a_field[i] * std::pow(std::abs(t), p - 2.0) * t;
  }
  return g;
}

inline double nehari_residual_frac(const OperatorSet& ops, double s, double p,
                                   const Vector& a_field,
                                   const GridFunction& u) {
  if (u.norm_linf() == 0.0)
    throw config_error("nehari_residual_frac: u must be nonzero");
  return u.values.dot(ops.frac(s) * u.values) -
         weighted_power_integral(a_field, p, u);
}

// r_{s,u} = (||u||_s^2 / int a |u|^p)^{1/(p-2)}; requires p != 2 and a
// positive weighted integral
inline double nehari_radius_frac(const OperatorSet& ops, double s, double p,
                                 const Vector& a_field, const GridFunction& u) {
  if (p == 2.0) throw config_error("nehari_radius_frac: p must differ from 2");
  const double denom = weighted_power_integral(a_field, p, u);
  if (!(denom > 0.0))
    throw config_error("nehari_radius_frac: int a |u|^p must be positive");
  const double num = u.values.dot(ops.frac(s) * u.values);
  return std::pow(num / denom, 1.0 / (p - 2.0));
}

inline GridFunction nehari_project_frac(const OperatorSet& ops, double s,
                                        double p, const Vector& a_field,
                                        const GridFunction& u) {
  const double r = nehari_radius_frac(ops, s, p, a_field, u);
  return GridFunction(u.grid, r * u.values);
}

// limiting Nehari radius r_{0,phi} of the fibering analysis:
//   exp([E_L(phi,phi) - p'(0) int ln|phi| phi^2 - int a'(0,x) phi^2]
//        / (p'(0) ||phi||_2^2))
inline double nehari_radius_limit(const OperatorSet& ops, double p_prime0,
                                  const Vector& a_prime0,
                                  const GridFunction& phi) {
  if (p_prime0 == 0.0)
    throw config_error("nehari_radius_limit: p'(0) must be nonzero");
  const double l2sq = phi.norm_l2_sq();
  if (l2sq <= 0.0) throw config_error("nehari_radius_limit: phi vanishes");
  const double quad = phi.values.dot(ops.A_L * phi.values);
  double aq = 0.0;
  for (int i = 0; i < phi.size(); ++i)
    aq += a_prime0[i] * phi.values[i] * phi.values[i];
  aq *= phi.h();
  return std::exp((quad - p_prime0 * entropy_term(phi) - aq) /
                  (p_prime0 * l2sq));
}

}  // namespace loglap
