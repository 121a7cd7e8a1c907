#pragma once

// Nonlinearity families f(x,t) of the limiting problem, with primitives and
// t-derivatives.  All families factor as f(x,t) = w(x) * rho(t); the
// primitive is closed-form for the linear family and a fixed 16-node
// Gauss-Legendre quadrature of the smooth rho for the log families.

#include <cmath>
#include <span>
#include <vector>

#include "loglap/grid.hpp"

namespace loglap {

enum class NonlinFamily { linear_weight, log_power, log_log };

namespace detail {

// 16-node Gauss-Legendre nodes/weights on [-1,1]
inline constexpr double gl16_x[16] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318,
    -0.7554044083550030, -0.6178762444026438, -0.4580167776572274,
    -0.2816035507792589, -0.0950125098376374, 0.0950125098376374,
    0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,
    0.9894009349916499};
inline constexpr double gl16_w[16] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928,
    0.1246289712555339, 0.1495959888165767, 0.1691565193950025,
    0.1826034150449236, 0.1894506104550685, 0.1894506104550685,
    0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479,
    0.0271524594117541};

// int_0^t rho(z) dz by 16-node Gauss-Legendre on panels of width at most 4;
// the panel cap keeps the rule inside the integrand's analyticity ellipse
// (log branch point at z = -e), so each panel is spectrally accurate
template <class Rho>
inline double gl16_primitive(Rho&& rho, double t) {
  const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(t) / 4.0)));
  const double w = t / panels;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = p * w;
    const double c = 0.5 * w;
    double panel = 0.0;
    for (int k = 0; k < 16; ++k)
      panel += gl16_w[k] * rho(a + c * (gl16_x[k] + 1.0));
    acc += c * panel;
  }
  return acc;
}

}  // namespace detail

struct Nonlinearity {
  NonlinFamily family = NonlinFamily::linear_weight;
  Vector weight;       // omega for linear_weight, g for the log families
  double theta = 0.5;  // log_power exponent, in [0,1)
  double mu = 2.0;     // log_log shift, > 0
  double sigma = 0.0;  // coefficient of the critical term u ln|u|

  bool is_linear() const { return family == NonlinFamily::linear_weight; }

  // scalar profile rho(t) with f(x,t) = weight(x) rho(t)
  double rho(double t) const {
    switch (family) {
      case NonlinFamily::linear_weight:
        return t;
      case NonlinFamily::log_power:
        return t * std::pow(std::log(M_E + std::abs(t)), theta);
      case NonlinFamily::log_log:
        return t * std::log(mu + std::log1p(std::abs(t)));
    }
    return 0.0;
  }

  double rho_prime(double t) const {
    const double at = std::abs(t);
    switch (family) {
      case NonlinFamily::linear_weight:
        return 1.0;
      case NonlinFamily::log_power: {
        const double l = std::log(M_E + at);
        return std::pow(l, theta) +
               theta * at * std::pow(l, theta - 1.0) / (M_E + at);
      }
      case NonlinFamily::log_log: {
        const double l = mu + std::log1p(at);
        return std::log(l) + at / (l * (1.0 + at));
      }
    }
    return 0.0;
  }

  double f(int cell, double t) const { return weight[cell] * rho(t); }
  double fprime(int cell, double t) const {
    return weight[cell] * rho_prime(t);
  }
  // primitive F(x,t) = int_0^t f(x,z) dz
  double F(int cell, double t) const {
    if (family == NonlinFamily::linear_weight)
      return 0.5 * weight[cell] * t * t;
    return weight[cell] *
           detail::gl16_primitive([this](double z) { return rho(z); }, t);
  }

  static Nonlinearity linear(Vector omega, double sigma) {
    Nonlinearity nl;
    nl.family = NonlinFamily::linear_weight;
    nl.weight = std::move(omega);
    nl.sigma = sigma;
    return nl;
  }
  static Nonlinearity log_power(Vector g, double theta, double sigma) {
    if (!(theta >= 0.0 && theta < 1.0))
      throw config_error("Nonlinearity::log_power: theta must lie in [0,1)");
    Nonlinearity nl;
    nl.family = NonlinFamily::log_power;
    nl.weight = std::move(g);
    nl.theta = theta;
    nl.sigma = sigma;
    return nl;
  }
  static Nonlinearity log_log(Vector g, double mu, double sigma) {
    if (!(mu > 0.0)) throw config_error("Nonlinearity::log_log: mu must be > 0");
    Nonlinearity nl;
    nl.family = NonlinFamily::log_log;
    nl.weight = std::move(g);
    nl.mu = mu;
    nl.sigma = sigma;
    return nl;
  }
};

struct FsigmaReport {
  bool holds = false;
  double worst = 0.0;   // minimum of t^2 f' + delta t^2 - t f over the grid
  double argmin = 0.0;  // t attaining it
};

// check of (f_sigma): t^2 f'(x,t) + delta t^2 - t f(x,t) >= 0 on a t-grid,
// uniformly over cells.  delta must satisfy delta < sigma.
inline FsigmaReport check_fsigma(const Nonlinearity& nl, double delta,
                                 std::span<const double> t_grid) {
  if (!(delta < nl.sigma))
    throw config_error("check_fsigma: requires delta < sigma");
  FsigmaReport rep;
  rep.worst = std::numeric_limits<double>::infinity();
  for (int cell = 0; cell < nl.weight.size(); ++cell)
    for (double t : t_grid) {
      const double v = t * t * nl.fprime(cell, t) + delta * t * t -
                       t * nl.f(cell, t);
      if (v < rep.worst) {
        rep.worst = v;
        rep.argmin = t;
      }
    }
  rep.holds = rep.worst >= -1e-12;
  return rep;
}

// named weight profiles for configuration: "const:c" (or bare number),
// "bump[:amp]", "cosine[:amp]"
inline Vector weight_profile(const Grid& g, const std::string& spec) {
  std::string name = spec;
  double amp = 1.0;
  if (auto pos = spec.find(':'); pos != std::string::npos) {
    name = spec.substr(0, pos);
    amp = std::stod(spec.substr(pos + 1));
  }
  const double mid = 0.5 * (g.interval.left + g.interval.right);
  const double half = 0.5 * g.interval.diameter();
  Vector w(g.n_cells);
  if (name == "const") {
    w.setConstant(amp);
  } else if (name == "bump") {
    for (int i = 0; i < g.n_cells; ++i) {
      const double xi = (g.centers[i] - mid) / half;
      w[i] = std::abs(xi) < 1.0 ? amp * std::exp(1.0 - 1.0 / (1.0 - xi * xi))
                                : 0.0;
    }
  } else if (name == "cosine") {
    for (int i = 0; i < g.n_cells; ++i) {
      const double xi = (g.centers[i] - mid) / half;
      w[i] = amp * std::cos(0.5 * M_PI * xi);
    }
  } else {
    // a bare number means a constant weight
    try {
      const double c = std::stod(spec);
      w.setConstant(c);
    } catch (const std::exception&) {
      throw config_error("weight_profile: unknown profile '" + spec + "'");
    }
  }
  return w;
}

}  // namespace loglap
