#pragma once

// Least-energy solvers.
//
// Superlinear regime (sigma in (0, 4/N), or p in (2, 2_s^*)): projected
// descent on the Nehari manifold.  Each accepted step is re-projected, the
// projection being closed-form for the linear-weight family / the fractional
// power energy and a first-positive-root search on the fibering derivative
// otherwise.
//
// Sublinear regime (sigma < 0, or p in (1,2)): the energy is coercive and is
// minimized directly by L-BFGS (two-loop curvature-pair recursion) with
// Armijo backtracking, with a stall restart from a small multiple of a bump.
//
// Gradient norms are reported as the L2 norm of the L2-gradient field, i.e.
// ||g||_2 / sqrt(h) for a coefficient gradient g.

#include <cmath>
#include <deque>
#include <limits>

#include "loglap/energy.hpp"
#include "loglap/spectral.hpp"

namespace loglap {

struct SolveConfig {
  double tol = 1e-8;       // convergence threshold on the gradient norm
  int max_iters = 20000;
  std::uint64_t seed = 1;
  double armijo_c = 1e-4;  // sufficient-decrease constant
  double backtrack = 0.5;  // step shrink factor
  double step0 = 1.0;      // initial trial step
  int lbfgs_memory = 8;
};

enum class SignPattern { nonnegative, nonpositive, mixed };

inline SignPattern classify_sign(const Vector& v) {
  const double scale = v.cwiseAbs().maxCoeff();
  const double tol = 1e-10 * std::max(1.0, scale);
  const bool has_pos = (v.array() > tol).any();
  const bool has_neg = (v.array() < -tol).any();
  if (has_pos && has_neg) return SignPattern::mixed;
  return has_neg ? SignPattern::nonpositive : SignPattern::nonnegative;
}

inline const char* to_string(SignPattern s) {
  switch (s) {
    case SignPattern::nonnegative: return "nonnegative";
    case SignPattern::nonpositive: return "nonpositive";
    case SignPattern::mixed: return "mixed";
  }
  return "?";
}

struct SolveReport {
  GridFunction u_star;
  double energy = 0.0;
  double gradient_norm = 0.0;
  double nehari_residual = 0.0;
  int iterations = 0;
  SignPattern sign_pattern = SignPattern::mixed;
  bool converged = false;
  double norm_l2 = 0.0;
  double norm_hs = 0.0;   // sqrt E(u,u) for the limit problem, ||u||_s for (P_s)
  double norm_linf = 0.0;
  bool fibering_multiple_roots = false;
  double m_lower = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

// deterministic random field used for seeded initial guesses
inline GridFunction seeded_field(GridPtr g, std::uint64_t seed) {
  std::uint64_t state = seed;
  auto next_unit = [&state] {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
  };
  Vector v(g->n_cells);
  for (int i = 0; i < g->n_cells; ++i) v[i] = 2.0 * next_unit() - 1.0;
  return GridFunction(g, v);
}

// first positive root of psi(r) = nehari_residual(r u) for a general family;
// seeds at r_seed and brackets the sign change + -> -
inline double first_fibering_root(const OperatorSet& ops,
                                  const Nonlinearity& nl,
                                  const GridFunction& u, double r_seed,
                                  bool* extra_roots) {
  const double quad = u.values.dot(ops.A_L * u.values);
  const double ent = entropy_term(u);
  const double l2sq = u.norm_l2_sq();
  const double h = u.h();
  auto psi = [&](double r) {
    double fu = 0.0;
    for (int i = 0; i < u.size(); ++i)
      fu += nl.f(i, r * u.values[i]) * r * u.values[i];
    fu *= h;
    return r * r * quad - fu -
           nl.sigma * (r * r * ent + r * r * std::log(r) * l2sq);
  };
  // walk down until the fibering slope is positive (n_u' > 0 near 0), then
  // walk up in fine geometric steps so the bracket holds the FIRST crossing
  double lo = r_seed;
  int guard = 0;
  while (psi(lo) <= 0.0 && guard++ < 400) lo *= 0.5;
  if (psi(lo) <= 0.0)
    throw solver_error("fibering root: could not bracket from below");
  double hi = lo;
  guard = 0;
  while (psi(hi) > 0.0 && guard++ < 800) {
    lo = hi;
    hi *= 1.25;
  }
  if (psi(hi) > 0.0)
    throw solver_error("fibering root: could not bracket from above");
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (psi(mid) > 0.0 ? lo : hi) = mid;
  }
  const double root = 0.5 * (lo + hi);
  if (extra_roots) {
    // scan beyond the first critical point for further sign changes
    double prev = psi(1.05 * root);
    for (int k = 1; k <= 64; ++k) {
      const double r = root * (1.05 + 3.0 * k / 64.0);
      const double cur = psi(r);
      if (prev < 0.0 && cur > 0.0) {
        *extra_roots = true;
        break;
      }
      prev = cur;
    }
  }
  return root;
}

}  // namespace detail

// ---- superlinear limiting problem ----

namespace detail {

// limited-memory BFGS two-loop recursion with Armijo backtracking on a
// generic coefficient-space objective
template <class EnergyFn, class GradFn>
std::pair<GridFunction, int> lbfgs_descend(GridFunction u, EnergyFn&& energy_of,
                                           GradFn&& grad_of,
                                           const SolveConfig& cfg,
                                           double grad_tol_coeff) {
  struct Pair { Vector s, y; double rho; };
  std::deque<Pair> mem;
  Vector g = grad_of(u);
  double energy = energy_of(u);
  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    if (g.norm() <= grad_tol_coeff) break;
    // two-loop recursion
    Vector q = g;
    std::vector<double> alphas(mem.size());
    for (int k = static_cast<int>(mem.size()) - 1; k >= 0; --k) {
      alphas[k] = mem[k].rho * mem[k].s.dot(q);
      q -= alphas[k] * mem[k].y;
    }
    double gamma = 1.0;
    if (!mem.empty()) {
      const auto& last = mem.back();
      gamma = last.s.dot(last.y) / last.y.squaredNorm();
    }
    Vector d = gamma * q;
    for (size_t k = 0; k < mem.size(); ++k) {
      const double beta = mem[k].rho * mem[k].y.dot(d);
      d += (alphas[k] - beta) * mem[k].s;
    }
    d = -d;
    double slope = g.dot(d);
    if (!(slope < 0.0)) {  // cautious reset to steepest descent
      d = -g;
      slope = -g.squaredNorm();
      mem.clear();
    }
    double alpha = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      GridFunction trial(u.grid, u.values + alpha * d);
      const double e_new = energy_of(trial);
      if (e_new <= energy + cfg.armijo_c * alpha * slope) {
        Vector g_new = grad_of(trial);
        Pair pr;
        pr.s = trial.values - u.values;
        pr.y = g_new - g;
        const double sy = pr.s.dot(pr.y);
        if (sy > 1e-14 * pr.s.norm() * pr.y.norm()) {
          pr.rho = 1.0 / sy;
          mem.push_back(std::move(pr));
          if (static_cast<int>(mem.size()) > cfg.lbfgs_memory)
            mem.pop_front();
        }
        u = std::move(trial);
        g = std::move(g_new);
        energy = e_new;
        accepted = true;
        break;
      }
      alpha *= cfg.backtrack;
    }
    if (!accepted) {
      if (mem.empty()) break;  // steepest descent stalled as well
      mem.clear();
    }
  }
  return {std::move(u), it};
}

// damped Newton iteration on the stationarity system grad = 0, accepted on
// residual decrease; quadratic end-game once a descent method has reached
// the basin
template <class GradFn, class HessFn>
std::pair<GridFunction, bool> newton_polish(GridFunction u, GradFn&& grad_of,
                                            HessFn&& hess_of,
                                            double grad_tol_coeff,
                                            int max_steps = 30) {
  Vector g = grad_of(u);
  for (int it = 0; it < max_steps; ++it) {
    if (g.norm() <= grad_tol_coeff) return {std::move(u), true};
    const Matrix H = hess_of(u);
    Vector step = Eigen::PartialPivLU<Matrix>(H).solve(-g);
    if (!step.allFinite()) break;
    double t = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 30; ++bt) {
      GridFunction trial(u.grid, u.values + t * step);
      Vector g_new = grad_of(trial);
      if (g_new.allFinite() && g_new.norm() < g.norm()) {
        u = std::move(trial);
        g = std::move(g_new);
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }
  return {std::move(u), g.norm() <= grad_tol_coeff};
}

}  // namespace detail

// Hessian of the limiting energy: A_L - h diag(f'(x,u) + sigma (ln|u| + 1))
inline Matrix hessian_limit(const OperatorSet& ops, const Nonlinearity& nl,
                            const GridFunction& u) {
  Matrix H = ops.A_L;
  const double h = u.h();
  for (int i = 0; i < u.size(); ++i) {
    const double t = u.values[i];
    const double lnt = std::log(std::max(std::abs(t), 1e-300));
    H(i, i) -= h * (nl.fprime(i, t) + nl.sigma * (lnt + 1.0));
  }
  return H;
}

// Hessian of the fractional energy: A_s - h diag((p-1) a |u|^{p-2})
inline Matrix hessian_frac(const OperatorSet& ops, double s, double p,
                           const Vector& a_field, const GridFunction& u) {
  Matrix H = ops.frac(s);
  const double h = u.h();
  for (int i = 0; i < u.size(); ++i) {
    const double at = std::max(std::abs(u.values[i]), 1e-300);
    H(i, i) -= h * (p - 1.0) * a_field[i] * std::pow(at, p - 2.0);
  }
  return H;
}

// The Nehari manifold is a natural constraint here: at a constrained
// critical point the multiplier vanishes (the fibering second derivative is
// negative on the manifold), so the full gradient of E is zero.  The solver
// therefore minimizes the retracted energy v -> E(project(v)) without
// constraints; its exact gradient is r(v) grad E(r(v) v) because the radial
// derivative of E vanishes after projection.
inline SolveReport solve_superlinear_limit(const OperatorSet& ops,
                                           const Nonlinearity& nl,
                                           const GridFunction& init,
                                           const SolveConfig& cfg) {
  if (!(nl.sigma > 0.0 && nl.sigma < 4.0))
    throw config_error(
        "solve_superlinear_limit: requires sigma in (0, 4/N) (N = 1)");
  if (init.norm_linf() == 0.0)
    throw config_error("solve_superlinear_limit: init must be nonzero");

  const double h = init.h();
  const double sqrt_h = std::sqrt(h);
  bool extra_roots = false;
  const double inf = std::numeric_limits<double>::infinity();

  auto radius = [&](const GridFunction& v) -> double {
    if (v.norm_linf() == 0.0 || v.norm_l2_sq() == 0.0) return -1.0;
    if (nl.is_linear()) {
      const double quad = v.values.dot(ops.A_L * v.values);
      const double log_r =
          (quad - f_times_u_integral(nl, v) - nl.sigma * entropy_term(v)) /
          (nl.sigma * v.norm_l2_sq());
      return std::exp(log_r);
    }
    try {
      return detail::first_fibering_root(ops, nl, v, 1.0, &extra_roots);
    } catch (const solver_error&) {
      return -1.0;
    }
  };
  auto energy_of = [&](const GridFunction& v) -> double {
    const double r = radius(v);
    if (r <= 0.0) return inf;
    return energy_limit(ops, nl, GridFunction(v.grid, r * v.values));
  };
  auto grad_of = [&](const GridFunction& v) -> Vector {
    const double r = radius(v);
    if (r <= 0.0) return Vector::Zero(v.size());
    GridFunction u(v.grid, r * v.values);
    return r * gradient_limit_vec(ops, nl, u);
  };

  if (!(radius(init) > 0.0))
    throw solver_error("solve_superlinear_limit: Nehari projection of the "
                       "initial iterate failed");
  GridFunction u(init.grid, radius(init) * init.values);
  auto newton_grad = [&](const GridFunction& v) {
    return gradient_limit_vec(ops, nl, v);
  };
  auto newton_hess = [&](const GridFunction& v) {
    return hessian_limit(ops, nl, v);
  };
  int total = 0;
  double grad_norm = inf;
  SolveConfig round_cfg = cfg;
  round_cfg.max_iters = std::min(cfg.max_iters, 1500);
  for (int round = 0; round < 8; ++round) {
    auto [v, iters] = detail::lbfgs_descend(u, energy_of, grad_of, round_cfg,
                                            cfg.tol * sqrt_h);
    total += iters;
    // sign measurement doubling as a descent move: |u| never raises the
    // near form and the families have even primitives, so it escapes the
    // sign-changing critical points that trap the flow
    if (energy_of(GridFunction(v.grid, v.values.cwiseAbs())) <
        energy_of(v))
      v.values = v.values.cwiseAbs();
    // quadratic end game on the free system (zero Nehari multiplier)
    auto [w, newton_ok] = detail::newton_polish(std::move(v), newton_grad,
                                                newton_hess, cfg.tol * sqrt_h);
    const double r = radius(w);
    if (r <= 0.0)
      throw solver_error("solve_superlinear_limit: iterate left the "
                         "projectable cone");
    u = GridFunction(w.grid, r * w.values);
    grad_norm = gradient_limit_vec(ops, nl, u).norm() / sqrt_h;
    if (grad_norm <= cfg.tol || total >= cfg.max_iters) break;
  }

  SolveReport rep;
  rep.u_star = u;
  rep.energy = energy_limit(ops, nl, u);
  rep.gradient_norm = grad_norm;
  rep.nehari_residual = nehari_residual_limit(ops, nl, u);
  rep.iterations = total;
  rep.sign_pattern = classify_sign(u.values);
  rep.converged = grad_norm <= cfg.tol;
  rep.norm_l2 = u.norm_l2();
  rep.norm_hs = std::sqrt(std::max(0.0, quadratic_form(ops.E_near, u, u)));
  rep.norm_linf = u.norm_linf();
  rep.fibering_multiple_roots = extra_roots;
  return rep;
}

// ---- sublinear limiting problem ----

inline SolveReport solve_sublinear_limit(const OperatorSet& ops,
                                         const Nonlinearity& nl,
                                         const GridFunction& init,
                                         const SolveConfig& cfg) {
  if (!(nl.sigma < 0.0))
    throw config_error("solve_sublinear_limit: requires sigma < 0");
  const double h = ops.grid->h;
  const double sqrt_h = std::sqrt(h);
  auto energy_of = [&](const GridFunction& v) {
    return energy_limit(ops, nl, v);
  };
  auto grad_of = [&](const GridFunction& v) {
    return gradient_limit_vec(ops, nl, v);
  };

  // the energy of t * bump is negative for small t; used as the stall restart
  auto negative_seed = [&]() {
    GridFunction b = bump(ops.grid);
    for (double t = 1.0; t > 1e-12; t *= 0.5) {
      GridFunction tb(ops.grid, t * b.values);
      if (energy_of(tb) < 0.0) return tb;
    }
    throw solver_error(
        "solve_sublinear_limit: no negative-energy seed found");
  };

  GridFunction u = init;
  if (u.norm_linf() == 0.0) u = negative_seed();
  const double tol_coeff = cfg.tol * sqrt_h;

  auto [v, iters] = detail::lbfgs_descend(u, energy_of, grad_of, cfg, tol_coeff);
  u = std::move(v);
  int total_iters = iters;
  if (energy_of(u) >= 0.0) {  // descent stalled near zero, restart once
    auto [v2, it2] =
        detail::lbfgs_descend(negative_seed(), energy_of, grad_of, cfg,
                              tol_coeff);
    u = std::move(v2);
    total_iters += it2;
    if (energy_of(u) >= 0.0)
      throw solver_error("solve_sublinear_limit: minimizer has nonnegative "
                         "energy after restart");
  }

  // sign measurement: |u| never increases the energy; adopt it and re-polish
  {
    GridFunction au(ops.grid, u.values.cwiseAbs());
    if (energy_of(au) <= energy_of(u)) {
      auto [v3, it3] = detail::lbfgs_descend(std::move(au), energy_of, grad_of,
                                             cfg, tol_coeff);
      u = std::move(v3);
      total_iters += it3;
    }
  }

  SolveReport rep;
  rep.u_star = u;
  rep.energy = energy_of(u);
  rep.gradient_norm = grad_of(u).norm() / sqrt_h;
  rep.nehari_residual = nehari_residual_limit(ops, nl, u);
  rep.iterations = total_iters;
  rep.sign_pattern = classify_sign(u.values);
  rep.converged = rep.gradient_norm <= cfg.tol;
  rep.norm_l2 = u.norm_l2();
  rep.norm_hs = std::sqrt(std::max(0.0, quadratic_form(ops.E_near, u, u)));
  rep.norm_linf = u.norm_linf();
  return rep;
}

// ---- weighted fractional problem (P_s) ----

// Nehari lower bound M(s) of the superlinear problem, evaluated with the
// working exponent beta(s): one above the larger of the two admissibility
// thresholds, with gamma = delta/2 and delta = 1 - N p'(0)/4.
inline double nehari_lower_bound_M(const OperatorSet& ops, double s, double p,
                                   const Vector& a_field) {
  const double crit = critical_exponent(1, s);
  if (!(p > 2.0 && p < crit))
    throw config_error("nehari_lower_bound_M: superlinear p required");
  const double sigma_eff = (p - 2.0) / s;
  const double delta = 1.0 - sigma_eff / 4.0;
  if (!(delta > 0.0))
    throw config_error("nehari_lower_bound_M: p'(0) must stay below 4/N");
  const double beta =
      std::max(crit / (crit - p), 1.0 + (1.0 - 2.0 * s) / (s * delta)) + 1.0;
  const Grid& g = *ops.grid;
  double acc = 0.0;
  for (int i = 0; i < g.n_cells; ++i)
    acc += std::pow(std::abs(a_field[i]), beta);
  const double a_norm = std::pow(g.h * acc, 1.0 / beta);
  const double measure = g.interval.diameter();
  const double kappa = kappa_frac_sobolev(1, s);
  const double base = a_norm *
                      std::pow(measure, 1.0 - 1.0 / beta - p / crit) *
                      std::pow(kappa, 0.5 * p);
  return std::pow(base, 1.0 / (2.0 - p));
}

inline SolveReport solve_frac(const OperatorSet& ops, double s, double p,
                              const Vector& a_field, const GridFunction& init,
                              const SolveConfig& cfg) {
  const double crit = critical_exponent(1, s);
  if (p == 2.0)
    throw config_error("solve_frac: p = 2 is excluded (linear eigenproblem)");
  if (!(p > 1.0 && p < crit))
    throw config_error("solve_frac: p must lie in (1,2) or (2, 2_s^*)");
  const Matrix& A = ops.frac(s);
  const double h = ops.grid->h;
  const double sqrt_h = std::sqrt(h);
  auto energy_of = [&](const GridFunction& v) {
    return energy_frac(ops, s, p, a_field, v);
  };
  auto grad_of = [&](const GridFunction& v) {
    return gradient_frac_vec(ops, s, p, a_field, v);
  };

  SolveReport rep;
  if (p > 2.0) {
    // retracted-energy descent with the closed-form Nehari radius; the
    // manifold is again a natural constraint ((psi'(u), u) = (2-p)||u||_s^2
    // is negative), so the full gradient vanishes at the minimizer
    if (init.norm_linf() == 0.0)
      throw config_error("solve_frac: init must be nonzero");
    const double inf = std::numeric_limits<double>::infinity();
    auto radius = [&](const GridFunction& v) -> double {
      if (v.norm_linf() == 0.0) return -1.0;
      const double denom = weighted_power_integral(a_field, p, v);
      if (!(denom > 0.0)) return -1.0;
      return std::pow(v.values.dot(A * v.values) / denom, 1.0 / (p - 2.0));
    };
    auto retracted_energy = [&](const GridFunction& v) -> double {
      const double r = radius(v);
      if (r <= 0.0) return inf;
      return energy_of(GridFunction(v.grid, r * v.values));
    };
    auto retracted_grad = [&](const GridFunction& v) -> Vector {
      const double r = radius(v);
      if (r <= 0.0) return Vector::Zero(v.size());
      return r * grad_of(GridFunction(v.grid, r * v.values));
    };
    GridFunction u = nehari_project_frac(ops, s, p, a_field, init);
    auto newton_hess = [&](const GridFunction& v) {
      return hessian_frac(ops, s, p, a_field, v);
    };
    int total = 0;
    double grad_norm = inf;
    SolveConfig round_cfg = cfg;
    round_cfg.max_iters = std::min(cfg.max_iters, 1500);
    for (int round = 0; round < 8; ++round) {
      auto [v, iters] = detail::lbfgs_descend(u, retracted_energy,
                                              retracted_grad, round_cfg,
                                              cfg.tol * sqrt_h);
      total += iters;
      if (retracted_energy(GridFunction(v.grid, v.values.cwiseAbs())) <
          retracted_energy(v))
        v.values = v.values.cwiseAbs();
      auto [w, newton_ok] = detail::newton_polish(std::move(v), grad_of,
                                                  newton_hess,
                                                  cfg.tol * sqrt_h);
      const double r = radius(w);
      if (r <= 0.0)
        throw solver_error("solve_frac: iterate left the projectable cone");
      u = GridFunction(w.grid, r * w.values);
      grad_norm = grad_of(u).norm() / sqrt_h;
      if (grad_norm <= cfg.tol || total >= cfg.max_iters) break;
    }
    rep.u_star = u;
    rep.energy = energy_of(u);
    rep.gradient_norm = grad_norm;
    rep.nehari_residual = nehari_residual_frac(ops, s, p, a_field, u);
    rep.iterations = total;
    rep.converged = grad_norm <= cfg.tol;
    rep.m_lower = nehari_lower_bound_M(ops, s, p, a_field);
  } else {
    // direct coercive descent; measure the sign theorem by accepting |u|
    // whenever it does not increase the energy
    GridFunction u = init;
    if (u.norm_linf() == 0.0) u = bump(ops.grid);
    const double tol_coeff = cfg.tol * sqrt_h;
    int total = 0;
    for (int round = 0; round < 4; ++round) {
      auto [v, iters] =
          detail::lbfgs_descend(u, energy_of, grad_of, cfg, tol_coeff);
      u = std::move(v);
      total += iters;
      GridFunction au(ops.grid, u.values.cwiseAbs());
      if (energy_of(au) <= energy_of(u) &&
          (au.values - u.values).norm() > 1e-14 * u.values.norm()) {
        u = std::move(au);
        continue;  // re-polish the sign-flipped iterate
      }
      break;
    }
    rep.u_star = u;
    rep.energy = energy_of(u);
    rep.gradient_norm = grad_of(u).norm() / sqrt_h;
    rep.nehari_residual = nehari_residual_frac(ops, s, p, a_field, u);
    rep.iterations = total;
    rep.converged = rep.gradient_norm <= cfg.tol;
  }
  rep.sign_pattern = classify_sign(rep.u_star.values);
  rep.norm_l2 = rep.u_star.norm_l2();
  rep.norm_hs =
      std::sqrt(std::max(0.0, rep.u_star.values.dot(A * rep.u_star.values)));
  rep.norm_linf = rep.u_star.norm_linf();
  return rep;
}

// deterministic seeded random initial iterate
inline GridFunction seeded_init(GridPtr grid, std::uint64_t seed) {
  return detail::seeded_field(std::move(grid), seed);
}

// default initial iterates: the principal eigenfunction of the governing
// form (the solvers scale it onto the Nehari manifold themselves)
inline GridFunction default_init_limit(const OperatorSet& ops) {
  return principal_eigenpair(ops.A_L, ops.M_mass, ops.grid).phi;
}
inline GridFunction default_init_frac(const OperatorSet& ops, double s) {
  return principal_eigenpair(ops.frac(s), ops.M_mass, ops.grid).phi;
}

}  // namespace loglap
