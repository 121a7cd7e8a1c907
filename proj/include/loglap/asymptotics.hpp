#pragma once

// Small-order sweeps: solve the weighted fractional problem along a
// decreasing s-schedule with p(s) = 2 + sigma s and a(s,x) = 1 + s w(x),
// solve the limiting problem once, and tabulate the convergence columns the
// asymptotic theorems predict.

#include <cmath>
#include <vector>

#include "loglap/solvers.hpp"
#include "loglap/verify.hpp"

namespace loglap {

struct SweepConfig {
  std::vector<double> s_schedule;  // strictly decreasing, inside (0, 1/4)
  double sigma = 1.0;              // p'(0)
  Vector omega;                    // a'(0, x), one entry per cell
  SolveConfig solver;
  std::uint64_t seed = 1;
};

inline void validate_schedule(const std::vector<double>& sched) {
  if (sched.size() < 2)
    throw config_error("sweep: schedule needs at least two s values");
  for (size_t i = 0; i < sched.size(); ++i) {
    if (!(sched[i] > 0.0 && sched[i] < 0.25))
      throw config_error("sweep: schedule values must lie in (0, 1/4)");
    if (i > 0 && !(sched[i] < sched[i - 1]))
      throw config_error("sweep: schedule must be strictly decreasing");
  }
}

// align the sign of v with the reference (both regimes are sign-symmetric)
inline GridFunction align_sign(const GridFunction& v,
                               const GridFunction& ref) {
  if (v.dot_l2(ref) < 0.0) return GridFunction(v.grid, -v.values);
  return v;
}

// ---- superlinear sweep ----

struct SuperSweepRow {
  double s = 0.0;
  double l2_gap = 0.0;      // ||u_s - u_0||_2 after sign alignment
  double energy_gap = 0.0;  // |E_s(u_s)/s - E(u_0)|
  double norm_gap = 0.0;    // | ||u_s||_s - ||u_0||_2 |
  double r_gap = 0.0;       // |r_{s,probe} - r_{0,probe}|
  double us_norm_s = 0.0;   // ||u_s||_s
  double m_lower = 0.0;     // Nehari floor M(s)
};

struct SuperAsymptoticsReport {
  std::vector<SuperSweepRow> rows;   // ordered by decreasing s
  double energy_limit_target = 0.0;  // E(u_0)
  double norm_target = 0.0;          // ||u_0||_2
  double limit_identity_slack = 0.0; // |E(u_0) - (sigma/4)||u_0||_2^2|
  bool tail_decreasing = false;      // all four columns on the tail
  bool m_bound_holds = false;
  SolveReport limit_report;
  bool complete = true;              // false when a sub-solve failed
};

inline bool columns_decreasing_tail(
    const std::vector<std::vector<double>>& cols, size_t tail) {
  for (const auto& c : cols) {
    if (c.size() < tail) return false;
    for (size_t i = c.size() - tail + 1; i < c.size(); ++i)
      if (!(c[i] < c[i - 1])) return false;
  }
  return true;
}

inline SuperAsymptoticsReport run_superlinear_asymptotics(
    const OperatorSet& ops, const SweepConfig& cfg) {
  validate_schedule(cfg.s_schedule);
  if (!(cfg.sigma > 0.0 && cfg.sigma < 4.0))
    throw config_error("superlinear sweep: sigma must lie in (0, 4/N)");
  if (cfg.omega.size() != ops.grid->n_cells)
    throw config_error("superlinear sweep: omega size mismatch");
  // operator sets stay immutable after assembly; the schedule must come in
  // pre-assembled
  for (double s : cfg.s_schedule)
    if (!ops.has_frac(s))
      throw config_error("superlinear sweep: no cached fractional form for "
                         "s = " + std::to_string(s));

  SuperAsymptoticsReport rep;
  auto nl = Nonlinearity::linear(cfg.omega, cfg.sigma);
  rep.limit_report =
      solve_superlinear_limit(ops, nl, default_init_limit(ops), cfg.solver);
  if (!rep.limit_report.converged) rep.complete = false;
  const GridFunction& u0 = rep.limit_report.u_star;
  rep.energy_limit_target = rep.limit_report.energy;
  rep.norm_target = rep.limit_report.norm_l2;
  rep.limit_identity_slack = std::abs(
      rep.energy_limit_target - 0.25 * cfg.sigma * u0.norm_l2_sq());

  const GridFunction probe = bump(ops.grid);
  const double r0_probe = nehari_radius_limit(ops, cfg.sigma, cfg.omega, probe);

  bool m_holds = true;
  for (double s : cfg.s_schedule) {
    SuperSweepRow row;
    row.s = s;
    const double p = 2.0 + cfg.sigma * s;
    Vector a = Vector::Ones(ops.grid->n_cells) + s * cfg.omega;
    auto rs = solve_frac(ops, s, p, a, default_init_frac(ops, s), cfg.solver);
    if (!rs.converged) rep.complete = false;
    const GridFunction us = align_sign(rs.u_star, u0);
    row.l2_gap = std::sqrt(ops.grid->h) * (us.values - u0.values).norm();
    row.energy_gap = std::abs(rs.energy / s - rep.energy_limit_target);
    row.norm_gap = std::abs(rs.norm_hs - rep.norm_target);
    row.r_gap =
        std::abs(nehari_radius_frac(ops, s, p, a, probe) - r0_probe);
    row.us_norm_s = rs.norm_hs;
    row.m_lower = rs.m_lower;
    if (!(rs.norm_hs >= rs.m_lower)) m_holds = false;
    rep.rows.push_back(row);
  }
  rep.m_bound_holds = m_holds;

  std::vector<double> c1, c2, c3, c4;
  for (const auto& r : rep.rows) {
    c1.push_back(r.l2_gap);
    c2.push_back(r.energy_gap);
    c3.push_back(r.norm_gap);
    c4.push_back(r.r_gap);
  }
  const size_t tail = std::min<size_t>(3, rep.rows.size());
  rep.tail_decreasing = columns_decreasing_tail({c1, c2, c3, c4}, tail);
  return rep;
}

// ---- sublinear sweep ----

struct SubSweepRow {
  double s = 0.0;
  double l1_gap = 0.0, l2_gap = 0.0, l4_gap = 0.0;
  double h_norm_sq = 0.0;       // E(u_s, u_s)
  double us_norm_s_sq = 0.0;    // ||u_s||_s^2
  double linf = 0.0;
  double t_s = 0.0, c_s = 0.0;
  double sandwich_lower = 0.0;  // (2p/(p-2)) E_s(t_s phi_s / 2)
  double sandwich_upper = 0.0;  // (c_3^s c_s^p)^{2/(2-p)}
};

struct SubAsymptoticsReport {
  std::vector<SubSweepRow> rows;
  double A = 0.0;            // limit of t_s^2 from lambda_{1,L}, phi_L
  double floor_value = 0.0;  // (ln 2 / 2) A
  bool tail_decreasing = false;
  bool sandwich_holds = false;
  bool floor_holds_smallest_s = false;  // with the discretization allowance
  double linf_ceiling = 0.0;  // c_3 (R^2 e^{1/2 - rho_N})^{-1/sigma}
  bool linf_below_ceiling = false;
  SolveReport limit_report;
  bool complete = true;
};

inline SubAsymptoticsReport run_sublinear_asymptotics(const OperatorSet& ops,
                                                      const SweepConfig& cfg) {
  validate_schedule(cfg.s_schedule);
  if (!(cfg.sigma < 0.0))
    throw config_error("sublinear sweep: sigma must be negative");
  if (cfg.omega.size() != ops.grid->n_cells)
    throw config_error("sublinear sweep: omega size mismatch");
  for (double s : cfg.s_schedule)
    if (!ops.has_frac(s))
      throw config_error("sublinear sweep: no cached fractional form for "
                         "s = " + std::to_string(s));

  SubAsymptoticsReport rep;
  auto nl = Nonlinearity::linear(cfg.omega, cfg.sigma);
  rep.limit_report =
      solve_sublinear_limit(ops, nl, default_init_limit(ops), cfg.solver);
  if (!rep.limit_report.converged) rep.complete = false;
  const GridFunction& u0 = rep.limit_report.u_star;

  // c_3 bounds ||a(s,.)||_inf^{1/s}; for a = 1 + s w the supremum over the
  // working range is exp(max(0, max w))
  const double c3 = std::exp(std::max(0.0, cfg.omega.maxCoeff()));
  const double R = 2.0 * ops.grid->interval.diameter();
  rep.linf_ceiling =
      c3 * std::pow(R * R * std::exp(0.5 - ops.dims.rho_N), -1.0 / cfg.sigma);

  // A from the limiting eigenpair (L2-normalized, positive phi_L)
  const auto lap = principal_eigenpair(ops.A_L, ops.M_mass, ops.grid);
  {
    double aq = 0.0;
    for (int i = 0; i < lap.phi.size(); ++i)
      aq += cfg.omega[i] * lap.phi.values[i] * lap.phi.values[i];
    aq *= ops.grid->h;
    rep.A = std::exp(1.0 + 2.0 * lap.lambda / cfg.sigma -
                     (2.0 / cfg.sigma) *
                         (aq + cfg.sigma * entropy_term(lap.phi)));
  }
  rep.floor_value = 0.5 * std::log(2.0) * rep.A;

  bool sandwich = true;
  for (double s : cfg.s_schedule) {
    SubSweepRow row;
    row.s = s;
    const double p = 2.0 + cfg.sigma * s;
    if (!(p > 1.0 && p < 2.0))
      throw config_error("sublinear sweep: p(s) leaves (1,2) on the schedule");
    Vector a = Vector::Ones(ops.grid->n_cells) + s * cfg.omega;
    auto rs = solve_frac(ops, s, p, a, default_init_frac(ops, s), cfg.solver);
    if (!rs.converged) rep.complete = false;
    const GridFunction us = align_sign(rs.u_star, u0);
    auto gap = [&](double q) {
      double acc = 0.0;
      for (int i = 0; i < us.size(); ++i)
        acc += std::pow(std::abs(us.values[i] - u0.values[i]), q);
      return std::pow(ops.grid->h * acc, 1.0 / q);
    };
    row.l1_gap = gap(1.0);
    row.l2_gap = gap(2.0);
    row.l4_gap = gap(4.0);
    row.h_norm_sq = quadratic_form(ops.E_near, rs.u_star, rs.u_star);
    row.us_norm_s_sq = rs.norm_hs * rs.norm_hs;
    row.linf = rs.norm_linf;

    // t_s / c_s sandwich from the discrete eigenpair of A_s
    const auto eps = principal_eigenpair(ops.frac(s), ops.M_mass, ops.grid);
    const double int_a_phip = weighted_power_integral(a, p, eps.phi);
    row.t_s = std::pow(
        2.0 * int_a_phip / (p * eps.lambda * eps.phi.norm_l2_sq()),
        1.0 / (2.0 - p));
    row.c_s = std::pow(eps.lambda, -0.5) *
              std::pow(ops.grid->interval.diameter(), (2.0 - p) / (2.0 * p));
    GridFunction half_ts_phi(ops.grid, 0.5 * row.t_s * eps.phi.values);
    row.sandwich_lower = (2.0 * p / (p - 2.0)) *
                         energy_frac(ops, s, p, a, half_ts_phi);
    row.sandwich_upper =
        std::pow(std::pow(c3, s) * std::pow(row.c_s, p), 2.0 / (2.0 - p));
    const double sandwich_tol = 1e-8 * (1.0 + row.us_norm_s_sq);
    if (!(row.sandwich_lower <= row.us_norm_s_sq + sandwich_tol &&
          row.us_norm_s_sq <= row.sandwich_upper + sandwich_tol))
      sandwich = false;
    rep.rows.push_back(row);
  }
  rep.sandwich_holds = sandwich;
  rep.floor_holds_smallest_s =
      rep.rows.back().us_norm_s_sq >= rep.floor_value * (1.0 - 0.15);
  rep.linf_below_ceiling = rep.rows.back().linf <= rep.linf_ceiling * 1.1;

  std::vector<double> c1, c2, c3v;
  for (const auto& r : rep.rows) {
    c1.push_back(r.l1_gap);
    c2.push_back(r.l2_gap);
    c3v.push_back(r.l4_gap);
  }
  const size_t tail = std::min<size_t>(3, rep.rows.size());
  rep.tail_decreasing = columns_decreasing_tail({c1, c2, c3v}, tail);
  return rep;
}

}  // namespace loglap
