#pragma once

// Exact-integral P0 Galerkin assembly of the bilinear forms of the
// logarithmic Laplacian and the small-order fractional Laplacian on a 1-D
// interval with exterior zeros.
//
// Every kernel integral over a cell pair is a double difference of a second
// antiderivative of the (possibly truncated) kernel, so assembly carries no
// quadrature error:
//
//   near (log) kernel 1_{t<=c}/t :  F(t) = t ln t - t        (t <= c)
//                                   F(t) = t ln c - c        (t >  c)
//   far kernel        1_{t>1}/t  :  F(t) = 0                 (t <= 1)
//                                   F(t) = t ln t - t + 1    (t >  1)
//   power kernel      t^{-1-2s}  :  F(t) = -t^{1-2s} / (2s (1-2s))
//
// Matrix conventions (quadratic forms, u,v coefficient vectors):
//   u^T E_near v = (c_N/2) *  double integral over R x R, |x-y|<=1, of
//                  (u(x)-u(y))(v(x)-v(y)) / |x-y|, exterior zeros included;
//   u^T J_far  v =  double integral over Omega x Omega, |x-y|>1, of
//                  u(x) v(y) / |x-y|   (no prefactor, no 1/2);
//   A_L = E_near - c_N J_far + rho_N M_mass;
//   u^T A_s   v = (c(N,s)/2) * full-kernel analogue of E_near.

#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "loglap/constants.hpp"
#include "loglap/grid.hpp"

namespace loglap {

namespace kernel {

// second antiderivative of 1/t truncated at cutoff c (integrand 0 for t > c)
inline double F2_log(double t, double cutoff) {
  if (t <= 0.0) return 0.0;
  if (t <= cutoff) return t * std::log(t) - t;
  return t * std::log(cutoff) - cutoff;
}

// second antiderivative of the pure log kernel 1/t
inline double F2_log(double t) {
  if (t <= 0.0) return 0.0;
  return t * std::log(t) - t;
}

// second antiderivative of the far kernel 1_{t>1}/t, normalized to 0 at t=1
inline double F2_far(double t) {
  if (t <= 1.0) return 0.0;
  return t * std::log(t) - t + 1.0;
}

// second antiderivative of t^{-1-2s}, s in (0, 1/2)
inline double F2_pow(double t, double s) {
  if (t <= 0.0) return 0.0;
  return -std::pow(t, 1.0 - 2.0 * s) / (2.0 * s * (1.0 - 2.0 * s));
}

// Integral of f(|x-y|) over the rectangle a x b via the double difference of
// a second antiderivative F of f.  Requires the cells to be disjoint (their
// interiors), so that y - x has one sign on the rectangle.
template <class F2>
inline double rectangle(const Interval& a, const Interval& b, F2&& F) {
  const Interval *lo = &a, *hi = &b;
  if (b.left < a.left) std::swap(lo, hi);
  // corner separations; t11 is the smallest gap
  const double t11 = hi->left - lo->right;
  const double t12 = hi->right - lo->right;
  const double t21 = hi->left - lo->left;
  const double t22 = hi->right - lo->left;
  if (t11 < -1e-12 * (std::abs(t22) + 1.0))
    throw assembly_error("kernel integral: overlapping distinct cells");
  return F(t22) - F(t21) - F(t12) + F(std::max(t11, 0.0));
}

}  // namespace kernel

// Integral of 1/|x-y| over cell_a x cell_b, optionally restricted to
// |x-y| <= cutoff.  Identical cells contribute 0 by convention (the kernel
// only ever appears against a difference factor that vanishes there).
inline double pairwise_log_integral(const Interval& cell_a,
                                    const Interval& cell_b,
                                    std::optional<double> cutoff = {}) {
  if (cell_a.left == cell_b.left && cell_a.right == cell_b.right) return 0.0;
  if (cutoff) {
    const double c = *cutoff;
    if (!(c > 0.0)) throw assembly_error("pairwise_log_integral: cutoff <= 0");
    return kernel::rectangle(cell_a, cell_b,
                             [c](double t) { return kernel::F2_log(t, c); });
  }
  return kernel::rectangle(cell_a, cell_b,
                           [](double t) { return kernel::F2_log(t); });
}

// Integral of |x-y|^{-1-2s} over cell_a x cell_b; identical cells -> 0.
inline double pairwise_pow_integral(const Interval& cell_a,
                                    const Interval& cell_b, double s) {
  if (cell_a.left == cell_b.left && cell_a.right == cell_b.right) return 0.0;
  return kernel::rectangle(cell_a, cell_b,
                           [s](double t) { return kernel::F2_pow(t, s); });
}

// Integral of 1_{|x-y|>1}/|x-y| over cell_a x cell_b (far coupling); the
// diagonal case integrates the symmetric kernel over the square.
inline double pairwise_far_integral(const Interval& cell_a,
                                    const Interval& cell_b) {
  if (cell_a.left == cell_b.left && cell_a.right == cell_b.right)
    return 2.0 * kernel::F2_far(cell_a.diameter());
  return kernel::rectangle(cell_a, cell_b,
                           [](double t) { return kernel::F2_far(t); });
}

namespace detail {

// integral over the cell of the one-sided exterior log potential
//   int_cell -ln(x - L) 1_{x-L<=1} dx  with alpha = a-L, beta = b-L,
// via the antiderivative of -ln t, i.e. t - t ln t.
inline double exterior_log_piece(double alpha, double beta) {
  if (alpha >= 1.0) return 0.0;
  const double b = std::min(beta, 1.0);
  auto anti = [](double t) { return t <= 0.0 ? 0.0 : t - t * std::log(t); };
  return anti(b) - anti(alpha);
}

// int_cell (x-L)^{-2s} / (2s) dx over alpha..beta (full half-line exterior)
inline double exterior_pow_piece(double alpha, double beta, double s) {
  auto anti = [s](double t) {
    return t <= 0.0 ? 0.0 : std::pow(t, 1.0 - 2.0 * s);
  };
  return (anti(beta) - anti(alpha)) / (2.0 * s * (1.0 - 2.0 * s));
}

}  // namespace detail

// Interaction of cell i with the exterior R \ Omega through the near (log)
// kernel with unit-ball cutoff:  B_i = int_{C_i x (R\Omega), |x-y|<=1} 1/|x-y|.
inline double exterior_log_interaction(const Grid& g, int i) {
  const double L = g.interval.left, R = g.interval.right;
  const double a = g.cell_left(i), b = g.cell_right(i);
  return detail::exterior_log_piece(a - L, b - L) +
         detail::exterior_log_piece(R - b, R - a);
}

// Same for the power kernel |x-y|^{-1-2s}, no cutoff (integrable at infinity).
inline double exterior_pow_interaction(const Grid& g, int i, double s) {
  const double L = g.interval.left, R = g.interval.right;
  const double a = g.cell_left(i), b = g.cell_right(i);
  return detail::exterior_pow_piece(a - L, b - L, s) +
         detail::exterior_pow_piece(R - b, R - a, s);
}

// Geometry potential h_Omega(x): near-ball exterior mass minus far-field
// interior mass.  For an interval both split integrals collapse to
// -c_N [ln(x-L) + ln(R-x)] regardless of where the cutoff falls.
inline double h_omega_at(const Grid& g, int N, double x) {
  const auto dims = constants_for(N);
  const double L = g.interval.left, R = g.interval.right;
  const double dl = x - L, dr = R - x;
  if (!(dl > 0.0 && dr > 0.0))
    throw domain_error("h_omega_at: point not interior to Omega");
  double near_exterior = 0.0, far_interior = 0.0;
  if (dl <= 1.0)
    near_exterior -= std::log(dl);
  else
    far_interior += std::log(dl);
  if (dr <= 1.0)
    near_exterior -= std::log(dr);
  else
    far_interior += std::log(dr);
  return dims.c_N * (near_exterior - far_interior);
}

// exact cell integral of h_Omega + rho_N (used by the potential-form A_L)
inline double potential_cell_integral(const Grid& g,
                                      const DimensionalConstants& dims,
                                      int i) {
  const double L = g.interval.left, R = g.interval.right;
  const double a = g.cell_left(i), b = g.cell_right(i);
  auto G = [](double t) { return t <= 0.0 ? 0.0 : t * std::log(t) - t; };
  const double int_h = -dims.c_N *
      (G(b - L) - G(a - L) + G(R - a) - G(R - b));
  return int_h + dims.rho_N * g.h;
}

struct OperatorSet {
  GridPtr grid;
  DimensionalConstants dims;
  Matrix E_near;   // near form with exterior interaction, c_N/2 convention
  Matrix J_far;    // far coupling over Omega x Omega
  Matrix M_mass;   // h * I
  Matrix A_L;      // E_near - c_N J_far + rho_N M_mass
  Vector h_omega;  // h_Omega sampled at cell centers
  std::map<long long, Matrix> frac_cache;  // s (rounded to 12 decimals) -> A_s

  static long long frac_key(double s) {
    return static_cast<long long>(std::llround(s * 1e12));
  }
  bool has_frac(double s) const { return frac_cache.count(frac_key(s)) > 0; }
  const Matrix& frac(double s) const {
    auto it = frac_cache.find(frac_key(s));
    if (it == frac_cache.end())
      throw config_error("OperatorSet: no cached fractional form for s = " +
                         std::to_string(s));
    return it->second;
  }
  std::vector<double> cached_s() const {
    std::vector<double> out;
    for (const auto& [k, m] : frac_cache) out.push_back(k * 1e-12);
    return out;
  }
};

// Assemble the fractional form A_s alone (used by the assembly driver and by
// sweeps that extend the cache).
inline Matrix assemble_frac_form(const Grid& g, int N, double s) {
  if (!(s > 0.0 && s < 0.25))
    throw config_error(
        "assemble_frac_form: s must lie in (0, 1/4) for P0 conformity");
  const int n = g.n_cells;
  const double cs = frac_normalization(N, s);
  Matrix A = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double k = pairwise_pow_integral(g.cell(i), g.cell(j), s);
      A(i, j) = A(j, i) = -cs * k;
    }
  for (int i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) row_sum -= A(i, j);
    A(i, i) = row_sum + cs * exterior_pow_interaction(g, i, s);
  }
  return A;
}

inline OperatorSet assemble_operator_set(const GridPtr& grid, int N,
                                         const std::vector<double>& s_list) {
  if (N != 1)
    throw config_error("assemble_operator_set: discretization supports N = 1");
  const Grid& g = *grid;
  const int n = g.n_cells;
  OperatorSet ops;
  ops.grid = grid;
  ops.dims = constants_for(N);
  const double cN = ops.dims.c_N;

  ops.E_near = Matrix::Zero(n, n);
  ops.J_far = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      if (j > i) {
        const double k = pairwise_log_integral(g.cell(i), g.cell(j), 1.0);
        ops.E_near(i, j) = ops.E_near(j, i) = -cN * k;
      }
      const double jf = pairwise_far_integral(g.cell(i), g.cell(j));
      ops.J_far(i, j) = ops.J_far(j, i) = jf;
    }
  for (int i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) row_sum -= ops.E_near(i, j);
    ops.E_near(i, i) = row_sum + cN * exterior_log_interaction(g, i);
  }
  ops.M_mass = g.h * Matrix::Identity(n, n);
  ops.A_L = ops.E_near - cN * ops.J_far + ops.dims.rho_N * ops.M_mass;

  ops.h_omega.resize(n);
  for (int i = 0; i < n; ++i) ops.h_omega[i] = h_omega_at(g, N, g.centers[i]);

  for (double s : s_list)
    ops.frac_cache[OperatorSet::frac_key(s)] = assemble_frac_form(g, N, s);
  return ops;
}

// A_L through the equivalent representation: Omega x Omega log form without
// cutoff plus the exact cell integrals of h_Omega + rho_N.
inline Matrix assemble_A_L_potential_form(const GridPtr& grid, int N) {
  const Grid& g = *grid;
  const auto dims = constants_for(N);
  const int n = g.n_cells;
  Matrix A = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double k = pairwise_log_integral(g.cell(i), g.cell(j));
      A(i, j) = A(j, i) = -dims.c_N * k;
    }
  for (int i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) row_sum -= A(i, j);
    A(i, i) = row_sum + potential_cell_integral(g, dims, i);
  }
  return A;
}

inline double quadratic_form(const Matrix& m, const GridFunction& u,
                             const GridFunction& v) {
  if (u.grid != v.grid)
    throw dimension_error("quadratic_form: operands on different grids");
  if (m.rows() != u.size() || m.cols() != v.size())
    throw dimension_error("quadratic_form: matrix size does not match grid");
  return u.values.dot(m * v.values);
}

// plain-text triples `i j value` (1-based, upper triangle), 17 significant
// digits; `% rows cols` header
inline std::string dump_matrix(const Matrix& m) {
  std::ostringstream os;
  os.precision(17);
  os << "% " << m.rows() << " " << m.cols() << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i; j < m.cols(); ++j)
      os << (i + 1) << " " << (j + 1) << " " << m(i, j) << "\n";
  return os.str();
}

}  // namespace loglap
