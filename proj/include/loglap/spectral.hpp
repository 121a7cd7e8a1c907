#pragma once

// Principal Dirichlet eigenpairs of the assembled forms and the s-derivative
// study that links lambda_{1,s} to lambda_{1,L}.

#include <Eigen/Cholesky>
#include <functional>
#include <vector>

#include "loglap/assembly.hpp"

namespace loglap {

struct EigenPair {
  double lambda = 0.0;
  GridFunction phi;     // L2-normalized, sum of entries > 0
  double residual = 0.0;
  int iterations = 0;
};

// Smallest generalized eigenvalue of (A, M) with M a positive diagonal mass,
// by shifted inverse iteration on the mass-scaled standard form.  The shift
// sits below the Gershgorin lower bound, so the shifted matrix is definite
// even when A itself is indefinite (rho_N < 0 makes that possible for A_L).
inline EigenPair principal_eigenpair(const Matrix& A, const Matrix& M,
                                     GridPtr grid) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || M.rows() != n || M.cols() != n)
    throw dimension_error("principal_eigenpair: matrix sizes disagree");
  Vector d = M.diagonal();
  if ((d.array() <= 0.0).any())
    throw spectral_error("principal_eigenpair: mass diagonal not positive");

  // B = D^{-1/2} A D^{-1/2}
  Vector dinv_sqrt = d.array().rsqrt();
  Matrix B = dinv_sqrt.asDiagonal() * A * dinv_sqrt.asDiagonal();
  B = 0.5 * (B + B.transpose());

  double gersh = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    double off = B.row(i).cwiseAbs().sum() - std::abs(B(i, i));
    gersh = std::min(gersh, B(i, i) - off);
  }
  const double shift = gersh - std::max(1e-3, 1e-3 * std::abs(gersh));
  Eigen::LLT<Matrix> llt(Matrix(B - shift * Matrix::Identity(n, n)));
  if (llt.info() != Eigen::Success)
    throw spectral_error("principal_eigenpair: shifted matrix not definite");

  Vector v = Vector::Ones(n).normalized();
  double lambda = v.dot(B * v);
  int it = 0;
  const int max_iters = 10000;
  double resid = std::numeric_limits<double>::infinity();
  for (; it < max_iters; ++it) {
    v = llt.solve(v);
    v.normalize();
    const Vector Bv = B * v;
    const double lambda_new = v.dot(Bv);
    resid = (Bv - lambda_new * v).norm();
    const bool value_settled =
        std::abs(lambda_new - lambda) <= 1e-12 * std::max(1.0, std::abs(lambda_new));
    lambda = lambda_new;
    if (value_settled && resid <= 0.5e-10 * (1.0 + std::abs(lambda))) break;
  }
  if (it >= max_iters)
    throw spectral_error(
        "principal_eigenpair: no convergence after 10000 iterations "
        "(lambda = " + std::to_string(lambda) +
        ", residual = " + std::to_string(resid) + ")");

  // back to generalized coordinates, L2 normalization, positive-sum sign
  Vector phi = dinv_sqrt.asDiagonal() * v;
  const double h = grid->h;
  phi /= std::sqrt(h) * phi.norm();
  if (phi.sum() < 0.0) phi = -phi;
  EigenPair out;
  out.lambda = lambda;
  out.phi = GridFunction(std::move(grid), std::move(phi));
  out.residual = (A * out.phi.values - lambda * (M * out.phi.values)).norm();
  out.iterations = it + 1;
  return out;
}

struct DerivativeStudy {
  std::vector<double> s_values;    // decreasing schedule
  std::vector<double> lambdas;     // lambda_{1,s}
  std::vector<double> quotients;   // (lambda_{1,s} - 1)/s
  double extrapolate = 0.0;        // Richardson limit of the quotients
  bool monotone = true;            // quotient sequence monotone within 1e-6
};

// polynomial extrapolation of (s_i, q_i) to s = 0 (Neville table)
inline double extrapolate_to_zero(const std::vector<double>& s,
                                  const std::vector<double>& q) {
  std::vector<double> t = q;
  const int m = static_cast<int>(s.size());
  for (int level = 1; level < m; ++level)
    for (int i = 0; i < m - level; ++i)
      t[i] = (s[i] * t[i + 1] - s[i + level] * t[i]) / (s[i] - s[i + level]);
  return t[0];
}

// d/ds|_{s=0} lambda_{1,s} from a decreasing schedule of cached forms
inline DerivativeStudy eigen_derivative_at_zero(
    const std::function<const Matrix&(double)>& form_for_s, const Matrix& M,
    GridPtr grid, const std::vector<double>& s_schedule) {
  if (s_schedule.size() < 3)
    throw config_error("eigen_derivative_at_zero: need at least 3 points");
  for (size_t i = 0; i < s_schedule.size(); ++i) {
    if (!(s_schedule[i] > 0.0 && s_schedule[i] < 0.25))
      throw config_error("eigen_derivative_at_zero: schedule outside (0,1/4)");
    if (i > 0 && !(s_schedule[i] < s_schedule[i - 1]))
      throw config_error("eigen_derivative_at_zero: schedule must decrease");
  }
  DerivativeStudy st;
  st.s_values = s_schedule;
  for (double s : s_schedule) {
    const auto ep = principal_eigenpair(form_for_s(s), M, grid);
    st.lambdas.push_back(ep.lambda);
    st.quotients.push_back((ep.lambda - 1.0) / s);
  }
  for (size_t i = 2; i < st.quotients.size(); ++i) {
    const double d1 = st.quotients[i - 1] - st.quotients[i - 2];
    const double d2 = st.quotients[i] - st.quotients[i - 1];
    if (d1 * d2 < -1e-6 * (1.0 + std::abs(st.quotients[i]))) st.monotone = false;
  }
  st.extrapolate = extrapolate_to_zero(st.s_values, st.quotients);
  return st;
}

inline DerivativeStudy eigen_derivative_at_zero(
    const OperatorSet& ops, const std::vector<double>& s_schedule) {
  return eigen_derivative_at_zero(
      [&ops](double s) -> const Matrix& { return ops.frac(s); }, ops.M_mass,
      ops.grid, s_schedule);
}

}  // namespace loglap
