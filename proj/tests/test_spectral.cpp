#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "loglap/spectral.hpp"
#include "oracles.hpp"

using namespace loglap;

namespace {

GridFunction random_field(GridPtr g, std::uint64_t seed) {
  oracle::Rng rng(seed);
  Vector v(g->n_cells);
  for (int i = 0; i < g->n_cells; ++i) v[i] = rng.uniform(-1.0, 1.0);
  return GridFunction(g, v);
}

}  // namespace

TEST_CASE("identity form has eigenvalue one and constant eigenfunction") {
  auto g = build_grid({-0.5, 0.5}, 32);
  const Matrix M = g->h * Matrix::Identity(32, 32);
  const auto ep = principal_eigenpair(M, M, g);
  CHECK(ep.lambda == Catch::Approx(1.0).epsilon(1e-12));
  // |Omega| = 1, so the L2-normalized constant is 1
  for (int i = 0; i < 32; ++i)
    CHECK(ep.phi.values[i] == Catch::Approx(1.0).epsilon(1e-10));
  CHECK(ep.residual <= 1e-10 * (1.0 + std::abs(ep.lambda)));
}

TEST_CASE("principal eigenvalue of A_s matches the dense oracle") {
  auto g = build_grid({-0.5, 0.5}, 512);
  auto ops = assemble_operator_set(g, 1, {0.1});
  const auto ep = principal_eigenpair(ops.frac(0.1), ops.M_mass, g);
  const auto spectrum = oracle::dense_spectrum(ops.frac(0.1), ops.M_mass);
  CHECK(ep.lambda == Catch::Approx(spectrum(0)).epsilon(1e-9));
  CHECK(ep.residual <= 1e-10 * (1.0 + std::abs(ep.lambda)));
  CHECK(ep.phi.norm_l2() == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(ep.phi.values.sum() > 0.0);
}

TEST_CASE("A_L eigenpair and the log bound against cached fractional forms") {
  auto g = build_grid({-0.5, 0.5}, 256);
  auto ops = assemble_operator_set(g, 1, {0.05, 0.1, 0.2});
  const auto lap = principal_eigenpair(ops.A_L, ops.M_mass, g);
  const auto oracle_l = oracle::dense_spectrum(ops.A_L, ops.M_mass);
  CHECK(lap.lambda == Catch::Approx(oracle_l(0)).epsilon(1e-9));

  // lambda_{1,L} <= ln(lambda_{1,s}) / s for every cached s
  for (double s : ops.cached_s()) {
    const auto eps = principal_eigenpair(ops.frac(s), ops.M_mass, g);
    CHECK(lap.lambda <= std::log(eps.lambda) / s + 1e-10);
  }
}

TEST_CASE("Rayleigh minimality over random fields") {
  auto g = build_grid({-0.5, 0.5}, 64);
  auto ops = assemble_operator_set(g, 1, {0.1});
  const auto lap = principal_eigenpair(ops.A_L, ops.M_mass, g);
  const auto fs = principal_eigenpair(ops.frac(0.1), ops.M_mass, g);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto v = random_field(g, seed);
    const double l2 = v.norm_l2_sq();
    CHECK(lap.lambda <= quadratic_form(ops.A_L, v, v) / l2 + 1e-12);
    CHECK(fs.lambda <= quadratic_form(ops.frac(0.1), v, v) / l2 + 1e-12);
  }
}

TEST_CASE("principal eigenfunctions are positive after sign normalization") {
  auto g = build_grid({-0.5, 0.5}, 128);
  auto ops = assemble_operator_set(g, 1, {0.1});
  const auto fs = principal_eigenpair(ops.frac(0.1), ops.M_mass, g);
  CHECK(fs.phi.values.minCoeff() > 0.0);
  const auto lap = principal_eigenpair(ops.A_L, ops.M_mass, g);
  // positivity for A_L is checked and reported rather than guaranteed
  INFO("min entry of phi_L = " << lap.phi.values.minCoeff());
  CHECK(lap.phi.values.minCoeff() > 0.0);
}

TEST_CASE("eigenfunction convergence phi_s -> phi_L") {
  auto g = build_grid({-0.5, 0.5}, 128);
  const std::vector<double> schedule{0.08, 0.04, 0.02, 0.01};
  auto ops = assemble_operator_set(g, 1, schedule);
  const auto lap = principal_eigenpair(ops.A_L, ops.M_mass, g);
  double prev = std::numeric_limits<double>::infinity();
  for (double s : schedule) {
    const auto fs = principal_eigenpair(ops.frac(s), ops.M_mass, g);
    Vector diff = fs.phi.values - lap.phi.values;
    const double gap = std::sqrt(g->h) * diff.norm();
    CHECK(gap < prev);
    prev = gap;
  }
}

TEST_CASE("eigen-derivative study approaches lambda_{1,L}") {
  auto g = build_grid({-0.5, 0.5}, 256);
  const std::vector<double> schedule{0.02, 0.01, 0.005};
  auto ops = assemble_operator_set(g, 1, schedule);
  const auto study = eigen_derivative_at_zero(ops, schedule);
  const auto lap = principal_eigenpair(ops.A_L, ops.M_mass, g);
  CHECK(std::abs(study.extrapolate - lap.lambda) <=
        0.01 * std::abs(lap.lambda));
  CHECK(study.quotients.size() == 3);
}

TEST_CASE("derivative study with the mass matrix substituted is zero") {
  auto g = build_grid({-0.5, 0.5}, 32);
  const Matrix M = g->h * Matrix::Identity(32, 32);
  const auto study = eigen_derivative_at_zero(
      [&M](double) -> const Matrix& { return M; }, M, g,
      {0.02, 0.01, 0.005});
  for (double q : study.quotients) CHECK(q == Catch::Approx(0.0).margin(1e-9));
  CHECK(study.extrapolate == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("derivative study preconditions") {
  auto g = build_grid({-0.5, 0.5}, 32);
  auto ops = assemble_operator_set(g, 1, {0.02});
  CHECK_THROWS_AS(eigen_derivative_at_zero(ops, {0.02}), config_error);
  CHECK_THROWS_AS(eigen_derivative_at_zero(ops, {0.02, 0.01, 0.012}),
                  config_error);
  CHECK_THROWS_AS(eigen_derivative_at_zero(ops, {0.3, 0.2, 0.1}),
                  config_error);
}

TEST_CASE("spectral consistency of the quadratic form") {
  auto g = build_grid({-0.5, 0.5}, 64);
  auto ops = assemble_operator_set(g, 1, {});
  const auto lap = principal_eigenpair(ops.A_L, ops.M_mass, g);
  // E_L(phi, phi) = lambda ||phi||_L2^2 at the eigenpair
  CHECK(quadratic_form(ops.A_L, lap.phi, lap.phi) ==
        Catch::Approx(lap.lambda).epsilon(1e-10));
}
