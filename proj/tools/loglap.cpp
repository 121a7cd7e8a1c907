// loglap: assembly, spectra, least-energy solves, small-order sweeps and
// inequality verification for the logarithmic Laplacian on 1-D intervals.
//
// Exit codes: 0 success and all verdicts hold; 1 a verification verdict
// failed; 2 configuration / precondition error; 3 numerical failure.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "loglap/report.hpp"

namespace {

using namespace loglap;

constexpr int exit_ok = 0;
constexpr int exit_verdict = 1;
constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw config_error("cannot read config file " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

GridPtr grid_of(const RunConfig& cfg) {
  return build_grid({cfg.left, cfg.right}, cfg.n_cells);
}

Nonlinearity nonlinearity_of(const RunConfig& cfg, const Grid& g) {
  Vector w = weight_profile(g, cfg.omega);
  if (cfg.family == "linear_weight")
    return Nonlinearity::linear(std::move(w), cfg.sigma);
  if (cfg.family == "log_power")
    return Nonlinearity::log_power(std::move(w), cfg.theta, cfg.sigma);
  return Nonlinearity::log_log(std::move(w), cfg.mu, cfg.sigma);
}

SolveConfig solver_of(const RunConfig& cfg) {
  SolveConfig sc;
  sc.tol = cfg.tol;
  sc.max_iters = cfg.max_iters;
  sc.seed = cfg.seed;
  return sc;
}

// seed = 0 selects the principal-eigenfunction default
GridFunction init_of(const OperatorSet& ops, const RunConfig& cfg, bool frac,
                     double s) {
  if (cfg.seed == 0)
    return frac ? default_init_frac(ops, s) : default_init_limit(ops);
  return seeded_init(ops.grid, cfg.seed);
}

void emit_solution(const std::filesystem::path& dir, const RunConfig& cfg,
                   const SolveReport& rep) {
  write_text_atomic(dir / "report.json", to_json(rep).dump(2) + "\n");
  write_text_atomic(dir / "u_star.csv", to_csv(rep.u_star));
  if (cfg.emit_svg) {
    PlotSeries ps;
    ps.label = "u(x)";
    for (int i = 0; i < rep.u_star.size(); ++i) {
      ps.x.push_back(rep.u_star.grid->centers[i]);
      ps.y.push_back(rep.u_star.values[i]);
    }
    write_text_atomic(dir / "profile.svg",
                      svg_line_plot("solution profile", {ps}));
  }
}

// ---- subcommand pipelines ----

int cmd_assemble(const RunConfig& cfg, bool dump) {
  auto dir = make_run_dir(cfg, "assemble");
  RunManifest manifest(cfg);
  try {
    auto g = grid_of(cfg);
    auto ops = assemble_operator_set(g, cfg.dimension, cfg.s_list);
    manifest.stage_done("assemble");

    json inv;
    inv["symmetry_rel_error"] = {
        {"E_near", (ops.E_near - ops.E_near.transpose()).norm() /
                       std::max(1.0, ops.E_near.norm())},
        {"A_L", (ops.A_L - ops.A_L.transpose()).norm() /
                    std::max(1.0, ops.A_L.norm())}};
    const Matrix rebuilt =
        ops.E_near - ops.dims.c_N * ops.J_far + ops.dims.rho_N * ops.M_mass;
    inv["aL_identity_error"] = (ops.A_L - rebuilt).norm();
    const Matrix alt = assemble_A_L_potential_form(g, cfg.dimension);
    inv["representation_frobenius_rel"] =
        (ops.A_L - alt).norm() / std::max(1.0, ops.A_L.norm());
    inv["min_eig_E_near"] =
        principal_eigenpair(ops.E_near, ops.M_mass, g).lambda;
    json frac_eigs = json::object();
    for (double s : ops.cached_s())
      frac_eigs[format_s(s)] =
          principal_eigenpair(ops.frac(s), ops.M_mass, g).lambda;
    inv["min_eig_A_s"] = frac_eigs;
    inv["h_omega_min_plus_rho"] = ops.h_omega.minCoeff() + ops.dims.rho_N;
    write_text_atomic(dir / "invariants.json", inv.dump(2) + "\n");
    manifest.stage_done("invariants");

    if (dump) {
      write_text_atomic(dir / "E_near.txt", dump_matrix(ops.E_near));
      write_text_atomic(dir / "J_far.txt", dump_matrix(ops.J_far));
      write_text_atomic(dir / "A_L.txt", dump_matrix(ops.A_L));
      for (double s : ops.cached_s())
        write_text_atomic(dir / ("A_s_" + format_s(s) + ".txt"),
                          dump_matrix(ops.frac(s)));
      manifest.stage_done("dump");
    }
    manifest.succeed();
    manifest.write(dir);
    std::cout << "assemble: wrote " << dir.string() << "\n";
    return exit_ok;
  } catch (const std::exception& e) {
    manifest.fail("assemble", e.what());
    manifest.write(dir);
    throw;
  }
}

int cmd_eig(const RunConfig& cfg) {
  auto dir = make_run_dir(cfg, "eig");
  RunManifest manifest(cfg);
  try {
    auto schedule = cfg.s_list;
    std::sort(schedule.begin(), schedule.end(), std::greater<>());
    if (schedule.size() < 3)
      throw config_error(
          "eig: operator.s_list needs at least 3 values for the derivative "
          "study");
    auto g = grid_of(cfg);
    auto ops = assemble_operator_set(g, cfg.dimension, schedule);
    manifest.stage_done("assemble");

    const auto lap = principal_eigenpair(ops.A_L, ops.M_mass, g);
    const auto study = eigen_derivative_at_zero(ops, schedule);
    manifest.stage_done("eigensolve");

    write_text_atomic(dir / "eig_derivative.csv", derivative_study_csv(study));
    write_csv(lap.phi, (dir / "phi_L.csv").string());
    for (double s : schedule) {
      const auto fs = principal_eigenpair(ops.frac(s), ops.M_mass, g);
      write_csv(fs.phi, (dir / ("phi_s_" + format_s(s) + ".csv")).string());
    }
    const auto bound = verify_eigen_log_bound(ops);
    json summary{{"lambda_1L", lap.lambda},
                 {"extrapolate", study.extrapolate},
                 {"rel_gap",
                  std::abs(study.extrapolate - lap.lambda) /
                      std::max(1e-300, std::abs(lap.lambda))},
                 {"quotients_monotone", study.monotone},
                 {"phi_L_positive", lap.phi.values.minCoeff() > 0.0},
                 {"eigen_log_bound", to_json(bound)}};
    write_text_atomic(dir / "summary.json", summary.dump(2) + "\n");
    manifest.set_verdict_summary(json{{"eigen_log_bound", bound.holds}});
    manifest.succeed();
    manifest.write(dir);
    std::cout << "eig: lambda_1L = " << lap.lambda
              << ", derivative extrapolate = " << study.extrapolate << "\n";
    return bound.holds ? exit_ok : exit_verdict;
  } catch (const std::exception& e) {
    manifest.fail("eig", e.what());
    manifest.write(dir);
    throw;
  }
}

int cmd_solve_limit(const RunConfig& cfg) {
  auto dir = make_run_dir(cfg, "solve-limit");
  RunManifest manifest(cfg);
  try {
    if (cfg.sigma == 0.0 || cfg.sigma >= 4.0 / cfg.dimension)
      throw config_error(
          "solve-limit: sigma must lie in (0, 4/N) for the superlinear "
          "regime or be negative for the sublinear regime (got sigma = " +
          std::to_string(cfg.sigma) + ")");
    auto g = grid_of(cfg);
    auto ops = assemble_operator_set(g, cfg.dimension, {});
    manifest.stage_done("assemble");
    auto nl = nonlinearity_of(cfg, *g);
    auto init = init_of(ops, cfg, false, 0.0);
    SolveReport rep =
        cfg.sigma > 0.0
            ? solve_superlinear_limit(ops, nl, init, solver_of(cfg))
            : solve_sublinear_limit(ops, nl, init, solver_of(cfg));
    manifest.stage_done("solve");
    emit_solution(dir, cfg, rep);
    manifest.set_verdict_summary(json{{"converged", rep.converged}});
    manifest.succeed();
    manifest.write(dir);
    std::cout << "solve-limit: E = " << rep.energy
              << ", grad = " << rep.gradient_norm << ", sign "
              << to_string(rep.sign_pattern) << "\n";
    return rep.converged ? exit_ok : exit_numerical;
  } catch (const std::exception& e) {
    manifest.fail("solve-limit", e.what());
    manifest.write(dir);
    throw;
  }
}

int cmd_solve_frac(const RunConfig& cfg) {
  auto dir = make_run_dir(cfg, "solve-frac");
  RunManifest manifest(cfg);
  try {
    if (cfg.s_list.empty())
      throw config_error("solve-frac: operator.s_list must provide s");
    const double s = cfg.s_list.front();
    const double p = 2.0 + cfg.sweep_sigma * s;
    auto g = grid_of(cfg);
    auto ops = assemble_operator_set(g, cfg.dimension, {s});
    manifest.stage_done("assemble");
    Vector a =
        Vector::Ones(g->n_cells) + s * weight_profile(*g, cfg.omega_profile);
    auto rep = solve_frac(ops, s, p, a, init_of(ops, cfg, true, s),
                          solver_of(cfg));
    manifest.stage_done("solve");
    emit_solution(dir, cfg, rep);
    manifest.set_verdict_summary(json{{"converged", rep.converged}});
    manifest.succeed();
    manifest.write(dir);
    std::cout << "solve-frac: s = " << s << ", p = " << p
              << ", E = " << rep.energy << ", grad = " << rep.gradient_norm
              << "\n";
    return rep.converged ? exit_ok : exit_numerical;
  } catch (const std::exception& e) {
    manifest.fail("solve-frac", e.what());
    manifest.write(dir);
    throw;
  }
}

SweepConfig sweep_of(const RunConfig& cfg, const Grid& g) {
  SweepConfig sw;
  sw.s_schedule = cfg.s_schedule;
  sw.sigma = cfg.sweep_sigma;
  sw.omega = weight_profile(g, cfg.omega_profile);
  sw.solver = solver_of(cfg);
  sw.seed = cfg.seed;
  return sw;
}

int cmd_sweep_super(const RunConfig& cfg) {
  auto dir = make_run_dir(cfg, "sweep-super");
  RunManifest manifest(cfg);
  try {
    auto g = grid_of(cfg);
    auto ops = assemble_operator_set(g, cfg.dimension, cfg.s_schedule);
    manifest.stage_done("assemble");
    auto rep = run_superlinear_asymptotics(ops, sweep_of(cfg, *g));
    manifest.stage_done("sweep");
    write_text_atomic(dir / "sweep.csv", super_sweep_csv(rep));
    json summary{{"energy_limit_target", rep.energy_limit_target},
                 {"norm_target", rep.norm_target},
                 {"limit_identity_slack", rep.limit_identity_slack},
                 {"tail_decreasing", rep.tail_decreasing},
                 {"m_bound_holds", rep.m_bound_holds},
                 {"complete", rep.complete},
                 {"limit_report", to_json(rep.limit_report)}};
    write_text_atomic(dir / "summary.json", summary.dump(2) + "\n");
    if (cfg.emit_svg) {
      std::vector<PlotSeries> series(4);
      series[0].label = "l2_gap";
      series[1].label = "energy_gap";
      series[2].label = "norm_gap";
      series[3].label = "r_gap";
      for (const auto& r : rep.rows) {
        series[0].x.push_back(r.s); series[0].y.push_back(r.l2_gap);
        series[1].x.push_back(r.s); series[1].y.push_back(r.energy_gap);
        series[2].x.push_back(r.s); series[2].y.push_back(r.norm_gap);
        series[3].x.push_back(r.s); series[3].y.push_back(r.r_gap);
      }
      write_text_atomic(dir / "errors.svg",
                        svg_line_plot("superlinear sweep errors vs s",
                                      series, true, true));
    }
    manifest.set_verdict_summary(json{{"tail_decreasing", rep.tail_decreasing},
                                      {"m_bound_holds", rep.m_bound_holds},
                                      {"complete", rep.complete}});
    manifest.succeed();
    manifest.write(dir);
    std::cout << "sweep-super: " << rep.rows.size() << " rows, tail "
              << (rep.tail_decreasing ? "decreasing" : "NOT decreasing")
              << "\n";
    if (!rep.complete) return exit_numerical;
    return (rep.tail_decreasing && rep.m_bound_holds) ? exit_ok
                                                      : exit_verdict;
  } catch (const std::exception& e) {
    manifest.fail("sweep-super", e.what());
    manifest.write(dir);
    throw;
  }
}

int cmd_sweep_sub(const RunConfig& cfg) {
  auto dir = make_run_dir(cfg, "sweep-sub");
  RunManifest manifest(cfg);
  try {
    auto g = grid_of(cfg);
    auto ops = assemble_operator_set(g, cfg.dimension, cfg.s_schedule);
    manifest.stage_done("assemble");
    auto rep = run_sublinear_asymptotics(ops, sweep_of(cfg, *g));
    manifest.stage_done("sweep");
    write_text_atomic(dir / "sweep.csv", sub_sweep_csv(rep));
    json summary{{"A", rep.A},
                 {"floor_value", rep.floor_value},
                 {"tail_decreasing", rep.tail_decreasing},
                 {"sandwich_holds", rep.sandwich_holds},
                 {"floor_holds_smallest_s", rep.floor_holds_smallest_s},
                 {"linf_ceiling", rep.linf_ceiling},
                 {"linf_below_ceiling", rep.linf_below_ceiling},
                 {"complete", rep.complete},
                 {"limit_report", to_json(rep.limit_report)}};
    write_text_atomic(dir / "summary.json", summary.dump(2) + "\n");
    if (cfg.emit_svg) {
      std::vector<PlotSeries> series(3);
      series[0].label = "l1_gap";
      series[1].label = "l2_gap";
      series[2].label = "l4_gap";
      for (const auto& r : rep.rows) {
        series[0].x.push_back(r.s); series[0].y.push_back(r.l1_gap);
        series[1].x.push_back(r.s); series[1].y.push_back(r.l2_gap);
        series[2].x.push_back(r.s); series[2].y.push_back(r.l4_gap);
      }
      write_text_atomic(dir / "errors.svg",
                        svg_line_plot("sublinear sweep errors vs s", series,
                                      true, true));
    }
    manifest.set_verdict_summary(
        json{{"tail_decreasing", rep.tail_decreasing},
             {"sandwich_holds", rep.sandwich_holds},
             {"floor_holds_smallest_s", rep.floor_holds_smallest_s},
             {"linf_below_ceiling", rep.linf_below_ceiling},
             {"complete", rep.complete}});
    manifest.succeed();
    manifest.write(dir);
    std::cout << "sweep-sub: " << rep.rows.size() << " rows, sandwich "
              << (rep.sandwich_holds ? "holds" : "FAILS") << "\n";
    if (!rep.complete) return exit_numerical;
    return (rep.tail_decreasing && rep.sandwich_holds &&
            rep.floor_holds_smallest_s && rep.linf_below_ceiling)
               ? exit_ok
               : exit_verdict;
  } catch (const std::exception& e) {
    manifest.fail("sweep-sub", e.what());
    manifest.write(dir);
    throw;
  }
}

int cmd_verify(const RunConfig& cfg) {
  auto dir = make_run_dir(cfg, "verify");
  RunManifest manifest(cfg);
  try {
    auto g = grid_of(cfg);
    auto ops = assemble_operator_set(g, cfg.dimension, cfg.s_list);
    manifest.stage_done("assemble");
    const auto ledger = verify_suite(ops, cfg.seed);
    manifest.stage_done("verify");
    json arr = json::array();
    bool all_hold = true;
    json summary = json::object();
    for (const auto& v : ledger) {
      arr.push_back(to_json(v));
      summary[v.name] = v.holds;
      all_hold = all_hold && v.holds;
    }
    write_text_atomic(dir / "ledger.json", arr.dump(2) + "\n");
    manifest.set_verdict_summary(summary);
    manifest.succeed();
    manifest.write(dir);
    for (const auto& v : ledger)
      std::cout << (v.holds ? "  ok   " : "  FAIL ") << v.name
                << "  worst_slack=" << v.worst_slack << "\n";
    return all_hold ? exit_ok : exit_verdict;
  } catch (const std::exception& e) {
    manifest.fail("verify", e.what());
    manifest.write(dir);
    throw;
  }
}

int cmd_embed_demo(const RunConfig& cfg) {
  auto dir = make_run_dir(cfg, "embed-demo");
  RunManifest manifest(cfg);
  try {
    auto g = grid_of(cfg);
    auto u = normalize_modular(PhiFunction::critical(), bump(g));
    manifest.stage_done("probe");
    // doubling k while the refined grid stays within the dense budget
    std::vector<int> ks;
    for (int k = 2; k <= 64 && k * cfg.n_cells <= 4096; k *= 2)
      ks.push_back(k);
    if (ks.size() < 3)
      throw config_error(
          "embed-demo: lower domain.n_cells (n_cells * k <= 4096 caps the "
          "scaling sequence; n_cells <= 64 reaches k = 64)");
    auto rep = verify_noncompactness(u, ks, PhiFunction::supercritical(0.5));
    manifest.stage_done("scaling-sequence");
    write_text_atomic(dir / "noncompact.csv", noncompact_csv(rep));
    json summary{{"claim1_bounded", to_json(rep.bounded)},
                 {"claim2_modular_floor", to_json(rep.modular_floor)},
                 {"gamma_ratio_increasing_tail", rep.gamma_increasing_tail},
                 {"beta", rep.beta},
                 {"floor_value", rep.floor_value},
                 {"k0", rep.k0}};
    write_text_atomic(dir / "summary.json", summary.dump(2) + "\n");
    manifest.set_verdict_summary(
        json{{"claim1", rep.bounded.holds},
             {"claim2", rep.modular_floor.holds},
             {"gamma_tail", rep.gamma_increasing_tail}});
    manifest.succeed();
    manifest.write(dir);
    std::cout << "embed-demo: claim1 "
              << (rep.bounded.holds ? "holds" : "FAILS") << ", floor "
              << (rep.modular_floor.holds ? "holds" : "FAILS") << "\n";
    return (rep.bounded.holds && rep.modular_floor.holds &&
            rep.gamma_increasing_tail)
               ? exit_ok
               : exit_verdict;
  } catch (const std::exception& e) {
    manifest.fail("embed-demo", e.what());
    manifest.write(dir);
    throw;
  }
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  // pass 1: a config file provides the defaults, flags then override
  try {
    for (int i = 1; i + 1 < argc; ++i)
      if (std::string(argv[i]) == "--config")
        cfg = parse_config(read_file(argv[i + 1]));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_config;
  }

  CLI::App app{"logarithmic Laplacian toolbox (1-D)"};
  std::string config_path;
  app.add_option("--config", config_path, "configuration file");
  app.add_option("--domain.left", cfg.left);
  app.add_option("--domain.right", cfg.right);
  app.add_option("--domain.n_cells", cfg.n_cells);
  app.add_option("--dimension", cfg.dimension);
  app.add_option("--operator.s_list", cfg.s_list);
  app.add_option("--nonlinearity.family", cfg.family);
  app.add_option("--nonlinearity.theta", cfg.theta);
  app.add_option("--nonlinearity.mu", cfg.mu);
  app.add_option("--nonlinearity.sigma", cfg.sigma);
  app.add_option("--nonlinearity.omega", cfg.omega);
  app.add_option("--solver.tol", cfg.tol);
  app.add_option("--solver.max_iters", cfg.max_iters);
  app.add_option("--solver.seed", cfg.seed);
  app.add_option("--sweep.s_schedule", cfg.s_schedule);
  app.add_option("--sweep.sigma", cfg.sweep_sigma);
  app.add_option("--sweep.omega_profile", cfg.omega_profile);
  app.add_option("--output.dir", cfg.dir);
  app.add_option("--output.emit_svg", cfg.emit_svg);

  bool dump = false;
  auto* sc_assemble =
      app.add_subcommand("assemble", "assemble the operator set");
  sc_assemble->add_flag("--dump", dump, "dump matrices as text triples");
  auto* sc_eig =
      app.add_subcommand("eig", "principal eigenpairs and the s-derivative");
  auto* sc_solve_limit =
      app.add_subcommand("solve-limit", "least-energy limiting solve");
  auto* sc_solve_frac =
      app.add_subcommand("solve-frac", "least-energy fractional solve");
  auto* sc_sweep_super =
      app.add_subcommand("sweep-super", "superlinear small-order sweep");
  auto* sc_sweep_sub =
      app.add_subcommand("sweep-sub", "sublinear small-order sweep");
  auto* sc_verify =
      app.add_subcommand("verify", "run the inequality ledger");
  auto* sc_embed =
      app.add_subcommand("embed-demo", "non-compactness demonstration");
  app.require_subcommand(0, 1);
  // global --section.key flags may follow the subcommand
  for (auto* sc : {sc_assemble, sc_eig, sc_solve_limit, sc_solve_frac,
                   sc_sweep_super, sc_sweep_sub, sc_verify, sc_embed})
    sc->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_config;
  }

  if (app.get_subcommands().empty()) {
    std::cerr << "error: expected one subcommand (assemble, eig, solve-limit, "
                 "solve-frac, sweep-super, sweep-sub, verify, embed-demo)\n";
    return exit_config;
  }

  if (const char* env = std::getenv("LOGLAP_OUTPUT_DIR")) cfg.dir = env;

  try {
    validate(cfg);
    if (sc_assemble->parsed()) return cmd_assemble(cfg, dump);
    if (sc_eig->parsed()) return cmd_eig(cfg);
    if (sc_solve_limit->parsed()) return cmd_solve_limit(cfg);
    if (sc_solve_frac->parsed()) return cmd_solve_frac(cfg);
    if (sc_sweep_super->parsed()) return cmd_sweep_super(cfg);
    if (sc_sweep_sub->parsed()) return cmd_sweep_sub(cfg);
    if (sc_verify->parsed()) return cmd_verify(cfg);
    if (sc_embed->parsed()) return cmd_embed_demo(cfg);
    return exit_config;
  } catch (const config_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return exit_config;
  } catch (const domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return exit_config;
  } catch (const dimension_error& e) {
    std::cerr << "dimension error: " << e.what() << "\n";
    return exit_config;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  }
}
