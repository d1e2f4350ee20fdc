#include "slip/cli.hpp"

#include "slip/errors.hpp"
#include "slip/io.hpp"
#include "slip/lifting.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>

namespace slip {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

void write_config(const RunConfig& c, const fs::path& dir) {
  fs::create_directories(dir);
  write_text(dir / "config.ini", resolved_config(c));
  write_text(dir / "config.sha256", config_hash(c) + "\n");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_solve(const RunConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const StateProblem s = build_state_problem(c);
  validate(s);
  const StateTrajectory tr = solve_state(s);
  const std::string h = config_hash(c);
  write_config(c, c.out_dir);
  write_trajectory(c.out_dir / "trajectory", s.grid, tr, h, c.snapshot_every);

  const auto eb = energy_balance(tr, s);
  std::string csv = "step,kinetic,dissipation,friction,cross,advection,pressure,work,forcing,residual,relative\n";
  double worst = 0.0;
  for (std::size_t n = 0; n < eb.size(); ++n) {
    const auto& e = eb[n];
    csv += std::to_string(n + 1) + "," + fmt(e.kinetic) + "," + fmt(e.dissipation) + "," + fmt(e.friction) + "," +
           fmt(e.cross) + "," + fmt(e.advection) + "," + fmt(e.pressure) + "," + fmt(e.work) + "," +
           fmt(e.forcing) + "," + fmt(e.residual) + "," + fmt(e.relative) + "\n";
    worst = std::max(worst, e.relative);
  }
  write_text(c.out_dir / "energy.csv", csv);
  double div = 0.0;
  for (const auto& y : tr.y) div = std::max(div, divergence(s.grid, y).cwiseAbs().maxCoeff());
  json j;
  j["config_hash"] = h;
  j["content_hash"] = tr.content_hash;
  j["slices"] = static_cast<int>(tr.y.size());
  j["max_energy_residual"] = worst;
  j["max_divergence"] = div;
  write_text(c.out_dir / "solve.json", j.dump(2) + "\n");
  spdlog::info("solve: {} steps, energy residual {:.3e}, max div {:.3e}, {:.2f}s", c.nt, worst, div,
               seconds_since(t0));
  return kOk;
}

int cmd_optimize(const RunConfig& c) {
  if (c.target == "none") throw ConfigError("optimize needs a [target] block");
  StateProblem s = build_state_problem(c);
  validate(s);
  const BoundaryControl start = s.controls;
  TrackingProblem problem(s, build_cost(c, s));
  OptimizeOptions o = c.opt;
  o.seed = c.seed;
  const OptimizationReport r = optimize(problem, start, o);
  write_config(c, c.out_dir);
  write_text(c.out_dir / "report.json", report_json(r));
  write_text(c.out_dir / "history.csv", history_csv(r));
  write_boundary_csv(c.out_dir / "control_a.csv", s.grid, s.time, r.controls.a, 1);
  write_boundary_csv(c.out_dir / "control_b.csv", s.grid, s.time, r.controls.b, 1);
  spdlog::info("optimize: {} after {} iterations, J {:.6e}, residual {:.3e} (start {:.3e})", r.status,
               r.history.size() - 1, r.history.back().J, r.final_residual, r.initial_residual);
  spdlog::info("optimize: state {:.2f}s, adjoint {:.2f}s, total {:.2f}s", r.time_state, r.time_adjoint, r.time_total);
  return r.converged ? kOk : kBudget;
}

int cmd_grad_check(const RunConfig& c) {
  StateProblem s = build_state_problem(c);
  validate(s);
  const BoundaryControl ctrl = s.controls;
  TrackingProblem problem(s, build_cost(c, s));
  problem.corrupt_adjoint = c.corrupt_adjoint;
  const Gradient G = problem.gradient(ctrl);

  std::vector<VelocityField> U;
  for (int n = 0; n < s.time.slices(); ++n) U.push_back(G.state->y[n] - problem.params().y_d[n]);
  const AdjointTrajectory adj = solve_adjoint({s, G.state, U});

  json rows = json::array();
  std::string csv = "direction,adjoint,fd,rel_error,best_eps,duality\n";
  double worst_rel = 0.0, worst_dual = 0.0;
  std::fprintf(stderr, "%4s %22s %22s %11s %9s %11s\n", "dir", "adjoint", "fd", "rel.err", "eps", "duality");
  for (int k = 0; k < c.gc_directions; ++k) {
    const BoundaryControl d = random_control(s.grid, s.time, c.seed + 1000 + k, 1.0, c.p, c.R);
    const double ad = control_inner(s.grid, s.time, G.a, G.b, d.a, d.b);
    const FdEstimate fd = fd_gradient_oracle(problem, ctrl, d.a, d.b, c.gc_eps, c.workers, &ad);
    const double rel = std::abs(fd.best - ad) / std::max(std::abs(ad), 1e-14);
    const LinearizedTrajectory z = solve_linearized({s, G.state, d.a, d.b});
    const double dual = duality_residual(s.grid, s.time, z, adj, U, d.a, d.b);
    worst_rel = std::max(worst_rel, rel);
    worst_dual = std::max(worst_dual, dual);
    std::fprintf(stderr, "%4d %22.15e %22.15e %11.3e %9.1e %11.3e\n", k, ad, fd.best, rel, fd.best_eps, dual);
    csv += std::to_string(k) + "," + fmt(ad) + "," + fmt(fd.best) + "," + fmt(rel) + "," + fmt(fd.best_eps) + "," +
           fmt(dual) + "\n";
    rows.push_back({{"direction", k},
                    {"adjoint", ad},
                    {"fd", fd.best},
                    {"central", fd.central},
                    {"richardson", fd.richardson},
                    {"rel_error", rel},
                    {"best_eps", fd.best_eps},
                    {"duality", dual}});
  }
  const bool pass = worst_rel <= 1e-6 && worst_dual <= 1e-9;
  json j;
  j["config_hash"] = config_hash(c);
  j["J"] = G.J;
  j["max_rel_error"] = worst_rel;
  j["max_duality_residual"] = worst_dual;
  j["pass"] = pass;
  j["directions"] = rows;
  write_config(c, c.out_dir);
  write_text(c.out_dir / "gradcheck.json", j.dump(2) + "\n");
  write_text(c.out_dir / "gradcheck.csv", csv);
  spdlog::info("grad-check: max relative error {:.3e}, max duality residual {:.3e}: {}", worst_rel, worst_dual,
               pass ? "pass" : "FAIL");
  return pass ? kOk : kCheckFailed;
}

int cmd_verify(const RunConfig& c) {
  const SuiteResult r = run_estimate_suite(build_suite(c));
  write_config(c, c.out_dir);
  write_text(c.out_dir / "verify.json", suite_json(r));
  std::cout << suite_table(r) << std::flush;
  spdlog::info("verify: {} checks in {:.1f}s", r.reports.size(), r.seconds);
  return r.all_pass() ? kOk : kCheckFailed;
}

int cmd_lift(const RunConfig& c) {
  const Grid g = config_grid(c);
  const TimeGrid t = config_time(c);
  // boundary data at the final time, before any initial-slice replacement
  RunConfig raw = c;
  raw.initial = "zero";
  const StateProblem s = build_state_problem(raw);
  const Eigen::VectorXd a = s.controls.a.col(t.nt);
  const LiftingResult L = solve_neumann_lifting(a, g);
  const double div = divergence(g, L.grad_h).cwiseAbs().maxCoeff();
  const double trace = (normal_trace(g, L.grad_h) - a).cwiseAbs().maxCoeff();
  const bool pass = div <= 1e-9 && trace <= 1e-9;
  write_config(c, c.out_dir);
  write_snapshot(c.out_dir / "lift_grad_h.bin", g, L.grad_h, t.T);
  json j;
  j["config_hash"] = config_hash(c);
  j["max_divergence"] = div;
  j["max_trace_error"] = trace;
  j["l2_norm"] = l2_norm(g, L.grad_h);
  j["pass"] = pass;
  write_text(c.out_dir / "lift.json", j.dump(2) + "\n");
  spdlog::info("lift: |div| {:.3e}, trace error {:.3e}", div, trace);
  return pass ? kOk : kCheckFailed;
}

}  // namespace

int run_command(const std::string& command, const RunConfig& c) {
  try {
    validate(c);
    if (command == "solve") return cmd_solve(c);
    if (command == "optimize") return cmd_optimize(c);
    if (command == "grad-check") return cmd_grad_check(c);
    if (command == "verify") return cmd_verify(c);
    if (command == "lift") return cmd_lift(c);
    spdlog::error("unknown command {}", command);
    return kConfig;
  } catch (const ConfigError& e) {
    spdlog::error("config: {}", e.what());
    return kConfig;
  } catch (const IncompatibleFlux& e) {
    spdlog::error("config: {}", e.what());
    return kConfig;
  } catch (const std::invalid_argument& e) {
    spdlog::error("config: {}", e.what());
    return kConfig;
  } catch (const std::exception& e) {
    spdlog::error("solver: {}", e.what());
    return kSolver;
  }
}

int run_cli(int argc, char** argv) {
  auto logger = spdlog::get("slipctl");
  if (!logger) logger = spdlog::stderr_color_st("slipctl");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"slipctl: Navier-Stokes slip-wall boundary control"};
  app.require_subcommand(1, 1);
  std::string config_path, out_dir, level = "info";
  int workers = 1;
  long long seed = -1;
  for (const char* name : {"solve", "optimize", "grad-check", "verify", "lift"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "random seed")->check(CLI::NonNegativeNumber);
    sub->add_option("--log-level", level, "trace|debug|info|warn|error|off");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  spdlog::set_level(spdlog::level::from_str(level));
  const std::string command = app.get_subcommands().front()->get_name();

  RunConfig c;
  try {
    c = parse_config(config_path);
  } catch (const Error& e) {
    spdlog::error("config: {}", e.what());
    return kConfig;
  }
  c.workers = workers;
  if (!out_dir.empty()) c.out_dir = out_dir;
  if (seed >= 0) c.seed = static_cast<std::uint64_t>(seed);
  spdlog::info("{}: config {} (hash {})", command, config_path, config_hash(c).substr(0, 12));
  return run_command(command, c);
}

}  // namespace slip
