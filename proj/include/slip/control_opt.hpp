// Tracking cost, adjoint gradient, admissible-set projection and projected gradient descent.
#pragma once

#include "slip/adjoint_solver.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace slip {

struct CostParams {
  std::vector<VelocityField> y_d;  // nt+1 slices
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double radius = 1.0;
  double p_exponent = 3.0;
};

void validate(const CostParams& params);

double evaluate_cost(const Grid& grid, const TimeGrid& time, const BoundaryControl& controls,
                     const StateTrajectory& traj, const CostParams& params);

struct Gradient {
  BoundarySeries a;  // zero boundary mean per slice
  BoundarySeries b;
  double J = 0.0;
  std::shared_ptr<const StateTrajectory> state;
};

/// State data (grid, y0, friction, viscosity) with a cost; controls vary.
/// Keeps the most recent state and gradient keyed by a hash of the controls.
class TrackingProblem {
 public:
  TrackingProblem(StateProblem state, CostParams params);

  const StateProblem& state() const { return state_; }
  const CostParams& params() const { return params_; }
  const Grid& grid() const { return state_.grid; }
  const TimeGrid& time() const { return state_.time; }

  std::shared_ptr<const StateTrajectory> trajectory(const BoundaryControl& c);
  double cost(const BoundaryControl& c);
  Gradient gradient(const BoundaryControl& c);

  /// Test hook: perturbs the tangential kernel so gradient checks must fail.
  bool corrupt_adjoint = false;

 private:
  StateProblem with(const BoundaryControl& c) const;

  StateProblem state_;
  CostParams params_;
  std::string traj_key_, grad_key_;
  std::shared_ptr<const StateTrajectory> traj_;
  Gradient grad_;
};

std::string control_hash(const BoundaryControl& c);

Gradient cost_gradient(TrackingProblem& problem, const BoundaryControl& controls);

/// <(a1,b1),(a2,b2)> in L2(boundary x time) with the solver's time weights.
double control_inner(const Grid& grid, const TimeGrid& time, const BoundarySeries& a1, const BoundarySeries& b1,
                     const BoundarySeries& a2, const BoundarySeries& b2);

struct FdEstimate {
  std::vector<double> eps;
  std::vector<double> central;     // (J(c+eps d) - J(c-eps d)) / (2 eps)
  std::vector<double> richardson;  // (4 D(eps/2) - D(eps)) / 3
  double best = 0.0;
  double best_eps = 0.0;
};

/// Central differences of the cost along (f, g). With a reference value the
/// Richardson estimate closest to it is reported as best, otherwise the one
/// at the middle eps.
FdEstimate fd_gradient_oracle(const TrackingProblem& problem, const BoundaryControl& controls,
                              const BoundarySeries& f, const BoundarySeries& g, const std::vector<double>& eps,
                              int workers = 1, const double* reference = nullptr);

/// Zero boundary mean per slice, then radial scaling into the hp-ball of radius R.
BoundaryControl project_admissible(const Grid& grid, const TimeGrid& time, const BoundaryControl& c);

bool is_admissible(const Grid& grid, const TimeGrid& time, const BoundaryControl& c, double mean_tol = 1e-12,
                   double norm_tol = 1e-12);

/// Random smooth admissible control, scaled to hp-norm `norm`.
BoundaryControl random_control(const Grid& grid, const TimeGrid& time, std::uint64_t seed, double norm, double p,
                               double radius, int modes = 3);

struct OptimalityResidual {
  double projection = 0.0;  // hp(c - P(c - grad))
  double probe = 0.0;       // max(0, -min <grad, q - c>) over admissible probes q
  double total() const { return projection + probe; }
};

OptimalityResidual optimality_residual(const Grid& grid, const TimeGrid& time, const BoundaryControl& c,
                                       const Gradient& grad, int probe_count, std::uint64_t seed = 0);

struct OptimizeOptions {
  double tol = 1e-8;      // absolute residual target
  double rtol = 0.0;      // relative to the starting residual; 0 disables
  int max_iters = 50;
  double c1 = 1e-4;
  int max_backtracks = 30;
  int probes = 8;
  double initial_step = 1.0;
  std::uint64_t seed = 0;
  std::function<void(const BoundaryControl&)> on_iterate;  // every accepted iterate, including the start
};

struct IterationRecord {
  int iter = 0;
  double J = 0.0;
  double grad_norm = 0.0;
  double residual = 0.0;
  double step = 0.0;
  int backtracks = 0;
  bool projected = false;       // the radial scaling was active for the accepted point
  double taylor_remainder = 0.0;  // |J(c+) - J(c) - <g, c+ - c>| / |c+ - c|
};

struct OptimizationReport {
  std::vector<IterationRecord> history;
  BoundaryControl controls;
  bool converged = false;
  bool line_search_failure = false;
  std::string status;
  double initial_residual = 0.0;
  double final_residual = 0.0;
  // wall-clock seconds per phase; kept out of the serialized report
  double time_state = 0.0, time_adjoint = 0.0, time_total = 0.0;
};

OptimizationReport optimize(TrackingProblem& problem, const BoundaryControl& start, const OptimizeOptions& opts);

/// Deterministic JSON (no timings) and CSV history.
std::string report_json(const OptimizationReport& r);
std::string history_csv(const OptimizationReport& r);

}  // namespace slip
