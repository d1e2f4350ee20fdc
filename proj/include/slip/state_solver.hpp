// Semi-implicit Navier-Stokes stepping with Navier slip walls and prescribed
// normal flux. Each step is one linear saddle-point solve.
#pragma once

#include "slip/fields.hpp"
#include "slip/operators.hpp"

#include <Eigen/SparseLU>

#include <memory>
#include <optional>
#include <vector>

namespace slip {

struct StateProblem {
  Grid grid;
  TimeGrid time;
  VelocityField y0;
  BoundaryControl controls;
  FrictionField friction;
  double nu = 1.0;
  std::optional<VelocityField> forcing;  // constant in time
};

/// Throws IncompatibleFlux / std::invalid_argument when the problem data are inconsistent.
void validate(const StateProblem& problem, double tol = 1e-10);

/// Saddle-point matrix of one step, unknowns [interior faces; cell pressure; mean multiplier]:
///   [ M/dt + C(w) + K   -B^T   0 ]
///   [ -B                  0    w ]
///   [ 0                  w^T   0 ]
class StepSystem {
 public:
  StepSystem(const DiscreteOperators& op, const Eigen::Ref<const Eigen::VectorXd>& w,
             const Eigen::Ref<const Eigen::VectorXd>& alpha, double dt);

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  Eigen::VectorXd solve_transpose(const Eigen::VectorXd& rhs) const;

  int size() const { return static_cast<int>(A_.rows()); }
  const SpMat& matrix() const { return A_; }
  /// C(w) + K on the full face vector
  const SpMat& transport() const { return CK_; }
  const SpMat& viscous() const { return K_; }

 private:
  SpMat A_, CK_, K_;
  std::shared_ptr<Eigen::SparseLU<SpMat>> lu_;
};

struct StepResult {
  VelocityField y;
  PressureField p;
};

StepResult stokes_slip_solve(const DiscreteOperators& op, const VelocityField& advecting,
                             const VelocityField& y_prev, const Eigen::Ref<const Eigen::VectorXd>& a_next,
                             const Eigen::Ref<const Eigen::VectorXd>& b_next,
                             const Eigen::Ref<const Eigen::VectorXd>& alpha_next, double dt,
                             const VelocityField* forcing = nullptr);

StateTrajectory solve_state(const StateProblem& problem);

/// Terms of the discrete energy balance of one step, tested against the new velocity.
struct EnergyBalance {
  double kinetic = 0.0;      // interior (|y+|^2 - |y|^2 + |y+ - y|^2) / (2 dt)
  double dissipation = 0.0;  // 2 nu |D(y+)|^2
  double friction = 0.0;     // alpha (y+.tau)^2 on walls
  double cross = 0.0;        // -2 nu <D(y+), D(wall part of y+)>
  double advection = 0.0;    // boundary flux of the skew form
  double pressure = 0.0;     // pressure work of the normal flux
  double work = 0.0;         // slip data work b (y+.tau)
  double forcing = 0.0;
  double residual = 0.0;
  double relative = 0.0;
};

std::vector<EnergyBalance> energy_balance(const StateTrajectory& traj, const StateProblem& problem);
std::vector<double> energy_identity_residual(const StateTrajectory& traj, const StateProblem& problem);

/// Linear shear y = (c1 + c2 y, 0) with the flux and slip data it induces on each wall;
/// a fixed point of the step map for constant alpha.
StateProblem shear_problem(const Grid& grid, const TimeGrid& time, double c1, double c2, double alpha,
                           double nu = 1.0);

/// Content hash of the problem data that determine the trajectory.
std::string problem_hash(const StateProblem& problem);

}  // namespace slip
