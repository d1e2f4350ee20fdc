// Exact derivative of the discrete state step, and its transpose.
#pragma once

#include "slip/state_solver.hpp"

#include <memory>
#include <vector>

namespace slip {

struct LinearizedProblem {
  StateProblem state;                          // data behind the base trajectory
  std::shared_ptr<const StateTrajectory> base;
  BoundarySeries f;                            // normal direction, zero mean per slice
  BoundarySeries g;                            // tangential direction
};

struct LinearizedTrajectory {
  std::vector<VelocityField> z;   // nt+1 slices, z[0] = 0
  std::vector<PressureField> pi;  // nt slices
  std::string base_hash;
};

/// One linearized step n -> n+1 around a stored base. Inputs are the interior
/// part of z^n and the boundary data f^n, f^{n+1}, g^{n+1}; outputs are the
/// interior part of z^{n+1} followed by the cell pressure.
class LinearizedStep {
 public:
  LinearizedStep(const DiscreteOperators& op, const VelocityField& x_prev, const VelocityField& x_next,
                 const Eigen::Ref<const Eigen::VectorXd>& alpha_next, double dt);

  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& z, const Eigen::Ref<const Eigen::VectorXd>& f_prev,
                        const Eigen::Ref<const Eigen::VectorXd>& f_next,
                        const Eigen::Ref<const Eigen::VectorXd>& g_next) const;

  struct Adjoint {
    Eigen::VectorXd z;       // interior faces
    Eigen::VectorXd f_prev;  // boundary nodes
    Eigen::VectorXd f_next;
    Eigen::VectorXd g_next;
    Eigen::VectorXd lambda;  // multipliers of the step system
    Eigen::VectorXd psi;
  };
  /// Transpose of apply(): eta = [interior velocity part; cell pressure part].
  Adjoint transpose(const Eigen::Ref<const Eigen::VectorXd>& eta) const;

  int input_size() const;
  int output_size() const;

 private:
  const DiscreteOperators& op_;
  StepSystem sys_;
  SpMat Cw_;
  double dt_;
  Eigen::VectorXd mI_;
};

LinearizedTrajectory solve_linearized(const LinearizedProblem& problem);

/// sup_n ||(y_eps - y)/eps - z||_{L2} for each eps, with re-solved states.
std::vector<double> gateaux_discrepancy(const LinearizedProblem& problem, const LinearizedTrajectory& z,
                                        const std::vector<double>& eps, int workers = 1);

/// sup_n ||z||^2 + sum dt (|D z|^2 + |sqrt(alpha) z.tau|^2_wall)
double linearized_energy(const StateProblem& state, const std::vector<VelocityField>& z);

}  // namespace slip
