// Backward sweep with the transposed linearized steps, and the boundary
// kernels that pair with the direction data (f, g).
#pragma once

#include "slip/linearized_solver.hpp"

#include <memory>
#include <vector>

namespace slip {

struct AdjointProblem {
  StateProblem state;
  std::shared_ptr<const StateTrajectory> base;
  std::vector<VelocityField> U;  // nt+1 slices; slice 0 carries no weight
};

struct AdjointTrajectory {
  std::vector<VelocityField> p;   // nt+1 slices, p[nt] = 0, zero on wall faces
  std::vector<PressureField> pi;  // nt slices
  BoundarySeries G_normal;        // pairs with f; slice 0 is zero
  BoundarySeries G_tangent;       // pairs with g; slice 0 is zero
  std::string base_hash;
};

AdjointTrajectory solve_adjoint(const AdjointProblem& problem);

/// sum_n dt <z^n, U^n> over the full velocity field
double duality_lhs(const Grid& grid, const TimeGrid& time, const std::vector<VelocityField>& z,
                   const std::vector<VelocityField>& U);
/// sum_n dt sum_k l_k (g G_tangent + f G_normal)
double duality_rhs(const Grid& grid, const TimeGrid& time, const AdjointTrajectory& adj, const BoundarySeries& f,
                   const BoundarySeries& g);

/// |lhs - rhs| / (|lhs| + |rhs| + eps_mach); 0 when both sides vanish.
double duality_residual(const Grid& grid, const TimeGrid& time, const LinearizedTrajectory& z,
                        const AdjointTrajectory& adj, const std::vector<VelocityField>& U, const BoundarySeries& f,
                        const BoundarySeries& g);

/// (sup |p|^2 + sum dt (|D p|^2 + |sqrt(alpha) p.tau|^2)) / sum dt |U|^2
double adjoint_energy_check(const StateProblem& state, const AdjointTrajectory& adj,
                            const std::vector<VelocityField>& U);

}  // namespace slip
