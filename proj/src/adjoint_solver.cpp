#include "slip/adjoint_solver.hpp"

#include "slip/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace slip {

AdjointTrajectory solve_adjoint(const AdjointProblem& pb) {
  const Grid& g = pb.state.grid;
  const TimeGrid& time = pb.state.time;
  if (!pb.base || static_cast<int>(pb.base->y.size()) != time.slices())
    throw BaseTrajectoryMissing("adjoint solve needs a complete base trajectory");
  if (static_cast<int>(pb.U.size()) != time.slices()) throw std::invalid_argument("source must have nt+1 slices");
  for (const auto& u : pb.U)
    if (!u.all_finite()) throw std::invalid_argument("non-finite adjoint source");

  const DiscreteOperators op = build_operators(g, pb.state.nu);
  const StateTrajectory& base = *pb.base;
  const int nI = op.num_interior(), nc = g.num_cells(), nb = g.num_boundary(), nt = time.nt;
  const double dt = time.dt;

  AdjointTrajectory out;
  out.base_hash = base.content_hash;
  out.p.assign(time.slices(), VelocityField::zero(g));
  out.pi.assign(nt, PressureField{Eigen::MatrixXd::Zero(g.nx, g.ny), true});
  out.G_normal = BoundarySeries::Zero(nb, time.slices());
  out.G_tangent = BoundarySeries::Zero(nb, time.slices());

  Eigen::VectorXd carry = Eigen::VectorXd::Zero(nI);     // z-bar from the later step
  Eigen::VectorXd f_carry = Eigen::VectorXd::Zero(nb);   // f-bar of slice m from step m -> m+1
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(nI + nc);
  for (int m = nt; m >= 1; --m) {
    const Eigen::VectorXd Um = pb.U[m].to_vector();
    eta.setZero();
    eta.head(nI) = dt * (op.SI * op.mass.cwiseProduct(Um)) + carry;
    LinearizedStep::Adjoint r;
    try {
      const LinearizedStep step(op, base.y[m - 1], base.y[m], pb.state.friction.alpha.col(m), dt);
      r = step.transpose(eta);
    } catch (const SolverDivergence& e) {
      throw SolverDivergence("adjoint step " + std::to_string(m) + ": " + e.what());
    }
    out.p[m - 1] = VelocityField::from_vector(g, op.SI.transpose() * (r.lambda / dt));
    out.pi[m - 1].q = Eigen::Map<const Eigen::MatrixXd>(r.psi.data(), g.nx, g.ny) / dt;
    // wall faces of the tracking term pair with f directly
    const Eigen::VectorXd layer = dt * (op.N * (op.SB * op.mass.cwiseProduct(Um)));
    for (int k = 0; k < nb; ++k) {
      const double l = g.boundary[k].length;
      out.G_normal(k, m) = (r.f_next[k] + f_carry[k] + layer[k]) / (dt * l);
      out.G_tangent(k, m) = r.g_next[k] / (dt * l);
    }
    carry = r.z;
    f_carry = r.f_prev;
  }
  return out;
}

double duality_lhs(const Grid& g, const TimeGrid& time, const std::vector<VelocityField>& z,
                   const std::vector<VelocityField>& U) {
  double s = 0.0;
  for (int n = 1; n < time.slices(); ++n) s += time.weight(n) * inner(g, z[n], U[n]);
  return s;
}

double duality_rhs(const Grid& g, const TimeGrid& time, const AdjointTrajectory& adj, const BoundarySeries& f,
                   const BoundarySeries& gg) {
  return boundary_time_inner(g, time, adj.G_tangent, gg) + boundary_time_inner(g, time, adj.G_normal, f);
}

double duality_residual(const Grid& g, const TimeGrid& time, const LinearizedTrajectory& z,
                        const AdjointTrajectory& adj, const std::vector<VelocityField>& U, const BoundarySeries& f,
                        const BoundarySeries& gg) {
  if (z.base_hash != adj.base_hash)
    throw MismatchedBase("linearized and adjoint trajectories were computed around different states");
  const double l = duality_lhs(g, time, z.z, U);
  const double r = duality_rhs(g, time, adj, f, gg);
  if (l == 0.0 && r == 0.0) return 0.0;
  return std::abs(l - r) / (std::abs(l) + std::abs(r) + std::numeric_limits<double>::epsilon());
}

double adjoint_energy_check(const StateProblem& s, const AdjointTrajectory& adj, const std::vector<VelocityField>& U) {
  double u2 = 0.0;
  for (int n = 1; n < s.time.slices(); ++n) {
    const double l = l2_norm(s.grid, U[n]);
    u2 += s.time.dt * l * l;
  }
  if (u2 == 0.0) return 0.0;
  return linearized_energy(s, adj.p) / u2;
}

}  // namespace slip
