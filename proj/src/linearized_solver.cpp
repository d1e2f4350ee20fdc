#include "slip/linearized_solver.hpp"

#include "slip/errors.hpp"
#include "slip/lifting.hpp"
#include "slip/parallel.hpp"

#include <cmath>
#include <string>

namespace slip {

LinearizedStep::LinearizedStep(const DiscreteOperators& op, const VelocityField& x_prev,
                               const VelocityField& x_next, const Eigen::Ref<const Eigen::VectorXd>& alpha_next,
                               double dt)
    : op_(op), sys_(op, x_prev.to_vector(), alpha_next, dt), Cw_(op.advection_w(x_next.to_vector())), dt_(dt) {
  mI_ = op.SI * op.mass;
}

int LinearizedStep::input_size() const { return op_.num_interior() + 3 * op_.grid.num_boundary(); }
int LinearizedStep::output_size() const { return op_.num_interior() + op_.grid.num_cells(); }

Eigen::VectorXd LinearizedStep::apply(const Eigen::Ref<const Eigen::VectorXd>& z,
                                      const Eigen::Ref<const Eigen::VectorXd>& f_prev,
                                      const Eigen::Ref<const Eigen::VectorXd>& f_next,
                                      const Eigen::Ref<const Eigen::VectorXd>& g_next) const {
  const int nI = op_.num_interior(), nc = op_.grid.num_cells();
  const Eigen::VectorXd z_full = op_.assemble(z, f_prev);
  const Eigen::VectorXd fb = op_.SB.transpose() * (op_.N * f_next);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sys_.size());
  rhs.head(nI) = mI_.cwiseProduct(z) / dt_ - op_.SI * (Cw_ * z_full) - op_.SI * (sys_.transport() * fb) +
                 op_.SI * op_.work(g_next);
  rhs.segment(nI, nc) = op_.B * fb;
  return sys_.solve(rhs).head(nI + nc);
}

LinearizedStep::Adjoint LinearizedStep::transpose(const Eigen::Ref<const Eigen::VectorXd>& eta) const {
  const int nI = op_.num_interior(), nc = op_.grid.num_cells();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sys_.size());
  rhs.head(nI + nc) = eta;
  const Eigen::VectorXd sol = sys_.solve_transpose(rhs);
  Adjoint r;
  r.lambda = sol.head(nI);
  r.psi = sol.segment(nI, nc);
  const Eigen::VectorXd lam_full = op_.SI.transpose() * r.lambda;
  const Eigen::VectorXd cw_t = Cw_.transpose() * lam_full;
  r.z = mI_.cwiseProduct(r.lambda) / dt_ - op_.SI * cw_t;
  r.f_prev = -(op_.N * (op_.SB * cw_t));
  r.f_next = -(op_.N * (op_.SB * (sys_.transport().transpose() * lam_full))) +
             op_.N * (op_.SB * (op_.B.transpose() * r.psi));
  r.g_next = op_.Pb.transpose() * op_.vertex_len.cwiseProduct(op_.T * lam_full);
  return r;
}

namespace {

void check_base(const LinearizedProblem& pb) {
  if (!pb.base || static_cast<int>(pb.base->y.size()) != pb.state.time.slices() ||
      static_cast<int>(pb.base->p.size()) != pb.state.time.nt)
    throw BaseTrajectoryMissing("linearized solve needs a complete base trajectory");
}

}  // namespace

LinearizedTrajectory solve_linearized(const LinearizedProblem& pb) {
  check_base(pb);
  const Grid& g = pb.state.grid;
  const TimeGrid& time = pb.state.time;
  const int nb = g.num_boundary();
  if (pb.f.rows() != nb || pb.g.rows() != nb || pb.f.cols() != time.slices() || pb.g.cols() != time.slices())
    throw std::invalid_argument("direction must be (boundary nodes) x (nt+1)");
  for (int n = 1; n <= time.nt; ++n) {
    try {
      check_flux(g, pb.f.col(n));
    } catch (const IncompatibleFlux& e) {
      throw IncompatibleFlux("direction slice " + std::to_string(n) + ": " + e.what());
    }
  }
  const DiscreteOperators op = build_operators(g, pb.state.nu);
  const StateTrajectory& base = *pb.base;
  LinearizedTrajectory out;
  out.base_hash = base.content_hash;
  out.z.push_back(VelocityField::zero(g));
  Eigen::VectorXd z = Eigen::VectorXd::Zero(op.num_interior());
  const Eigen::VectorXd zero_b = Eigen::VectorXd::Zero(nb);
  for (int n = 0; n < time.nt; ++n) {
    const LinearizedStep step(op, base.y[n], base.y[n + 1], pb.state.friction.alpha.col(n + 1), time.dt);
    // y(0) is fixed data: the slice-0 direction does not perturb it
    const Eigen::VectorXd f_prev = n == 0 ? zero_b : Eigen::VectorXd(pb.f.col(n));
    const Eigen::VectorXd r = step.apply(z, f_prev, pb.f.col(n + 1), pb.g.col(n + 1));
    z = r.head(op.num_interior());
    out.z.push_back(VelocityField::from_vector(g, op.assemble(z, pb.f.col(n + 1))));
    PressureField p;
    p.q = Eigen::Map<const Eigen::MatrixXd>(r.data() + op.num_interior(), g.nx, g.ny);
    p.mean_zero = true;
    out.pi.push_back(std::move(p));
  }
  return out;
}

std::vector<double> gateaux_discrepancy(const LinearizedProblem& pb, const LinearizedTrajectory& z,
                                        const std::vector<double>& eps, int workers) {
  check_base(pb);
  if (z.base_hash != pb.base->content_hash) throw MismatchedBase("linearized trajectory belongs to another base");
  std::vector<double> out(eps.size(), 0.0);
  parallel_for(static_cast<int>(eps.size()), workers, [&](int k) {
    StateProblem s = pb.state;
    s.controls.a += eps[k] * pb.f;
    s.controls.b += eps[k] * pb.g;
    const StateTrajectory ye = solve_state(s);
    double sup = 0.0;
    for (int n = 0; n < pb.state.time.slices(); ++n) {
      VelocityField d = (1.0 / eps[k]) * (ye.y[n] - pb.base->y[n]) - z.z[n];
      sup = std::max(sup, l2_norm(s.grid, d));
    }
    out[k] = sup;
  });
  return out;
}

double linearized_energy(const StateProblem& s, const std::vector<VelocityField>& z) {
  double sup = 0.0, integ = 0.0;
  for (int n = 0; n < static_cast<int>(z.size()); ++n) {
    const double l2 = l2_norm(s.grid, z[n]);
    sup = std::max(sup, l2 * l2);
    if (n == 0) continue;
    const double d = strain_l2(s.grid, z[n]);
    const Eigen::VectorXd t = wall_tangential(s.grid, z[n]);
    double fr = 0.0;
    for (int m = 0; m < s.grid.num_wall_vertices(); ++m) {
      const WallVertex& v = s.grid.wall_vertices[m];
      fr += v.length * 0.5 * (s.friction.alpha(v.node_a, n) + s.friction.alpha(v.node_b, n)) * t[m] * t[m];
    }
    integ += s.time.dt * (d * d + fr);
  }
  return sup + integ;
}

}  // namespace slip
