#include "slip/lifting.hpp"

#include "slip/errors.hpp"
#include "slip/io.hpp"
#include "slip/operators.hpp"
#include "slip/parallel.hpp"

#include <cmath>
#include <string>

namespace slip {

void check_flux(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& a, double tol) {
  const double net = integrate_boundary(grid, a);
  const double scale = std::max(1.0, integrate_boundary(grid, a.cwiseAbs()));
  if (std::abs(net) > tol * scale)
    throw IncompatibleFlux("normal boundary data violates the zero net flux condition (integral of a over the "
                           "boundary = " + fmt_sci(net) + ")");
}

NeumannLifting::NeumannLifting(const Grid& grid) : grid_(grid) {
  const DiscreteOperators op = build_operators(grid);
  const int nx = grid.nx, nc = grid.num_cells();
  std::vector<Eigen::Triplet<double>> tg;
  for (int r = 0; r < op.num_interior(); ++r) {
    const int f = op.interior[r];
    if (f < grid.num_u()) {
      const int i = f % (nx + 1), j = f / (nx + 1);
      tg.emplace_back(r, grid.cell_index(i, j), 1.0 / grid.hx);
      tg.emplace_back(r, grid.cell_index(i - 1, j), -1.0 / grid.hx);
    } else {
      const int i = (f - grid.num_u()) % nx, j = (f - grid.num_u()) / nx;
      tg.emplace_back(r, grid.cell_index(i, j), 1.0 / grid.hy);
      tg.emplace_back(r, grid.cell_index(i, j - 1), -1.0 / grid.hy);
    }
  }
  G_.resize(op.num_interior(), nc);
  G_.setFromTriplets(tg.begin(), tg.end());

  // B_I G h = -B_B N a, bordered by the cell weights to fix the mean
  const Eigen::SparseMatrix<double> L = -(op.B * op.SI.transpose()) * G_;
  std::vector<Eigen::Triplet<double>> ta;
  for (int k = 0; k < L.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(L, k); it; ++it) ta.emplace_back(it.row(), it.col(), it.value());
  for (int c = 0; c < nc; ++c) {
    ta.emplace_back(c, nc, op.cell_w[c]);
    ta.emplace_back(nc, c, op.cell_w[c]);
  }
  A_.resize(nc + 1, nc + 1);
  A_.setFromTriplets(ta.begin(), ta.end());
  rhs_op_ = op.B * op.SB.transpose() * op.N;
  to_interior_ = op.SI.transpose();
  to_boundary_ = op.SB.transpose() * op.N;

  lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
  lu_->compute(A_);
  if (lu_->info() != Eigen::Success) throw SolverDivergence("Neumann lifting: factorization failed");
}

LiftingResult NeumannLifting::solve(const Eigen::Ref<const Eigen::VectorXd>& a) const {
  check_flux(grid_, a);
  const int nc = grid_.num_cells();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nc + 1);
  rhs.head(nc) = rhs_op_ * a;
  const Eigen::VectorXd sol = lu_->solve(rhs);
  const double res = (A_ * sol - rhs).norm();
  if (!sol.allFinite() || res > 1e-10 * std::max(1.0, rhs.norm()))
    throw SolverDivergence("Neumann lifting: linear residual " + fmt_sci(res));

  LiftingResult out;
  out.h = Eigen::Map<const Eigen::MatrixXd>(sol.data(), grid_.nx, grid_.ny);
  const Eigen::VectorXd x = to_interior_ * (G_ * sol.head(nc)) + to_boundary_ * a;
  out.grad_h = VelocityField::from_vector(grid_, x);
  return out;
}

LiftingResult solve_neumann_lifting(const Eigen::Ref<const Eigen::VectorXd>& a, const Grid& grid) {
  return NeumannLifting(grid).solve(a);
}

std::vector<LiftingResult> time_lifting(const BoundarySeries& a, const Grid& grid, int workers) {
  const NeumannLifting lift(grid);
  std::vector<LiftingResult> out(a.cols());
  parallel_for(static_cast<int>(a.cols()), workers, [&](int n) {
    try {
      out[n] = lift.solve(a.col(n));
    } catch (const IncompatibleFlux& e) {
      throw IncompatibleFlux("slice " + std::to_string(n) + ": " + e.what());
    } catch (const SolverDivergence& e) {
      throw SolverDivergence("slice " + std::to_string(n) + ": " + e.what());
    }
  });
  return out;
}

Eigen::MatrixXd vertex_curl(const Grid& g, const VelocityField& y) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(g.nx + 1, g.ny + 1);
  for (int j = 1; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i)
      c(i, j) = (y.v(i, j) - y.v(i - 1, j)) / g.hx - (y.u(i, j) - y.u(i, j - 1)) / g.hy;
  return c;
}

}  // namespace slip
