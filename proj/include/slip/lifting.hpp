// Harmonic lifting of normal boundary data: -lap h = 0, dh/dn = a, mean(h) = 0.
#pragma once

#include "slip/fields.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <memory>
#include <vector>

namespace slip {

struct LiftingResult {
  Eigen::MatrixXd h;      // nx x ny, mean zero
  VelocityField grad_h;   // normal trace equals a exactly
};

/// Factorizes the bordered Neumann system once; solve() is then read-only.
class NeumannLifting {
 public:
  explicit NeumannLifting(const Grid& grid);
  LiftingResult solve(const Eigen::Ref<const Eigen::VectorXd>& a) const;
  const Grid& grid() const { return grid_; }

 private:
  Grid grid_;
  Eigen::SparseMatrix<double> G_;   // interior faces x cells
  Eigen::SparseMatrix<double> A_;
  Eigen::SparseMatrix<double> rhs_op_;
  Eigen::SparseMatrix<double> to_interior_, to_boundary_;
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
};

/// Throws IncompatibleFlux when the net flux of a is not zero.
void check_flux(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& a, double tol = 1e-10);

LiftingResult solve_neumann_lifting(const Eigen::Ref<const Eigen::VectorXd>& a, const Grid& grid);

std::vector<LiftingResult> time_lifting(const BoundarySeries& a, const Grid& grid, int workers = 1);

/// Discrete curl at interior vertices.
Eigen::MatrixXd vertex_curl(const Grid& grid, const VelocityField& y);

}  // namespace slip
