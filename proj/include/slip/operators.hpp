// Sparse discrete operators on the full face vector [u; v].
#pragma once

#include "slip/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <vector>

namespace slip {

using SpMat = Eigen::SparseMatrix<double>;

/// One face of the control volume around an interior velocity face, in the
/// skew-symmetric advection stencil. The flux through it is linear in the
/// advecting field, and the transported value across it is linear in the
/// advected field.
struct CvFace {
  int row;                        // the interior face owning the control volume
  int flux_idx[2];
  double flux_coef[2];
  int nb_idx[2];
  double nb_coef[2];
  int nb_count;
  bool at_wall;                   // transported value is wall data, not a neighbour unknown
};

struct DiscreteOperators {
  Grid grid;
  double nu = 1.0;

  SpMat B;     // cells x faces, area-weighted divergence
  SpMat D11;   // cells x faces
  SpMat D22;   // cells x faces
  SpMat D12;   // vertices x faces
  SpMat T;     // wall vertices x faces, tangential wall value
  SpMat Pb;    // wall vertices x boundary nodes, edge-to-vertex average
  SpMat SI;    // interior faces x faces
  SpMat SB;    // boundary nodes x faces
  SpMat N;     // boundary nodes x boundary nodes, y.n -> stored face value
  SpMat Kvisc; // 2 nu (D:D) part of the viscous form

  Eigen::VectorXd mass;        // face weights
  Eigen::VectorXd cell_w;      // cell weights
  Eigen::VectorXd vertex_w;
  Eigen::VectorXd vertex_len;  // boundary length carried by each wall vertex
  std::vector<int> interior;   // interior face -> full face index
  std::vector<CvFace> cv_faces;

  int num_interior() const { return static_cast<int>(interior.size()); }

  /// Viscous-slip form for friction alpha given on boundary nodes.
  SpMat viscous(const Eigen::Ref<const Eigen::VectorXd>& alpha) const;
  /// C(w) in C(w) x; rows of wall faces are empty.
  SpMat advection(const Eigen::Ref<const Eigen::VectorXd>& w) const;
  /// d/dw [C(w) x] for fixed x.
  SpMat advection_w(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// Slip work load T^T L Pb b.
  Eigen::VectorXd work(const Eigen::Ref<const Eigen::VectorXd>& b) const;
  /// Full face vector from interior values and boundary normal data.
  Eigen::VectorXd assemble(const Eigen::Ref<const Eigen::VectorXd>& xi,
                           const Eigen::Ref<const Eigen::VectorXd>& a) const;
};

DiscreteOperators build_operators(const Grid& grid, double nu = 1.0);

}  // namespace slip
