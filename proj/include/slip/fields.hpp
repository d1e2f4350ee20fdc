// Discrete fields on the MAC grid, norms, and the boundary control space.
#pragma once

#include "slip/mesh.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace slip {

/// Velocity on the staggered grid. u(i,j) sits at (i hx, (j+1/2) hy) and v(i,j)
/// at ((i+1/2) hx, j hy). Flattened as [u column-major, v column-major].
struct VelocityField {
  Eigen::MatrixXd u;  // (nx+1) x ny
  Eigen::MatrixXd v;  // nx x (ny+1)

  static VelocityField zero(const Grid& grid);
  static VelocityField from_vector(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& x);
  Eigen::VectorXd to_vector() const;
  bool all_finite() const;

  VelocityField& operator+=(const VelocityField& o);
  VelocityField& operator-=(const VelocityField& o);
  VelocityField& operator*=(double c);
};

VelocityField operator+(VelocityField a, const VelocityField& b);
VelocityField operator-(VelocityField a, const VelocityField& b);
VelocityField operator*(double c, VelocityField a);

struct PressureField {
  Eigen::MatrixXd q;  // nx x ny
  bool mean_zero = false;
};

/// D11 and D22 at cell centers, D12 at grid vertices.
struct StrainField {
  Eigen::MatrixXd d11;  // nx x ny
  Eigen::MatrixXd d22;  // nx x ny
  Eigen::MatrixXd d12;  // (nx+1) x (ny+1)
};

/// One value per boundary node (loop order).
using BoundaryScalar = Eigen::VectorXd;
/// Boundary values over time: nodes x (nt+1), one column per time slice.
using BoundarySeries = Eigen::MatrixXd;

struct BoundaryControl {
  BoundarySeries a;  // injection-suction flux y.n
  BoundarySeries b;  // tangential traction data
  double p_exponent = 3.0;
  double radius = 1.0;
};

struct FrictionField {
  BoundarySeries alpha;
  double alpha_min = 1e-3;

  static FrictionField constant(const Grid& grid, const TimeGrid& time, double value,
                                double alpha_min = 1e-3);
  /// Throws std::invalid_argument when alpha drops below alpha_min.
  void validate() const;
};

struct StateTrajectory {
  std::vector<VelocityField> y;   // nt+1 slices
  std::vector<PressureField> p;   // nt slices, p[n] belongs to step n -> n+1
  TimeGrid time;
  std::string content_hash;
};

// --- quadrature weights -----------------------------------------------------

/// Face weights of the velocity L2 product: hx*hy inside, half of that on walls.
Eigen::VectorXd face_weights(const Grid& grid);
/// Vertex weights for the D12 quadrature: hx*hy inside, halved on walls, quartered at corners.
Eigen::VectorXd vertex_weights(const Grid& grid);

// --- operators --------------------------------------------------------------

Eigen::MatrixXd divergence(const Grid& grid, const VelocityField& y);
StrainField strain_tensor(const Grid& grid, const VelocityField& y);

double l2_norm(const Grid& grid, const VelocityField& y);
double l2_norm_cells(const Grid& grid, const Eigen::Ref<const Eigen::MatrixXd>& f);
double l2_norm_boundary(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& f);
double h1_seminorm(const Grid& grid, const VelocityField& y);
double strain_l2(const Grid& grid, const VelocityField& y);
/// sum_faces w (y . z)
double inner(const Grid& grid, const VelocityField& y, const VelocityField& z);

/// y.n at boundary nodes (exact face values).
BoundaryScalar normal_trace(const Grid& grid, const VelocityField& y);
/// y.tau at the non-corner wall vertices, by linear extrapolation of the
/// wall-parallel component from the two nearest rows.
Eigen::VectorXd wall_tangential(const Grid& grid, const VelocityField& y);
/// y.tau at boundary nodes: average of the adjacent wall-vertex values; nodes
/// touching a corner take the single adjacent value.
BoundaryScalar tangential_trace(const Grid& grid, const VelocityField& y);

/// Component-wise interior integral of the velocity.
Eigen::Vector2d spatial_mean(const Grid& grid, const VelocityField& y);

/// Velocity with its wall-normal faces overwritten by `a` (y.n = a).
void impose_normal_trace(const Grid& grid, VelocityField& y, const Eigen::Ref<const Eigen::VectorXd>& a);

// --- control space ----------------------------------------------------------

BoundarySeries zero_series(const Grid& grid, const TimeGrid& time);
BoundaryControl zero_control(const Grid& grid, const TimeGrid& time, double p_exponent = 3.0,
                             double radius = 1.0);

/// Discrete fractional seminorm of order 1-1/p on the loop plus the L_p norm.
double boundary_wsp_norm(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& f, double p);
/// Loop Fourier norm with weights (1+|k|)^{-1/2}.
double boundary_hm12_norm(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& f);

struct HpNormParts {
  double space = 0.0;     // L2 in time of the W^{1-1/p}_p norm of a
  double time = 0.0;      // L2 in time of the H^{-1/2} norm of d_t a
  double traction = 0.0;  // L2(Gamma_T) norm of b
  double total() const { return space + time + traction; }
};

HpNormParts hp_norm_parts(const Grid& grid, const TimeGrid& time, const BoundarySeries& a,
                          const BoundarySeries& b, double p);
double hp_norm(const Grid& grid, const TimeGrid& time, const BoundarySeries& a, const BoundarySeries& b,
               double p);
double hp_norm(const Grid& grid, const TimeGrid& time, const BoundaryControl& c);

/// Space-time L2(Gamma_T) product of boundary series with right-endpoint time weights.
double boundary_time_inner(const Grid& grid, const TimeGrid& time, const BoundarySeries& f,
                           const BoundarySeries& g);

/// Per-slice boundary mean removed.
BoundarySeries remove_boundary_mean(const Grid& grid, const BoundarySeries& a);

}  // namespace slip
