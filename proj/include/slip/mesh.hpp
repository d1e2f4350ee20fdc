// Rectangular domain, MAC staggered grid, boundary loop and quadratures.
#pragma once

#include <Eigen/Core>

#include <vector>

namespace slip {

enum class Wall { Bottom, Right, Top, Left };

const char* wall_name(Wall w);

/// One sample point of the boundary loop: the midpoint of a wall edge, which
/// is also where the wall-normal MAC velocity lives.
struct BoundaryNode {
  Wall wall;
  int index;  // cell index along the wall (i on bottom/top, j on left/right)
  double s;   // arc length from the bottom-left corner, counter-clockwise
  Eigen::Vector2d x;
  Eigen::Vector2d n;    // outward unit normal
  Eigen::Vector2d tau;  // n rotated by +90 degrees
  double length;        // length of the edge the node represents
  int face;             // index of the normal-velocity face in the full velocity vector
  double sign;          // y.n = sign * (stored face value)
};

/// Grid vertex on a wall, excluding the four corners. The tangential slip
/// relation is imposed here.
struct WallVertex {
  Wall wall;
  int i, j;
  int node_a, node_b;  // adjacent boundary nodes, in loop order
  Eigen::Vector2d tau;
  double length;       // boundary length attributed to the vertex
};

struct Grid {
  int nx = 0, ny = 0;
  double Lx = 0.0, Ly = 0.0;
  double hx = 0.0, hy = 0.0;
  std::vector<BoundaryNode> boundary;
  std::vector<WallVertex> wall_vertices;

  int num_u() const { return (nx + 1) * ny; }
  int num_v() const { return nx * (ny + 1); }
  int num_faces() const { return num_u() + num_v(); }
  int num_cells() const { return nx * ny; }
  int num_vertices() const { return (nx + 1) * (ny + 1); }
  int num_boundary() const { return static_cast<int>(boundary.size()); }
  int num_wall_vertices() const { return static_cast<int>(wall_vertices.size()); }

  int u_index(int i, int j) const { return j * (nx + 1) + i; }
  int v_index(int i, int j) const { return num_u() + j * nx + i; }
  int cell_index(int i, int j) const { return j * nx + i; }
  int vertex_index(int i, int j) const { return j * (nx + 1) + i; }

  double area() const { return Lx * Ly; }
  double perimeter() const { return 2.0 * (Lx + Ly); }
  bool corner_vertex(int i, int j) const { return (i == 0 || i == nx) && (j == 0 || j == ny); }

  // staggered sample locations
  Eigen::Vector2d u_point(int i, int j) const { return {i * hx, (j + 0.5) * hy}; }
  Eigen::Vector2d v_point(int i, int j) const { return {(i + 0.5) * hx, j * hy}; }
  Eigen::Vector2d cell_center(int i, int j) const { return {(i + 0.5) * hx, (j + 0.5) * hy}; }
};

struct TimeGrid {
  double T = 1.0;
  int nt = 1;
  double dt = 1.0;

  double t(int n) const { return n * dt; }
  int slices() const { return nt + 1; }
  /// Right-endpoint weight of slice n in time integrals: slice 0 carries no weight.
  double weight(int n) const { return n == 0 ? 0.0 : dt; }
};

Grid build_grid(int nx, int ny, double Lx, double Ly);
TimeGrid build_time_grid(double T, int nt);

/// Same grid with the boundary loop traversed clockwise (tau negated).
Grid reversed_loop(const Grid& grid);

/// Midpoint rule over the edges of the closed loop.
double integrate_boundary(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& f);

/// Midpoint rule over cells; f is nx-by-ny.
double integrate_interior(const Grid& grid, const Eigen::Ref<const Eigen::MatrixXd>& f);

}  // namespace slip
