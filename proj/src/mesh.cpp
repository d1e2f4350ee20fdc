#include "slip/mesh.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace slip {

const char* wall_name(Wall w) {
  switch (w) {
    case Wall::Bottom: return "bottom";
    case Wall::Right: return "right";
    case Wall::Top: return "top";
    case Wall::Left: return "left";
  }
  return "?";
}

Grid build_grid(int nx, int ny, double Lx, double Ly) {
  if (nx < 4 || ny < 4)
    throw std::invalid_argument("build_grid: need at least 4 cells per direction, got " +
                                std::to_string(nx) + "x" + std::to_string(ny));
  if (!(Lx > 0.0) || !(Ly > 0.0))
    throw std::invalid_argument("build_grid: domain lengths must be positive");

  Grid g;
  g.nx = nx;
  g.ny = ny;
  g.Lx = Lx;
  g.Ly = Ly;
  g.hx = Lx / nx;
  g.hy = Ly / ny;

  const Eigen::Vector2d ex(1, 0), ey(0, 1);
  auto node = [&](Wall w, int idx, double s, Eigen::Vector2d x, Eigen::Vector2d n, double len,
                  int face, double sign) {
    BoundaryNode b;
    b.wall = w;
    b.index = idx;
    b.s = s;
    b.x = x;
    b.n = n;
    b.tau = Eigen::Vector2d(-n.y(), n.x());
    b.length = len;
    b.face = face;
    b.sign = sign;
    g.boundary.push_back(b);
  };

  // counter-clockwise from the bottom-left corner
  for (int i = 0; i < nx; ++i)
    node(Wall::Bottom, i, (i + 0.5) * g.hx, {(i + 0.5) * g.hx, 0.0}, -ey, g.hx, g.v_index(i, 0), -1.0);
  for (int j = 0; j < ny; ++j)
    node(Wall::Right, j, Lx + (j + 0.5) * g.hy, {Lx, (j + 0.5) * g.hy}, ex, g.hy, g.u_index(nx, j), 1.0);
  for (int i = nx - 1; i >= 0; --i)
    node(Wall::Top, i, Lx + Ly + (nx - 1 - i + 0.5) * g.hx, {(i + 0.5) * g.hx, Ly}, ey, g.hx,
         g.v_index(i, ny), 1.0);
  for (int j = ny - 1; j >= 0; --j)
    node(Wall::Left, j, 2.0 * Lx + Ly + (ny - 1 - j + 0.5) * g.hy, {0.0, (j + 0.5) * g.hy}, -ex, g.hy,
         g.u_index(0, j), -1.0);

  auto bottom_pos = [&](int i) { return i; };
  auto right_pos = [&](int j) { return nx + j; };
  auto top_pos = [&](int i) { return nx + ny + (nx - 1 - i); };
  auto left_pos = [&](int j) { return 2 * nx + ny + (ny - 1 - j); };

  auto vertex = [&](Wall w, int i, int j, int a, int b, double len) {
    WallVertex v;
    v.wall = w;
    v.i = i;
    v.j = j;
    v.node_a = a;
    v.node_b = b;
    v.tau = g.boundary[a].tau;
    v.length = len;
    g.wall_vertices.push_back(v);
  };
  for (int i = 1; i < nx; ++i) vertex(Wall::Bottom, i, 0, bottom_pos(i - 1), bottom_pos(i), g.hx);
  for (int j = 1; j < ny; ++j) vertex(Wall::Right, nx, j, right_pos(j - 1), right_pos(j), g.hy);
  for (int i = nx - 1; i >= 1; --i) vertex(Wall::Top, i, ny, top_pos(i), top_pos(i - 1), g.hx);
  for (int j = ny - 1; j >= 1; --j) vertex(Wall::Left, 0, j, left_pos(j), left_pos(j - 1), g.hy);

  return g;
}

TimeGrid build_time_grid(double T, int nt) {
  if (!(T > 0.0)) throw std::invalid_argument("build_time_grid: T must be positive");
  if (nt < 1) throw std::invalid_argument("build_time_grid: need at least one step");
  return TimeGrid{T, nt, T / nt};
}

Grid reversed_loop(const Grid& grid) {
  Grid r = grid;
  const double L = grid.perimeter();
  r.boundary.assign(grid.boundary.rbegin(), grid.boundary.rend());
  for (auto& b : r.boundary) {
    b.tau = -b.tau;
    b.s = L - b.s;
  }
  const int nb = grid.num_boundary();
  r.wall_vertices.assign(grid.wall_vertices.rbegin(), grid.wall_vertices.rend());
  for (auto& v : r.wall_vertices) {
    std::swap(v.node_a, v.node_b);
    v.node_a = nb - 1 - v.node_a;
    v.node_b = nb - 1 - v.node_b;
    v.tau = -v.tau;
  }
  return r;
}

double integrate_boundary(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& f) {
  if (f.size() != grid.num_boundary())
    throw std::invalid_argument("integrate_boundary: expected " + std::to_string(grid.num_boundary()) +
                                " samples, got " + std::to_string(f.size()));
  double sum = 0.0;
  for (int k = 0; k < grid.num_boundary(); ++k) sum += f[k] * grid.boundary[k].length;
  return sum;
}

double integrate_interior(const Grid& grid, const Eigen::Ref<const Eigen::MatrixXd>& f) {
  if (f.rows() != grid.nx || f.cols() != grid.ny)
    throw std::invalid_argument("integrate_interior: expected an nx-by-ny cell array");
  return f.sum() * grid.hx * grid.hy;
}

}  // namespace slip
