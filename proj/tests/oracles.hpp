#pragma once

#include "slip/mesh.hpp"

#include <algorithm>
#include <cmath>

namespace slip::test {

/// L2 distance between cell-wise constant values and a function, 3x3 Gauss per cell.
template <class F>
double cellwise_l2_error(const Grid& g, const Eigen::MatrixXd& cells, F exact) {
  const double r = std::sqrt(0.6);
  const double x[3] = {-r, 0.0, r}, w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  double s = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const auto c = g.cell_center(i, j);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          const double e = cells(i, j) - exact(c.x() + 0.5 * g.hx * x[a], c.y() + 0.5 * g.hy * x[b]);
          s += 0.25 * w[a] * w[b] * g.hx * g.hy * e * e;
        }
    }
  return std::sqrt(s);
}

/// L2 distance between the bilinear interpolant of cell-centre values and a
/// function; the half-cell strips along the walls are linearly extrapolated.
/// Each cell is split at its centre so the integrand is polynomial per quadrant.
template <class F>
double bilinear_l2_error(const Grid& g, const Eigen::MatrixXd& cells, F exact) {
  const double r = std::sqrt(0.6);
  const double q[3] = {-r, 0.0, r}, w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  auto interp = [&](double x, double y) {
    const int i = std::clamp(static_cast<int>(std::floor(x / g.hx - 0.5)), 0, g.nx - 2);
    const int j = std::clamp(static_cast<int>(std::floor(y / g.hy - 0.5)), 0, g.ny - 2);
    const double s = x / g.hx - 0.5 - i, t = y / g.hy - 0.5 - j;
    return (1 - s) * (1 - t) * cells(i, j) + s * (1 - t) * cells(i + 1, j) + (1 - s) * t * cells(i, j + 1) +
           s * t * cells(i + 1, j + 1);
  };
  double sum = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      for (int qx = 0; qx < 2; ++qx)
        for (int qy = 0; qy < 2; ++qy) {
          const double x0 = (i + 0.5 * qx) * g.hx, y0 = (j + 0.5 * qy) * g.hy;
          const double ax = 0.25 * g.hx, ay = 0.25 * g.hy;
          for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
              const double x = x0 + ax * (1.0 + q[a]), y = y0 + ay * (1.0 + q[b]);
              const double e = interp(x, y) - exact(x, y);
              sum += w[a] * w[b] * ax * ay * e * e;
            }
        }
  return std::sqrt(sum);
}

/// Flux of grad(x^2 - y^2) through each wall edge.
inline Eigen::VectorXd saddle_flux(const Grid& g) {
  Eigen::VectorXd a(g.num_boundary());
  for (int k = 0; k < g.num_boundary(); ++k) {
    const auto& b = g.boundary[k];
    a[k] = Eigen::Vector2d(2.0 * b.x.x(), -2.0 * b.x.y()).dot(b.n);
  }
  return a;
}

}  // namespace slip::test
