#pragma once

#include "slip/fields.hpp"

#include <random>

namespace slip::test {

template <class Fu, class Fv>
VelocityField sample(const Grid& g, Fu fu, Fv fv) {
  VelocityField y = VelocityField::zero(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      const auto x = g.u_point(i, j);
      y.u(i, j) = fu(x.x(), x.y());
    }
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const auto x = g.v_point(i, j);
      y.v(i, j) = fv(x.x(), x.y());
    }
  return y;
}

inline VelocityField noise(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  VelocityField y = VelocityField::zero(g);
  for (int k = 0; k < y.u.size(); ++k) y.u.data()[k] = N(rng);
  for (int k = 0; k < y.v.size(); ++k) y.v.data()[k] = N(rng);
  return y;
}

inline Eigen::VectorXd noise(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  Eigen::VectorXd x(n);
  for (int k = 0; k < n; ++k) x[k] = N(rng);
  return x;
}

inline double max_abs(const VelocityField& y) { return y.to_vector().cwiseAbs().maxCoeff(); }

}  // namespace slip::test
