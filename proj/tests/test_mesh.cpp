#include "slip/mesh.hpp"

#include "doctest.h"

#include <random>

using namespace slip;

TEST_SUITE("mesh") {
  TEST_CASE("spacing and loop size") {
    const Grid g = build_grid(4, 4, 1.0, 1.0);
    CHECK(g.hx == 0.25);
    CHECK(g.hy == 0.25);
    CHECK(g.num_boundary() == 16);

    const Grid r = build_grid(8, 4, 2.0, 1.0);
    CHECK(r.hx == 0.25);
    CHECK(r.hy == 0.25);
    double len = 0.0;
    for (const auto& b : r.boundary) len += b.length;
    CHECK(len == doctest::Approx(6.0).epsilon(1e-15));
  }

  TEST_CASE("boundary frames are unit, orthogonal and right-handed") {
    const Grid g = build_grid(6, 5, 1.5, 1.0);
    for (const auto& b : g.boundary) {
      CHECK(b.n.norm() == doctest::Approx(1.0));
      CHECK(b.tau.norm() == doctest::Approx(1.0));
      CHECK(b.n.dot(b.tau) == 0.0);
      // tau = n rotated by +90 degrees
      CHECK(b.tau.x() == -b.n.y());
      CHECK(b.tau.y() == b.n.x());
    }
    const Grid u = build_grid(4, 4, 1.0, 1.0);
    for (const auto& b : u.boundary)
      if (b.wall == Wall::Right) {
        CHECK(b.n == Eigen::Vector2d(1, 0));
        CHECK(b.tau == Eigen::Vector2d(0, 1));
      }
  }

  TEST_CASE("arc length runs counter-clockwise from the bottom-left corner") {
    const Grid g = build_grid(4, 4, 1.0, 1.0);
    CHECK(g.boundary.front().wall == Wall::Bottom);
    CHECK(g.boundary.front().s == doctest::Approx(0.125));
    for (int k = 1; k < g.num_boundary(); ++k) CHECK(g.boundary[k].s > g.boundary[k - 1].s);
    CHECK(g.boundary.back().wall == Wall::Left);
  }

  TEST_CASE("too few cells or bad lengths are rejected") {
    CHECK_THROWS_AS(build_grid(3, 8, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(8, 8, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_time_grid(1.0, 0), std::invalid_argument);
  }

  TEST_CASE("integrate_boundary") {
    const Grid g = build_grid(8, 8, 1.0, 1.0);
    CHECK(integrate_boundary(g, Eigen::VectorXd::Ones(g.num_boundary())) == doctest::Approx(4.0));
    CHECK(integrate_boundary(g, Eigen::VectorXd::Zero(g.num_boundary())) == 0.0);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(g.num_boundary());
    for (int k = 0; k < g.num_boundary(); ++k) {
      if (g.boundary[k].wall == Wall::Right) f[k] = 1.0;
      if (g.boundary[k].wall == Wall::Left) f[k] = -1.0;
    }
    CHECK(std::abs(integrate_boundary(g, f)) < 1e-15);
  }

  TEST_CASE("integrate_interior") {
    const Grid g = build_grid(4, 4, 1.0, 1.0);
    CHECK(integrate_interior(g, Eigen::MatrixXd::Ones(4, 4)) == doctest::Approx(1.0));
    const Grid r = build_grid(6, 4, 3.0, 2.0);
    CHECK(integrate_interior(r, Eigen::MatrixXd::Constant(6, 4, 2.5)) == doctest::Approx(2.5 * 6.0));
    Eigen::MatrixXd x(4, 4);
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 4; ++i) x(i, j) = g.cell_center(i, j).x();
    CHECK(integrate_interior(g, x) == doctest::Approx(0.5).epsilon(1e-15));
  }

  TEST_CASE("quadratures are linear") {
    const Grid g = build_grid(8, 6, 1.0, 0.7);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> N;
    Eigen::VectorXd f(g.num_boundary()), h(g.num_boundary());
    for (int k = 0; k < f.size(); ++k) f[k] = N(rng), h[k] = N(rng);
    const double lhs = integrate_boundary(g, 2.0 * f - 3.0 * h);
    CHECK(lhs == doctest::Approx(2.0 * integrate_boundary(g, f) - 3.0 * integrate_boundary(g, h)).epsilon(1e-13));
    Eigen::MatrixXd A = Eigen::MatrixXd::Random(8, 6), B = Eigen::MatrixXd::Random(8, 6);
    CHECK(integrate_interior(g, A + 0.5 * B) ==
          doctest::Approx(integrate_interior(g, A) + 0.5 * integrate_interior(g, B)).epsilon(1e-13));
  }

  TEST_CASE("reversed loop negates tau, keeps integrals") {
    const Grid g = build_grid(6, 4, 1.0, 1.0);
    const Grid r = reversed_loop(g);
    REQUIRE(r.num_boundary() == g.num_boundary());
    Eigen::VectorXd f(g.num_boundary()), fr(g.num_boundary());
    for (int k = 0; k < g.num_boundary(); ++k) f[k] = std::sin(3.0 * g.boundary[k].s) + g.boundary[k].x.x();
    for (int k = 0; k < r.num_boundary(); ++k) {
      fr[k] = std::sin(3.0 * g.boundary[g.num_boundary() - 1 - k].s) + r.boundary[k].x.x();
      CHECK(r.boundary[k].x == g.boundary[g.num_boundary() - 1 - k].x);
      CHECK(r.boundary[k].tau == -g.boundary[g.num_boundary() - 1 - k].tau);
    }
    CHECK(integrate_boundary(r, fr) == doctest::Approx(integrate_boundary(g, f)).epsilon(1e-14));
  }

  TEST_CASE("time grid weights") {
    const TimeGrid t = build_time_grid(2.0, 8);
    CHECK(t.dt == 0.25);
    CHECK(t.slices() == 9);
    CHECK(t.weight(0) == 0.0);
    double s = 0.0;
    for (int n = 0; n < t.slices(); ++n) s += t.weight(n);
    CHECK(s == doctest::Approx(2.0));
  }
}
