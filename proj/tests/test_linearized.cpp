#include "slip/errors.hpp"
#include "slip/linearized_solver.hpp"

#include "doctest.h"
#include "problems.hpp"
#include "support.hpp"

using namespace slip;

TEST_SUITE("linearized_solver") {
  TEST_CASE("null direction") {
    const StateProblem s = test::random_state(8, 8, 1);
    auto base = std::make_shared<const StateTrajectory>(solve_state(s));
    const LinearizedTrajectory z =
        solve_linearized({s, base, zero_series(s.grid, s.time), zero_series(s.grid, s.time)});
    for (const auto& x : z.z) CHECK(test::max_abs(x) == 0.0);
    CHECK(z.base_hash == base->content_hash);
  }

  TEST_CASE("superposition") {
    const StateProblem s = test::random_state(8, 8, 2);
    auto base = std::make_shared<const StateTrajectory>(solve_state(s));
    const BoundaryControl d1 = test::direction(s, 10), d2 = test::direction(s, 11);
    const auto z1 = solve_linearized({s, base, d1.a, d1.b});
    const auto z2 = solve_linearized({s, base, d2.a, d2.b});
    const auto z = solve_linearized({s, base, 2.0 * d1.a - 0.7 * d2.a, 2.0 * d1.b - 0.7 * d2.b});
    for (int n = 0; n < s.time.slices(); ++n) {
      const VelocityField e = z.z[n] - (2.0 * z1.z[n] - 0.7 * z2.z[n]);
      CHECK(test::max_abs(e) <= 1e-10 * std::max(1.0, test::max_abs(z.z[n])));
    }
  }

  TEST_CASE("around the null state the linearization is the Stokes-slip step") {
    const Grid g = build_grid(8, 8, 1.0, 1.0);
    const TimeGrid t = build_time_grid(0.5, 6);
    StateProblem s{g, t, VelocityField::zero(g), zero_control(g, t), FrictionField::constant(g, t, 0.8), 1.0,
                   std::nullopt};
    auto base = std::make_shared<const StateTrajectory>(solve_state(s));
    const BoundaryControl d = random_control(g, t, 4, 1.0, 3.0, 10.0);
    const auto z = solve_linearized({s, base, zero_series(g, t), d.b});
    const DiscreteOperators op = build_operators(g);
    VelocityField y = VelocityField::zero(g);
    const VelocityField still = VelocityField::zero(g);
    for (int n = 0; n < t.nt; ++n) {
      y = stokes_slip_solve(op, still, y, Eigen::VectorXd::Zero(g.num_boundary()), d.b.col(n + 1),
                            s.friction.alpha.col(n + 1), t.dt)
              .y;
      CHECK(test::max_abs(z.z[n + 1] - y) <= 1e-10 * std::max(1.0, test::max_abs(y)));
    }
  }

  TEST_CASE("divergence and normal trace of z") {
    const StateProblem s = test::random_state(8, 8, 3);
    auto base = std::make_shared<const StateTrajectory>(solve_state(s));
    const BoundaryControl d = test::direction(s, 12);
    const auto z = solve_linearized({s, base, d.a, d.b});
    for (int n = 1; n < s.time.slices(); ++n) {
      CHECK(divergence(s.grid, z.z[n]).cwiseAbs().maxCoeff() <= 1e-9);
      CHECK((normal_trace(s.grid, z.z[n]) - d.a.col(n)).cwiseAbs().maxCoeff() == 0.0);
    }
  }

  TEST_CASE("transpose exactness of one step") {
    const Grid g = build_grid(8, 8, 1.0, 1.0);
    const DiscreteOperators op = build_operators(g);
    std::mt19937_64 rng(31);
    const VelocityField x0 = test::noise(g, rng), x1 = test::noise(g, rng);
    const LinearizedStep step(op, x0, x1, Eigen::VectorXd::Constant(g.num_boundary(), 0.7), 0.05);
    const int nI = op.num_interior(), nb = g.num_boundary();
    for (int k = 0; k < 20; ++k) {
      const Eigen::VectorXd z = test::noise(nI, rng), fp = test::noise(nb, rng), fn = test::noise(nb, rng),
                            gn = test::noise(nb, rng), eta = test::noise(step.output_size(), rng);
      const double lhs = step.apply(z, fp, fn, gn).dot(eta);
      const auto T = step.transpose(eta);
      const double rhs = z.dot(T.z) + fp.dot(T.f_prev) + fn.dot(T.f_next) + gn.dot(T.g_next);
      CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
    }
  }

  TEST_CASE("Gateaux discrepancy") {
    const StateProblem s = test::random_state(8, 16, 4);
    auto base = std::make_shared<const StateTrajectory>(solve_state(s));
    const LinearizedProblem zero{s, base, zero_series(s.grid, s.time), zero_series(s.grid, s.time)};
    for (double e : gateaux_discrepancy(zero, solve_linearized(zero), {1e-1, 1e-2})) CHECK(e == 0.0);

    const BoundaryControl d = test::direction(s, 13);
    const LinearizedProblem lp{s, base, d.a, d.b};
    const auto z = solve_linearized(lp);
    const std::vector<double> eps{1e-1, 1e-2, 1e-3};
    const auto disc = gateaux_discrepancy(lp, z, eps, 2);
    CHECK(disc[1] < disc[0]);
    CHECK(disc[2] < disc[1]);
    // O(eps): discrepancy / eps is nearly constant
    const double r0 = disc[0] / eps[0], r2 = disc[2] / eps[2];
    CHECK(r0 / r2 < 3.0);
    CHECK(r2 / r0 < 3.0);

    // quadratic remainder: doubling the direction quadruples the discrepancy
    const LinearizedProblem lp2{s, base, 2.0 * d.a, 2.0 * d.b};
    const auto disc2 = gateaux_discrepancy(lp2, solve_linearized(lp2), {1e-3});
    CHECK(disc2[0] / disc[2] == doctest::Approx(4.0).epsilon(0.05));
  }

  TEST_CASE("missing or mismatched base") {
    const StateProblem s = test::random_state(8, 4, 5);
    const BoundaryControl d = test::direction(s, 14);
    CHECK_THROWS_AS(solve_linearized({s, nullptr, d.a, d.b}), BaseTrajectoryMissing);
    auto base = std::make_shared<const StateTrajectory>(solve_state(s));
    BoundarySeries f = d.a;
    f(0, 2) += 1.0;
    CHECK_THROWS_AS(solve_linearized({s, base, f, d.b}), IncompatibleFlux);
  }
}
