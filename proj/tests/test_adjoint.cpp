#include "slip/adjoint_solver.hpp"
#include "slip/errors.hpp"
#include "slip/verify.hpp"

#include "doctest.h"
#include "problems.hpp"
#include "support.hpp"

using namespace slip;

namespace {

std::vector<VelocityField> random_source(const Grid& g, int slices, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<VelocityField> U;
  for (int n = 0; n < slices; ++n) U.push_back(test::noise(g, rng));
  return U;
}

}  // namespace

TEST_SUITE("adjoint_solver") {
  TEST_CASE("zero source") {
    const StateProblem s = test::random_state(8, 8, 1);
    auto base = std::make_shared<const StateTrajectory>(solve_state(s));
    const AdjointTrajectory adj =
        solve_adjoint({s, base, std::vector<VelocityField>(s.time.slices(), VelocityField::zero(s.grid))});
    for (const auto& p : adj.p) CHECK(test::max_abs(p) == 0.0);
    for (const auto& q : adj.pi) CHECK(q.q.cwiseAbs().maxCoeff() == 0.0);
    CHECK(adj.G_normal.cwiseAbs().maxCoeff() == 0.0);
    CHECK(adj.G_tangent.cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("linearity in the source") {
    const StateProblem s = test::random_state(8, 8, 2);
    auto base = std::make_shared<const StateTrajectory>(solve_state(s));
    std::vector<VelocityField> U = random_source(s.grid, s.time.slices(), 3), cU;
    for (const auto& u : U) cU.push_back(-1.7 * u);
    const auto A = solve_adjoint({s, base, U}), B = solve_adjoint({s, base, cU});
    for (int n = 0; n < s.time.slices(); ++n)
      CHECK(test::max_abs(B.p[n] + 1.7 * A.p[n]) <= 1e-12 * std::max(1.0, test::max_abs(B.p[n])));
    CHECK((B.G_normal + 1.7 * A.G_normal).cwiseAbs().maxCoeff() <= 1e-10);
  }

  TEST_CASE("around the null state the adjoint is the reversed Stokes-slip solve") {
    const Grid g = build_grid(8, 8, 1.0, 1.0);
    const TimeGrid t = build_time_grid(0.5, 6);
    StateProblem s{g, t, VelocityField::zero(g), zero_control(g, t), FrictionField::constant(g, t, 0.7), 1.0,
                   std::nullopt};
    auto base = std::make_shared<const StateTrajectory>(solve_state(s));
    const auto U = random_source(g, t.slices(), 4);
    const AdjointTrajectory adj = solve_adjoint({s, base, U});
    // w^k = p^{nt-k} steps forward with forcing U^{nt-k}
    const DiscreteOperators op = build_operators(g);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(g.num_boundary());
    VelocityField w = VelocityField::zero(g);
    for (int k = 0; k < t.nt; ++k) {
      w = stokes_slip_solve(op, VelocityField::zero(g), w, zero, zero, s.friction.alpha.col(t.nt - k), t.dt,
                            &U[t.nt - k])
              .y;
      CHECK(test::max_abs(w - adj.p[t.nt - k - 1]) <= 1e-9);
    }
  }

  TEST_CASE("adjoint velocity is solenoidal with zero wall flux") {
    const StateProblem s = test::random_state(8, 8, 5);
    auto base = std::make_shared<const StateTrajectory>(solve_state(s));
    const auto adj = solve_adjoint({s, base, random_source(s.grid, s.time.slices(), 6)});
    for (const auto& p : adj.p) {
      CHECK(normal_trace(s.grid, p).cwiseAbs().maxCoeff() == 0.0);
      CHECK(divergence(s.grid, p).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }

  TEST_CASE("duality relation") {
    const StateProblem s = test::random_state(16, 32, 7);
    auto base = std::make_shared<const StateTrajectory>(solve_state(s));
    const VelocityField yd = trig_field(s.grid, 8, 2, 0.5);
    std::vector<VelocityField> U;
    for (const auto& y : base->y) U.push_back(y - yd);
    const AdjointTrajectory adj = solve_adjoint({s, base, U});
    for (int k = 0; k < 3; ++k) {
      const BoundaryControl d = test::direction(s, 40 + k);
      const auto z = solve_linearized({s, base, d.a, d.b});
      const double r = duality_residual(s.grid, s.time, z, adj, U, d.a, d.b);
      CHECK(r <= 1e-9);
      // a constant shift of the normal kernel pairs to zero with zero-mean f
      AdjointTrajectory shifted = adj;
      shifted.G_normal.rightCols(s.time.nt).array() += 0.37;
      for (auto& q : shifted.pi) q.q.array() += 0.37;
      CHECK(duality_residual(s.grid, s.time, z, shifted, U, d.a, d.b) <= 1e-9);
      CHECK(duality_lhs(s.grid, s.time, z.z, U) == doctest::Approx(duality_rhs(s.grid, s.time, shifted, d.a, d.b)).epsilon(1e-9));
    }
  }

  TEST_CASE("null pairing is guarded") {
    const StateProblem s = test::random_state(8, 4, 9);
    auto base = std::make_shared<const StateTrajectory>(solve_state(s));
    const std::vector<VelocityField> U(s.time.slices(), VelocityField::zero(s.grid));
    const auto adj = solve_adjoint({s, base, U});
    const BoundarySeries zero = zero_series(s.grid, s.time);
    const auto z = solve_linearized({s, base, zero, zero});
    CHECK(duality_residual(s.grid, s.time, z, adj, U, zero, zero) == 0.0);
  }

  TEST_CASE("mismatched base") {
    const StateProblem s = test::random_state(8, 4, 10), q = test::random_state(8, 4, 11);
    auto b1 = std::make_shared<const StateTrajectory>(solve_state(s));
    auto b2 = std::make_shared<const StateTrajectory>(solve_state(q));
    const auto U = random_source(s.grid, s.time.slices(), 1);
    const BoundaryControl d = test::direction(s, 2);
    const auto z = solve_linearized({s, b1, d.a, d.b});
    const auto adj = solve_adjoint({q, b2, U});
    CHECK_THROWS_AS(duality_residual(s.grid, s.time, z, adj, U, d.a, d.b), MismatchedBase);
    CHECK_THROWS_AS(solve_adjoint({s, nullptr, U}), BaseTrajectoryMissing);
  }

  TEST_CASE("adjoint energy ratio") {
    const StateProblem s = test::random_state(8, 8, 12);
    auto base = std::make_shared<const StateTrajectory>(solve_state(s));
    const std::vector<VelocityField> zero(s.time.slices(), VelocityField::zero(s.grid));
    CHECK(adjoint_energy_check(s, solve_adjoint({s, base, zero}), zero) == 0.0);
    const auto U = random_source(s.grid, s.time.slices(), 13);
    std::vector<VelocityField> cU;
    for (const auto& u : U) cU.push_back(3.0 * u);
    const double r1 = adjoint_energy_check(s, solve_adjoint({s, base, U}), U);
    const double r2 = adjoint_energy_check(s, solve_adjoint({s, base, cU}), cU);
    CHECK(r1 > 0.0);
    CHECK(r2 == doctest::Approx(r1).epsilon(1e-12));
  }
}
