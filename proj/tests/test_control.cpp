#include "slip/control_opt.hpp"

#include "doctest.h"
#include "problems.hpp"
#include "support.hpp"

using namespace slip;

namespace {

CostParams target_of(const StateProblem& s, const BoundaryControl& c, double l1 = 0.0, double l2 = 0.0) {
  StateProblem q = s;
  q.controls = c;
  return {solve_state(q).y, l1, l2, 10.0, 3.0};
}

}  // namespace

TEST_SUITE("control_opt") {
  TEST_CASE("cost values") {
    const Grid g = build_grid(8, 8, 1.0, 1.0);
    const TimeGrid t = build_time_grid(1.0, 8);
    const BoundaryControl zero = zero_control(g, t);
    StateTrajectory tr;
    tr.y.assign(t.slices(), VelocityField::zero(g));
    CostParams P{tr.y, 0.0, 0.0, 1.0, 3.0};
    CHECK(evaluate_cost(g, t, zero, tr, P) == 0.0);

    VelocityField one = VelocityField::zero(g);
    one.u.setOnes();
    P.y_d.assign(t.slices(), one);
    CHECK(evaluate_cost(g, t, zero, tr, P) == doctest::Approx(0.5).epsilon(1e-14));

    P.y_d.assign(t.slices(), VelocityField::zero(g));
    P.lambda2 = 2.0;
    BoundaryControl c = zero;
    c.b.setOnes();
    CHECK(evaluate_cost(g, t, c, tr, P) == doctest::Approx(4.0).epsilon(1e-14));
    P.y_d.pop_back();
    CHECK_THROWS_AS(evaluate_cost(g, t, c, tr, P), std::invalid_argument);
  }

  TEST_CASE("gradient vanishes at a realized target") {
    const StateProblem s = test::random_state(8, 8, 1);
    TrackingProblem tp(s, target_of(s, s.controls));
    const Gradient G = tp.gradient(s.controls);
    CHECK(G.J == 0.0);
    CHECK(G.a.cwiseAbs().maxCoeff() == 0.0);
    CHECK(G.b.cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("penalty-only gradient") {
    const StateProblem s = test::random_state(8, 8, 2);
    TrackingProblem tp(s, target_of(s, s.controls, 0.3, 0.8));
    const Gradient G = tp.gradient(s.controls);
    BoundarySeries ea = remove_boundary_mean(s.grid, 0.3 * s.controls.a), eb = 0.8 * s.controls.b;
    ea.col(0).setZero();
    eb.col(0).setZero();
    CHECK((G.a - ea).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((G.b - eb).cwiseAbs().maxCoeff() < 1e-14);
  }

  TEST_CASE("adjoint gradient matches finite differences") {
    const StateProblem s = test::random_state(8, 8, 3);
    const BoundaryControl cstar = test::direction(s, 99, 0.8);
    TrackingProblem tp(s, target_of(s, cstar, 0.1, 0.2));
    const Gradient G = tp.gradient(s.controls);
    for (int n = 0; n < s.time.slices(); ++n) CHECK(std::abs(integrate_boundary(s.grid, G.a.col(n))) < 1e-14);
    for (int k = 0; k < 4; ++k) {
      const BoundaryControl d = test::direction(s, 50 + k);
      const double ad = control_inner(s.grid, s.time, G.a, G.b, d.a, d.b);
      const FdEstimate fd = fd_gradient_oracle(tp, s.controls, d.a, d.b, {1e-4}, 2);
      CHECK(std::abs(fd.central[0] - ad) <= 1e-6 * std::abs(ad));
      CHECK(std::abs(fd.richardson[0] - ad) <= 1e-6 * std::abs(ad));
    }
  }

  TEST_CASE("finite-difference oracle") {
    const StateProblem s = test::random_state(8, 8, 4);
    TrackingProblem tp(s, target_of(s, test::direction(s, 7, 0.5)));
    const BoundarySeries zero = zero_series(s.grid, s.time);
    const FdEstimate z = fd_gradient_oracle(tp, s.controls, zero, zero, {1e-2, 1e-3});
    for (double x : z.central) CHECK(x == 0.0);
    for (double x : z.richardson) CHECK(x == 0.0);

    const Gradient G = tp.gradient(s.controls);
    const FdEstimate e = fd_gradient_oracle(tp, s.controls, G.a, G.b, {1e-3, 1e-4, 1e-5});
    for (double x : e.central) CHECK(x > 0.0);

    // error against the adjoint value over a wide eps sweep: large at both ends
    const BoundaryControl d = test::direction(s, 8);
    const double ad = control_inner(s.grid, s.time, G.a, G.b, d.a, d.b);
    const std::vector<double> eps{1e-1, 1e-3, 1e-5, 1e-7, 1e-9};
    const FdEstimate sweep = fd_gradient_oracle(tp, s.controls, d.a, d.b, eps, 2, &ad);
    std::vector<double> err;
    for (double x : sweep.central) err.push_back(std::abs(x - ad));
    const auto best = std::min_element(err.begin(), err.end()) - err.begin();
    CHECK(best > 0);
    CHECK(best < static_cast<long>(eps.size()) - 1);
    CHECK(std::abs(sweep.best - ad) <= std::abs(sweep.richardson.back() - ad));
  }

  TEST_CASE("projection onto the admissible set") {
    const Grid g = build_grid(8, 8, 1.0, 1.0);
    const TimeGrid t = build_time_grid(1.0, 8);
    BoundaryControl c = random_control(g, t, 5, 0.5, 3.0, 1.0);
    CHECK(is_admissible(g, t, c));
    const BoundaryControl p = project_admissible(g, t, c);
    // an admissible control is fixed up to roundoff of its zero mean
    CHECK((p.a - c.a).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((p.b - c.b).cwiseAbs().maxCoeff() <= 1e-15);

    BoundaryControl off = c;
    off.a.array() += 0.25;
    const BoundaryControl q = project_admissible(g, t, off);
    for (int n = 0; n < t.slices(); ++n) CHECK(std::abs(integrate_boundary(g, q.a.col(n))) < 1e-12);

    BoundaryControl big = random_control(g, t, 6, 2.0, 3.0, 1.0);
    const BoundaryControl r = project_admissible(g, t, big);
    CHECK(hp_norm(g, t, r) == doctest::Approx(1.0).epsilon(1e-13));
    const BoundaryControl rr = project_admissible(g, t, r);
    CHECK((rr.a - r.a).cwiseAbs().maxCoeff() < 1e-15);
  }

  TEST_CASE("projection does not expand distances") {
    const Grid g = build_grid(8, 8, 1.0, 1.0);
    const TimeGrid t = build_time_grid(1.0, 8);
    for (int k = 0; k < 20; ++k) {
      const BoundaryControl x = random_control(g, t, 100 + k, 0.5 + 0.2 * k, 3.0, 1.0);
      const BoundaryControl y = random_control(g, t, 200 + k, 0.3 + 0.15 * k, 3.0, 1.0);
      const BoundaryControl px = project_admissible(g, t, x), py = project_admissible(g, t, y);
      CHECK(hp_norm(g, t, px.a - py.a, px.b - py.b, 3.0) <= hp_norm(g, t, x.a - y.a, x.b - y.b, 3.0) + 1e-12);
    }
  }

  TEST_CASE("random controls") {
    const Grid g = build_grid(8, 8, 1.0, 1.0);
    const TimeGrid t = build_time_grid(1.0, 8);
    const BoundaryControl c = random_control(g, t, 1, 0.7, 3.0, 2.0);
    CHECK(is_admissible(g, t, c));
    CHECK(hp_norm(g, t, c) == doctest::Approx(0.7));
    CHECK(c.a.col(0).cwiseAbs().maxCoeff() == 0.0);
    const BoundaryControl d = random_control(g, t, 1, 0.7, 3.0, 2.0);
    CHECK(control_hash(c) == control_hash(d));
  }

  TEST_CASE("already stationary start") {
    const StateProblem s = test::random_state(8, 8, 5);
    StateProblem z = s;
    z.controls = zero_control(s.grid, s.time, 3.0, 10.0);
    TrackingProblem tp(z, target_of(z, z.controls, 0.5, 0.5));
    OptimizeOptions o;
    o.tol = 1e-12;
    const OptimizationReport r = optimize(tp, z.controls, o);
    CHECK(r.converged);
    CHECK(r.history.size() == 1);
    CHECK(r.final_residual <= 1e-12);
    const Gradient G = tp.gradient(z.controls);
    CHECK(optimality_residual(z.grid, z.time, z.controls, G, 8).total() == 0.0);
  }

  TEST_CASE("recovery on a small grid") {
    const StateProblem s = test::random_state(8, 16, 6);
    StateProblem z = s;
    z.controls = zero_control(s.grid, s.time, 3.0, 10.0);
    TrackingProblem tp(z, target_of(z, test::direction(z, 42, 1.0)));
    OptimizeOptions o;
    o.tol = 0.0;
    o.max_iters = 15;
    std::vector<BoundaryControl> iterates;
    o.on_iterate = [&](const BoundaryControl& c) { iterates.push_back(c); };
    const OptimizationReport r = optimize(tp, z.controls, o);
    CHECK(r.status == "max_iters");
    CHECK(r.history.size() == 16);
    CHECK(iterates.size() == r.history.size());
    CHECK(r.history.back().J <= 1e-2 * r.history.front().J);
    for (std::size_t k = 1; k < r.history.size(); ++k) CHECK(r.history[k].J <= r.history[k - 1].J);
    for (const auto& c : iterates) CHECK(is_admissible(z.grid, z.time, c));
    CHECK(report_json(r) == report_json(r));
    CHECK(history_csv(r).rfind("iter,J,grad_norm,residual,step\n", 0) == 0);
  }

  TEST_CASE("larger normal penalty does not enlarge the normal control") {
    const StateProblem s = test::random_state(8, 8, 7);
    StateProblem z = s;
    z.controls = zero_control(s.grid, s.time, 3.0, 10.0);
    const CostParams base = target_of(z, test::direction(z, 43, 1.0));
    double prev = 1e300;
    for (double l1 : {1e-3, 2e-3, 4e-3}) {
      CostParams P = base;
      P.lambda1 = l1;
      TrackingProblem tp(z, P);
      OptimizeOptions o;
      o.tol = 0.0;
      o.max_iters = 40;
      const OptimizationReport r = optimize(tp, z.controls, o);
      const double na = std::sqrt(boundary_time_inner(z.grid, z.time, r.controls.a, r.controls.a));
      CHECK(na <= prev * (1.0 + 1e-6));
      prev = na;
    }
  }
}
