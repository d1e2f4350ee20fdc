#include "slip/control_opt.hpp"

#include "slip/errors.hpp"
#include "slip/io.hpp"
#include "slip/parallel.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace slip {

void validate(const CostParams& p) {
  if (!(p.lambda1 >= 0.0) || !(p.lambda2 >= 0.0)) throw std::invalid_argument("penalties must be non-negative");
  if (!(p.radius > 0.0)) throw std::invalid_argument("admissible radius must be positive");
  if (!(p.p_exponent > 2.0)) throw std::invalid_argument("p must exceed 2");
}

double evaluate_cost(const Grid& g, const TimeGrid& time, const BoundaryControl& c, const StateTrajectory& tr,
                     const CostParams& p) {
  if (static_cast<int>(tr.y.size()) != time.slices() || static_cast<int>(p.y_d.size()) != time.slices())
    throw std::invalid_argument("evaluate_cost: state and target need nt+1 slices");
  if (c.a.cols() != time.slices() || c.b.cols() != time.slices() || c.a.rows() != g.num_boundary() ||
      c.b.rows() != g.num_boundary())
    throw std::invalid_argument("evaluate_cost: control shape mismatch");
  double J = 0.0;
  for (int n = 1; n < time.slices(); ++n) {
    const double e = l2_norm(g, tr.y[n] - p.y_d[n]);
    const double pen = integrate_boundary(
        g, 0.5 * p.lambda1 * c.a.col(n).cwiseAbs2() + 0.5 * p.lambda2 * c.b.col(n).cwiseAbs2());
    J += time.weight(n) * (0.5 * e * e + pen);
  }
  return J;
}

std::string control_hash(const BoundaryControl& c) {
  std::string buf(reinterpret_cast<const char*>(c.a.data()), c.a.size() * sizeof(double));
  buf.append(reinterpret_cast<const char*>(c.b.data()), c.b.size() * sizeof(double));
  return sha256_hex(buf);
}

TrackingProblem::TrackingProblem(StateProblem state, CostParams params)
    : state_(std::move(state)), params_(std::move(params)) {
  validate(params_);
  if (static_cast<int>(params_.y_d.size()) != state_.time.slices())
    throw std::invalid_argument("target needs nt+1 slices");
}

StateProblem TrackingProblem::with(const BoundaryControl& c) const {
  StateProblem s = state_;
  s.controls = c;
  return s;
}

std::shared_ptr<const StateTrajectory> TrackingProblem::trajectory(const BoundaryControl& c) {
  const std::string key = control_hash(c);
  if (key != traj_key_ || !traj_) {
    traj_ = std::make_shared<const StateTrajectory>(solve_state(with(c)));
    traj_key_ = key;
  }
  return traj_;
}

double TrackingProblem::cost(const BoundaryControl& c) {
  return evaluate_cost(grid(), time(), c, *trajectory(c), params_);
}

Gradient TrackingProblem::gradient(const BoundaryControl& c) {
  const std::string key = control_hash(c);
  if (key == grad_key_ && grad_.state) return grad_;
  Gradient gr;
  gr.state = trajectory(c);
  gr.J = evaluate_cost(grid(), time(), c, *gr.state, params_);

  AdjointProblem ap{with(c), gr.state, {}};
  ap.U.reserve(time().slices());
  for (int n = 0; n < time().slices(); ++n) ap.U.push_back(gr.state->y[n] - params_.y_d[n]);
  const AdjointTrajectory adj = solve_adjoint(ap);

  gr.a = adj.G_normal + params_.lambda1 * c.a;
  gr.b = adj.G_tangent + params_.lambda2 * c.b;
  if (corrupt_adjoint) gr.b = -gr.b + 0.1 * BoundarySeries::Ones(gr.b.rows(), gr.b.cols());
  // slice 0 carries no weight in the cost; its gradient is zero
  gr.a.col(0).setZero();
  gr.b.col(0).setZero();
  gr.a = remove_boundary_mean(grid(), gr.a);
  grad_ = gr;
  grad_key_ = key;
  return gr;
}

Gradient cost_gradient(TrackingProblem& problem, const BoundaryControl& controls) {
  return problem.gradient(controls);
}

double control_inner(const Grid& g, const TimeGrid& time, const BoundarySeries& a1, const BoundarySeries& b1,
                     const BoundarySeries& a2, const BoundarySeries& b2) {
  return boundary_time_inner(g, time, a1, a2) + boundary_time_inner(g, time, b1, b2);
}

FdEstimate fd_gradient_oracle(const TrackingProblem& problem, const BoundaryControl& c, const BoundarySeries& f,
                              const BoundarySeries& g, const std::vector<double>& eps, int workers,
                              const double* reference) {
  FdEstimate out;
  out.eps = eps;
  const int ne = static_cast<int>(eps.size());
  // J at c +- e d and c +- (e/2) d
  std::vector<double> J(4 * ne, 0.0);
  parallel_for(4 * ne, workers, [&](int k) {
    const int i = k / 4, which = k % 4;
    const double h = (which < 2 ? eps[i] : 0.5 * eps[i]) * (which % 2 == 0 ? 1.0 : -1.0);
    StateProblem s = problem.state();
    s.controls = c;
    s.controls.a += h * f;
    s.controls.b += h * g;
    J[k] = evaluate_cost(s.grid, s.time, s.controls, solve_state(s), problem.params());
  });
  for (int i = 0; i < ne; ++i) {
    const double d1 = (J[4 * i] - J[4 * i + 1]) / (2.0 * eps[i]);
    const double d2 = (J[4 * i + 2] - J[4 * i + 3]) / eps[i];
    out.central.push_back(d1);
    out.richardson.push_back((4.0 * d2 - d1) / 3.0);
  }
  if (ne == 0) return out;
  int best = ne / 2;
  if (reference) {
    for (int i = 0; i < ne; ++i)
      if (std::abs(out.richardson[i] - *reference) < std::abs(out.richardson[best] - *reference)) best = i;
  }
  out.best = out.richardson[best];
  out.best_eps = eps[best];
  return out;
}

namespace {

// mean removal and the radial factor, reported separately
BoundaryControl project_impl(const Grid& g, const TimeGrid& time, const BoundaryControl& c, bool* scaled) {
  BoundaryControl r = c;
  r.a = remove_boundary_mean(g, c.a);
  const double h = hp_norm(g, time, r);
  if (scaled) *scaled = false;
  if (h > c.radius) {
    const double s = c.radius / h;
    r.a *= s;
    r.b *= s;
    if (scaled) *scaled = true;
  }
  return r;
}

}  // namespace

BoundaryControl project_admissible(const Grid& g, const TimeGrid& time, const BoundaryControl& c) {
  return project_impl(g, time, c, nullptr);
}

bool is_admissible(const Grid& g, const TimeGrid& time, const BoundaryControl& c, double mean_tol, double norm_tol) {
  for (int n = 0; n < c.a.cols(); ++n)
    if (std::abs(integrate_boundary(g, c.a.col(n))) > mean_tol) return false;
  return hp_norm(g, time, c) <= c.radius * (1.0 + norm_tol);
}

BoundaryControl random_control(const Grid& g, const TimeGrid& time, std::uint64_t seed, double norm, double p,
                               double radius, int modes) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const int nb = g.num_boundary();
  const double L = g.perimeter(), pi = std::numbers::pi;
  BoundaryControl c = zero_control(g, time, p, radius);
  for (BoundarySeries* s : {&c.a, &c.b}) {
    for (int k = 1; k <= modes; ++k)
      for (int j = 0; j < 2; ++j) {
        const double cc = U(rng) / k, ss = U(rng) / k;
        for (int n = 0; n < time.slices(); ++n) {
          const double tt = std::sin((j + 0.5) * pi * time.t(n) / time.T);
          for (int q = 0; q < nb; ++q) {
            const double th = 2.0 * pi * k * g.boundary[q].s / L;
            (*s)(q, n) += tt * (cc * std::cos(th) + ss * std::sin(th));
          }
        }
      }
  }
  c.a = remove_boundary_mean(g, c.a);
  const double h = hp_norm(g, time, c);
  if (h > 0.0) {
    c.a *= norm / h;
    c.b *= norm / h;
  }
  return c;
}

OptimalityResidual optimality_residual(const Grid& g, const TimeGrid& time, const BoundaryControl& c,
                                       const Gradient& grad, int probe_count, std::uint64_t seed) {
  OptimalityResidual r;
  BoundaryControl step = c;
  step.a -= grad.a;
  step.b -= grad.b;
  const BoundaryControl pc = project_admissible(g, time, step);
  r.projection = hp_norm(g, time, c.a - pc.a, c.b - pc.b, c.p_exponent);
  double worst = 0.0;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < probe_count; ++k) {
    const BoundaryControl q = random_control(g, time, rng(), c.radius * U(rng), c.p_exponent, c.radius);
    const double v = control_inner(g, time, grad.a, grad.b, q.a - c.a, q.b - c.b);
    worst = std::min(worst, v);
  }
  r.probe = -worst;
  return r;
}

OptimizationReport optimize(TrackingProblem& problem, const BoundaryControl& start, const OptimizeOptions& o) {
  using clock = std::chrono::steady_clock;
  auto secs = [](clock::time_point a, clock::time_point b) { return std::chrono::duration<double>(b - a).count(); };
  const auto t_begin = clock::now();
  const Grid& g = problem.grid();
  const TimeGrid& time = problem.time();
  OptimizationReport rep;

  auto state_cost = [&](const BoundaryControl& c) {
    const auto t0 = clock::now();
    const double J = problem.cost(c);
    rep.time_state += secs(t0, clock::now());
    return J;
  };
  auto grad_at = [&](const BoundaryControl& c) {
    state_cost(c);
    const auto t0 = clock::now();
    Gradient G = problem.gradient(c);
    rep.time_adjoint += secs(t0, clock::now());
    return G;
  };
  auto norm = [&](const BoundarySeries& a, const BoundarySeries& b) {
    return std::sqrt(std::max(0.0, control_inner(g, time, a, b, a, b)));
  };

  bool scaled = false;
  BoundaryControl c = project_impl(g, time, start, &scaled);
  if (o.on_iterate) o.on_iterate(c);
  Gradient G = grad_at(c);
  double J = G.J;
  double res = optimality_residual(g, time, c, G, o.probes, o.seed).total();
  rep.initial_residual = res;
  rep.history.push_back({0, J, norm(G.a, G.b), res, 0.0, 0, scaled, 0.0});
  double s = o.initial_step;
  rep.status = "max_iters";

  for (int k = 1; k <= o.max_iters + 1; ++k) {
    if (res <= o.tol || (o.rtol > 0.0 && res <= o.rtol * rep.initial_residual)) {
      rep.converged = true;
      rep.status = "converged";
      break;
    }
    if (k > o.max_iters) break;
    bool accepted = false, stalled = false;
    BoundaryControl trial;
    double Jt = 0.0, gd = 0.0, dn = 0.0;
    int bt = 0;
    for (; bt <= o.max_backtracks; ++bt) {
      BoundaryControl raw = c;
      raw.a -= s * G.a;
      raw.b -= s * G.b;
      trial = project_impl(g, time, raw, &scaled);
      const BoundarySeries da = trial.a - c.a, db = trial.b - c.b;
      dn = norm(da, db);
      if (dn == 0.0) {
        stalled = true;
        break;
      }
      gd = control_inner(g, time, G.a, G.b, da, db);
      Jt = state_cost(trial);
      if (Jt <= J + o.c1 * gd && Jt <= J) {
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    if (stalled) {
      rep.status = "stalled";
      break;
    }
    if (!accepted) {
      rep.line_search_failure = true;
      rep.status = "line_search_failure";
      break;
    }
    Gradient Gn = grad_at(trial);
    const BoundarySeries da = trial.a - c.a, db = trial.b - c.b;
    const double sy = control_inner(g, time, da, db, Gn.a - G.a, Gn.b - G.b);
    const double taylor = std::abs(Jt - J - gd) / dn;
    const double step_taken = s;
    s = sy > 0.0 ? dn * dn / sy : 2.0 * s;
    c = trial;
    if (o.on_iterate) o.on_iterate(c);
    G = Gn;
    J = Jt;
    res = optimality_residual(g, time, c, G, o.probes, o.seed + k).total();
    rep.history.push_back({k, J, norm(G.a, G.b), res, step_taken, bt, scaled, taylor});
  }
  rep.controls = c;
  rep.final_residual = res;
  rep.time_total = secs(t_begin, clock::now());
  return rep;
}

std::string report_json(const OptimizationReport& r) {
  nlohmann::ordered_json j;
  j["status"] = r.status;
  j["converged"] = r.converged;
  j["line_search_failure"] = r.line_search_failure;
  j["iterations"] = static_cast<int>(r.history.size()) - 1;
  j["initial_residual"] = r.initial_residual;
  j["final_residual"] = r.final_residual;
  j["initial_J"] = r.history.empty() ? 0.0 : r.history.front().J;
  j["final_J"] = r.history.empty() ? 0.0 : r.history.back().J;
  auto h = nlohmann::ordered_json::array();
  for (const auto& it : r.history)
    h.push_back({{"iter", it.iter},
                 {"J", it.J},
                 {"grad_norm", it.grad_norm},
                 {"residual", it.residual},
                 {"step", it.step},
                 {"backtracks", it.backtracks},
                 {"projected", it.projected},
                 {"taylor_remainder", it.taylor_remainder}});
  j["history"] = h;
  j["controls_hash"] = control_hash(r.controls);
  return j.dump(2) + "\n";
}

std::string history_csv(const OptimizationReport& r) {
  std::string s = "iter,J,grad_norm,residual,step\n";
  for (const auto& it : r.history)
    s += std::to_string(it.iter) + "," + fmt(it.J) + "," + fmt(it.grad_norm) + "," + fmt(it.residual) + "," +
         fmt(it.step) + "\n";
  return s;
}

}  // namespace slip
