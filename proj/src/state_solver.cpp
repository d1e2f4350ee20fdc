#include "slip/state_solver.hpp"

#include "slip/errors.hpp"
#include "slip/io.hpp"
#include "slip/lifting.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace slip {

namespace {

void check_shapes(const StateProblem& pb) {
  const Grid& g = pb.grid;
  const int nb = g.num_boundary(), ns = pb.time.slices();
  if (pb.y0.u.rows() != g.nx + 1 || pb.y0.u.cols() != g.ny || pb.y0.v.rows() != g.nx || pb.y0.v.cols() != g.ny + 1)
    throw std::invalid_argument("initial velocity does not match the grid");
  if (pb.controls.a.rows() != nb || pb.controls.a.cols() != ns || pb.controls.b.rows() != nb ||
      pb.controls.b.cols() != ns)
    throw std::invalid_argument("controls must be (boundary nodes) x (nt+1)");
  if (pb.friction.alpha.rows() != nb || pb.friction.alpha.cols() != ns)
    throw std::invalid_argument("friction must be (boundary nodes) x (nt+1)");
  if (!pb.y0.all_finite() || !pb.controls.a.allFinite() || !pb.controls.b.allFinite())
    throw std::invalid_argument("non-finite problem data");
  if (!(pb.nu > 0.0)) throw std::invalid_argument("viscosity must be positive");
  pb.friction.validate();
}

}  // namespace

void validate(const StateProblem& pb, double tol) {
  check_shapes(pb);
  const double div = divergence(pb.grid, pb.y0).cwiseAbs().maxCoeff();
  if (div > tol) throw std::invalid_argument("initial velocity is not divergence free (max |div| = " + fmt_sci(div) + ")");
  const double mismatch = (normal_trace(pb.grid, pb.y0) - pb.controls.a.col(0)).cwiseAbs().maxCoeff();
  if (mismatch > tol)
    throw std::invalid_argument("normal trace of the initial velocity differs from a(0) by " + fmt_sci(mismatch));
  for (int n = 0; n < pb.controls.a.cols(); ++n) {
    try {
      check_flux(pb.grid, pb.controls.a.col(n));
    } catch (const IncompatibleFlux& e) {
      throw IncompatibleFlux("slice " + std::to_string(n) + ": " + e.what());
    }
  }
}

StepSystem::StepSystem(const DiscreteOperators& op, const Eigen::Ref<const Eigen::VectorXd>& w,
                       const Eigen::Ref<const Eigen::VectorXd>& alpha, double dt) {
  if (!w.allFinite()) throw SolverDivergence("advecting field is not finite");
  const int nI = op.num_interior(), nc = op.grid.num_cells(), n = nI + nc + 1;
  K_ = op.viscous(alpha);
  CK_ = op.advection(w) + K_;
  const SpMat Q = op.SI * CK_ * op.SI.transpose();
  const SpMat BI = op.B * op.SI.transpose();
  const Eigen::VectorXd mI = op.SI * op.mass;

  std::vector<Eigen::Triplet<double>> t;
  t.reserve(Q.nonZeros() + 2 * BI.nonZeros() + nI + 2 * nc);
  for (int k = 0; k < Q.outerSize(); ++k)
    for (SpMat::InnerIterator it(Q, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  for (int r = 0; r < nI; ++r) t.emplace_back(r, r, mI[r] / dt);
  for (int k = 0; k < BI.outerSize(); ++k)
    for (SpMat::InnerIterator it(BI, k); it; ++it) {
      t.emplace_back(it.col(), nI + it.row(), -it.value());
      t.emplace_back(nI + it.row(), it.col(), -it.value());
    }
  for (int c = 0; c < nc; ++c) {
    t.emplace_back(nI + c, n - 1, op.cell_w[c]);
    t.emplace_back(n - 1, nI + c, op.cell_w[c]);
  }
  A_.resize(n, n);
  A_.setFromTriplets(t.begin(), t.end());
  A_.makeCompressed();

  lu_ = std::make_shared<Eigen::SparseLU<SpMat>>();
  lu_->analyzePattern(A_);
  lu_->factorize(A_);
  if (lu_->info() != Eigen::Success) throw SolverDivergence("step matrix factorization failed");
}

namespace {

void check_residual(const SpMat& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double res = (A * x - b).norm();
  const double scale = b.norm();
  if (!x.allFinite() || res > 1e-9 * scale)
    throw SolverDivergence("step solve residual " + fmt_sci(res) + " (rhs norm " + fmt_sci(scale) + ")");
}

}  // namespace

Eigen::VectorXd StepSystem::solve(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd x = lu_->solve(rhs);
  check_residual(A_, x, rhs);
  return x;
}

Eigen::VectorXd StepSystem::solve_transpose(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd x = lu_->transpose().solve(rhs);
  check_residual(SpMat(A_.transpose()), x, rhs);
  return x;
}

StepResult stokes_slip_solve(const DiscreteOperators& op, const VelocityField& advecting,
                             const VelocityField& y_prev, const Eigen::Ref<const Eigen::VectorXd>& a_next,
                             const Eigen::Ref<const Eigen::VectorXd>& b_next,
                             const Eigen::Ref<const Eigen::VectorXd>& alpha_next, double dt,
                             const VelocityField* forcing) {
  const Grid& g = op.grid;
  check_flux(g, a_next);
  const int nI = op.num_interior(), nc = g.num_cells();
  const StepSystem sys(op, advecting.to_vector(), alpha_next, dt);

  const Eigen::VectorXd mI = op.SI * op.mass;
  const Eigen::VectorXd xb = op.SB.transpose() * (op.N * a_next);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sys.size());
  rhs.head(nI) = mI.cwiseProduct(op.SI * y_prev.to_vector()) / dt - op.SI * (sys.transport() * xb) +
                 op.SI * op.work(b_next);
  if (forcing) rhs.head(nI) += mI.cwiseProduct(op.SI * forcing->to_vector());
  rhs.segment(nI, nc) = op.B * xb;

  const Eigen::VectorXd sol = sys.solve(rhs);
  StepResult r;
  r.y = VelocityField::from_vector(g, op.assemble(sol.head(nI), a_next));
  r.p.q = Eigen::Map<const Eigen::MatrixXd>(sol.data() + nI, g.nx, g.ny);
  r.p.mean_zero = true;
  return r;
}

StateTrajectory solve_state(const StateProblem& pb) {
  check_shapes(pb);
  for (int n = 1; n < pb.controls.a.cols(); ++n) {
    try {
      check_flux(pb.grid, pb.controls.a.col(n));
    } catch (const IncompatibleFlux& e) {
      throw IncompatibleFlux("slice " + std::to_string(n) + ": " + e.what());
    }
  }
  const DiscreteOperators op = build_operators(pb.grid, pb.nu);
  StateTrajectory tr;
  tr.time = pb.time;
  tr.y.reserve(pb.time.slices());
  tr.p.reserve(pb.time.nt);
  tr.y.push_back(pb.y0);
  const VelocityField* f = pb.forcing ? &*pb.forcing : nullptr;
  for (int n = 0; n < pb.time.nt; ++n) {
    try {
      StepResult r = stokes_slip_solve(op, tr.y[n], tr.y[n], pb.controls.a.col(n + 1), pb.controls.b.col(n + 1),
                                       pb.friction.alpha.col(n + 1), pb.time.dt, f);
      tr.y.push_back(std::move(r.y));
      tr.p.push_back(std::move(r.p));
    } catch (const SolverDivergence& e) {
      throw SolverDivergence("step " + std::to_string(n + 1) + ": " + e.what());
    }
  }
  tr.content_hash = trajectory_hash(tr.y);
  return tr;
}

namespace {

// boundary flux term of the skew-symmetric advection, stencil by stencil
double advection_boundary_term(const Grid& g, const VelocityField& w, const VelocityField& x) {
  const int nx = g.nx, ny = g.ny;
  const double hx = g.hx, hy = g.hy;
  double s = 0.0;
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i) {
      const double xk = x.u(i, j);
      if (i == nx - 1) s += 0.5 * hy * (w.u(nx - 1, j) + w.u(nx, j)) * x.u(nx, j) * xk;
      if (i == 1) s -= 0.5 * hy * (w.u(0, j) + w.u(1, j)) * x.u(0, j) * xk;
      if (j == ny - 1)
        s += 0.5 * hx * (w.v(i - 1, ny) + w.v(i, ny)) * (1.5 * x.u(i, ny - 1) - 0.5 * x.u(i, ny - 2)) * xk;
      if (j == 0) s -= 0.5 * hx * (w.v(i - 1, 0) + w.v(i, 0)) * (1.5 * x.u(i, 0) - 0.5 * x.u(i, 1)) * xk;
    }
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double xk = x.v(i, j);
      if (j == ny - 1) s += 0.5 * hx * (w.v(i, ny - 1) + w.v(i, ny)) * x.v(i, ny) * xk;
      if (j == 1) s -= 0.5 * hx * (w.v(i, 0) + w.v(i, 1)) * x.v(i, 0) * xk;
      if (i == nx - 1)
        s += 0.5 * hy * (w.u(nx, j - 1) + w.u(nx, j)) * (1.5 * x.v(nx - 1, j) - 0.5 * x.v(nx - 2, j)) * xk;
      if (i == 0) s -= 0.5 * hy * (w.u(0, j - 1) + w.u(0, j)) * (1.5 * x.v(0, j) - 0.5 * x.v(1, j)) * xk;
    }
  return 0.5 * s;
}

int adjacent_cell(const Grid& g, const BoundaryNode& b) {
  switch (b.wall) {
    case Wall::Bottom: return g.cell_index(b.index, 0);
    case Wall::Right: return g.cell_index(g.nx - 1, b.index);
    case Wall::Top: return g.cell_index(b.index, g.ny - 1);
    case Wall::Left: return g.cell_index(0, b.index);
  }
  return 0;
}

}  // namespace

std::vector<EnergyBalance> energy_balance(const StateTrajectory& tr, const StateProblem& pb) {
  const Grid& g = pb.grid;
  const double dt = pb.time.dt;
  Eigen::VectorXd w = face_weights(g);
  Eigen::VectorXd interior = Eigen::VectorXd::Ones(g.num_faces());
  for (const auto& b : g.boundary) interior[b.face] = 0.0;
  const Eigen::VectorXd wv = vertex_weights(g);

  std::vector<EnergyBalance> out;
  for (int n = 0; n + 1 < static_cast<int>(tr.y.size()); ++n) {
    const VelocityField& x = tr.y[n + 1];
    const VelocityField& xo = tr.y[n];
    const Eigen::VectorXd xv = x.to_vector(), xov = xo.to_vector();
    EnergyBalance e;
    const Eigen::ArrayXd wi = (w.cwiseProduct(interior)).array();
    e.kinetic = (wi * (xv.array().square() - xov.array().square() + (xv - xov).array().square())).sum() / (2.0 * dt);
    const double sl = strain_l2(g, x);
    e.dissipation = 2.0 * pb.nu * sl * sl;

    const VelocityField xb = VelocityField::from_vector(g, xv.cwiseProduct(Eigen::VectorXd::Ones(g.num_faces()) - interior));
    const StrainField d = strain_tensor(g, x), db = strain_tensor(g, xb);
    const double dd = (d.d11.cwiseProduct(db.d11).sum() + d.d22.cwiseProduct(db.d22).sum()) * g.hx * g.hy +
                      2.0 * (wv.array() * (d.d12.reshaped().array() * db.d12.reshaped().array())).sum();
    e.cross = -2.0 * pb.nu * dd;

    const Eigen::VectorXd t = wall_tangential(g, x);
    const auto alpha = pb.friction.alpha.col(n + 1);
    const auto bb = pb.controls.b.col(n + 1);
    for (int m = 0; m < g.num_wall_vertices(); ++m) {
      const WallVertex& v = g.wall_vertices[m];
      const double av = 0.5 * (alpha[v.node_a] + alpha[v.node_b]);
      const double bv = 0.5 * (bb[v.node_a] + bb[v.node_b]);
      e.friction += v.length * av * t[m] * t[m];
      e.work += v.length * bv * t[m];
    }
    e.advection = advection_boundary_term(g, xo, x);
    const auto a = pb.controls.a.col(n + 1);
    for (int k = 0; k < g.num_boundary(); ++k)
      e.pressure += g.boundary[k].length * a[k] * tr.p[n].q.reshaped()[adjacent_cell(g, g.boundary[k])];
    if (pb.forcing) e.forcing = (wi * pb.forcing->to_vector().array() * xv.array()).sum();

    e.residual = e.kinetic + e.dissipation + e.friction + e.cross + e.advection + e.pressure - e.work - e.forcing;
    const double scale = std::max({std::abs(e.kinetic), std::abs(e.dissipation), std::abs(e.friction),
                                   std::abs(e.cross), std::abs(e.advection), std::abs(e.pressure),
                                   std::abs(e.work), std::abs(e.forcing)});
    e.relative = scale > 0.0 ? std::abs(e.residual) / scale : 0.0;
    out.push_back(e);
  }
  return out;
}

std::vector<double> energy_identity_residual(const StateTrajectory& tr, const StateProblem& pb) {
  std::vector<double> r;
  for (const auto& e : energy_balance(tr, pb)) r.push_back(e.relative);
  return r;
}

std::string problem_hash(const StateProblem& pb) {
  std::string buf;
  auto put = [&](const void* p, std::size_t n) { buf.append(static_cast<const char*>(p), n); };
  auto put_m = [&](const Eigen::MatrixXd& m) {
    const long long r = m.rows(), c = m.cols();
    put(&r, sizeof r);
    put(&c, sizeof c);
    put(m.data(), m.size() * sizeof(double));
  };
  const int dims[3] = {pb.grid.nx, pb.grid.ny, pb.time.nt};
  const double vals[4] = {pb.grid.Lx, pb.grid.Ly, pb.time.T, pb.nu};
  put(dims, sizeof dims);
  put(vals, sizeof vals);
  put_m(pb.y0.u);
  put_m(pb.y0.v);
  put_m(pb.controls.a);
  put_m(pb.controls.b);
  put_m(pb.friction.alpha);
  if (pb.forcing) {
    put_m(pb.forcing->u);
    put_m(pb.forcing->v);
  }
  return sha256_hex(buf);
}

StateProblem shear_problem(const Grid& g, const TimeGrid& time, double c1, double c2, double alpha, double nu) {
  StateProblem pb{g, time, VelocityField::zero(g), zero_control(g, time), FrictionField::constant(g, time, alpha), nu,
                  std::nullopt};
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) pb.y0.u(i, j) = c1 + c2 * g.u_point(i, j).y();
  for (int k = 0; k < g.num_boundary(); ++k) {
    const BoundaryNode& b = g.boundary[k];
    const double u = c1 + c2 * b.x.y();
    // y.n, and 2 nu D(y)n.tau + alpha y.tau with D12 = c2/2
    const double a = u * b.n.x();
    const double slip = nu * c2 * (b.n.x() * b.tau.y() + b.n.y() * b.tau.x()) + alpha * u * b.tau.x();
    pb.controls.a.row(k).setConstant(a);
    pb.controls.b.row(k).setConstant(slip);
  }
  return pb;
}

}  // namespace slip
