#include "slip/fields.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace slip {

VelocityField VelocityField::zero(const Grid& grid) {
  return {Eigen::MatrixXd::Zero(grid.nx + 1, grid.ny), Eigen::MatrixXd::Zero(grid.nx, grid.ny + 1)};
}

VelocityField VelocityField::from_vector(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != grid.num_faces())
    throw std::invalid_argument("VelocityField: expected " + std::to_string(grid.num_faces()) + " entries");
  VelocityField y;
  y.u = Eigen::Map<const Eigen::MatrixXd>(x.data(), grid.nx + 1, grid.ny);
  y.v = Eigen::Map<const Eigen::MatrixXd>(x.data() + grid.num_u(), grid.nx, grid.ny + 1);
  return y;
}

Eigen::VectorXd VelocityField::to_vector() const {
  Eigen::VectorXd x(u.size() + v.size());
  x << u.reshaped(), v.reshaped();
  return x;
}

bool VelocityField::all_finite() const { return u.allFinite() && v.allFinite(); }

VelocityField& VelocityField::operator+=(const VelocityField& o) {
  u += o.u;
  v += o.v;
  return *this;
}
VelocityField& VelocityField::operator-=(const VelocityField& o) {
  u -= o.u;
  v -= o.v;
  return *this;
}
VelocityField& VelocityField::operator*=(double c) {
  u *= c;
  v *= c;
  return *this;
}
VelocityField operator+(VelocityField a, const VelocityField& b) { return a += b; }
VelocityField operator-(VelocityField a, const VelocityField& b) { return a -= b; }
VelocityField operator*(double c, VelocityField a) { return a *= c; }

FrictionField FrictionField::constant(const Grid& grid, const TimeGrid& time, double value,
                                      double alpha_min) {
  FrictionField f;
  f.alpha = BoundarySeries::Constant(grid.num_boundary(), time.slices(), value);
  f.alpha_min = alpha_min;
  f.validate();
  return f;
}

void FrictionField::validate() const {
  if (!alpha.allFinite() || (alpha.size() > 0 && alpha.minCoeff() < alpha_min))
    throw std::invalid_argument("friction coefficient below alpha_min = " + std::to_string(alpha_min));
}

Eigen::VectorXd face_weights(const Grid& g) {
  const double cell = g.hx * g.hy;
  Eigen::VectorXd w = Eigen::VectorXd::Constant(g.num_faces(), cell);
  for (const auto& b : g.boundary) w[b.face] = 0.5 * cell;
  return w;
}

Eigen::VectorXd vertex_weights(const Grid& g) {
  Eigen::VectorXd w(g.num_vertices());
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      double c = g.hx * g.hy;
      if (i == 0 || i == g.nx) c *= 0.5;
      if (j == 0 || j == g.ny) c *= 0.5;
      w[g.vertex_index(i, j)] = c;
    }
  return w;
}

Eigen::MatrixXd divergence(const Grid& g, const VelocityField& y) {
  Eigen::MatrixXd d(g.nx, g.ny);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      d(i, j) = (y.u(i + 1, j) - y.u(i, j)) / g.hx + (y.v(i, j + 1) - y.v(i, j)) / g.hy;
  return d;
}

namespace {

// du/dy and dv/dx at every vertex. Inside: centred. On walls the derivative
// across the wall is one-sided from the two nearest rows; along the wall it
// differences the normal face values. Corners therefore see wall faces only.
void vertex_gradients(const Grid& g, const VelocityField& y, Eigen::MatrixXd& uy, Eigen::MatrixXd& vx) {
  const int nx = g.nx, ny = g.ny;
  uy.resize(nx + 1, ny + 1);
  vx.resize(nx + 1, ny + 1);
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const int jl = j == 0 ? 0 : (j == ny ? ny - 2 : j - 1);
      const int il = i == 0 ? 0 : (i == nx ? nx - 2 : i - 1);
      uy(i, j) = (y.u(i, jl + 1) - y.u(i, jl)) / g.hy;
      vx(i, j) = (y.v(il + 1, j) - y.v(il, j)) / g.hx;
    }
}

}  // namespace

StrainField strain_tensor(const Grid& g, const VelocityField& y) {
  StrainField d;
  d.d11.resize(g.nx, g.ny);
  d.d22.resize(g.nx, g.ny);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      d.d11(i, j) = (y.u(i + 1, j) - y.u(i, j)) / g.hx;
      d.d22(i, j) = (y.v(i, j + 1) - y.v(i, j)) / g.hy;
    }
  Eigen::MatrixXd uy, vx;
  vertex_gradients(g, y, uy, vx);
  d.d12 = 0.5 * (uy + vx);
  return d;
}

double inner(const Grid& g, const VelocityField& y, const VelocityField& z) {
  const Eigen::VectorXd w = face_weights(g);
  return (w.array() * y.to_vector().array() * z.to_vector().array()).sum();
}

double l2_norm(const Grid& g, const VelocityField& y) { return std::sqrt(inner(g, y, y)); }

double l2_norm_cells(const Grid& g, const Eigen::Ref<const Eigen::MatrixXd>& f) {
  return std::sqrt(f.squaredNorm() * g.hx * g.hy);
}

double l2_norm_boundary(const Grid& g, const Eigen::Ref<const Eigen::VectorXd>& f) {
  return std::sqrt(integrate_boundary(g, f.cwiseAbs2()));
}

double h1_seminorm(const Grid& g, const VelocityField& y) {
  const StrainField d = strain_tensor(g, y);
  Eigen::MatrixXd uy, vx;
  vertex_gradients(g, y, uy, vx);
  const Eigen::VectorXd wv = vertex_weights(g);
  const double cells = (d.d11.squaredNorm() + d.d22.squaredNorm()) * g.hx * g.hy;
  const double verts = (wv.array() * (uy.reshaped().array().square() + vx.reshaped().array().square())).sum();
  return std::sqrt(cells + verts);
}

double strain_l2(const Grid& g, const VelocityField& y) {
  const StrainField d = strain_tensor(g, y);
  const Eigen::VectorXd wv = vertex_weights(g);
  const double cells = (d.d11.squaredNorm() + d.d22.squaredNorm()) * g.hx * g.hy;
  return std::sqrt(cells + 2.0 * (wv.array() * d.d12.reshaped().array().square()).sum());
}

BoundaryScalar normal_trace(const Grid& g, const VelocityField& y) {
  const Eigen::VectorXd x = y.to_vector();
  BoundaryScalar a(g.num_boundary());
  for (int k = 0; k < g.num_boundary(); ++k) a[k] = g.boundary[k].sign * x[g.boundary[k].face];
  return a;
}

Eigen::VectorXd wall_tangential(const Grid& g, const VelocityField& y) {
  const int nx = g.nx, ny = g.ny;
  Eigen::VectorXd t(g.num_wall_vertices());
  for (int m = 0; m < g.num_wall_vertices(); ++m) {
    const WallVertex& w = g.wall_vertices[m];
    double val = 0.0;
    switch (w.wall) {
      case Wall::Bottom: val = 0.5 * (3.0 * y.u(w.i, 0) - y.u(w.i, 1)); break;
      case Wall::Top: val = -0.5 * (3.0 * y.u(w.i, ny - 1) - y.u(w.i, ny - 2)); break;
      case Wall::Right: val = 0.5 * (3.0 * y.v(nx - 1, w.j) - y.v(nx - 2, w.j)); break;
      case Wall::Left: val = -0.5 * (3.0 * y.v(0, w.j) - y.v(1, w.j)); break;
    }
    // stored with the ccw orientation; flip if the loop was reversed
    const Eigen::Vector2d ccw = w.wall == Wall::Bottom  ? Eigen::Vector2d(1, 0)
                                : w.wall == Wall::Right ? Eigen::Vector2d(0, 1)
                                : w.wall == Wall::Top   ? Eigen::Vector2d(-1, 0)
                                                        : Eigen::Vector2d(0, -1);
    t[m] = ccw.dot(w.tau) * val;
  }
  return t;
}

BoundaryScalar tangential_trace(const Grid& g, const VelocityField& y) {
  const Eigen::VectorXd t = wall_tangential(g, y);
  BoundaryScalar sum = BoundaryScalar::Zero(g.num_boundary());
  Eigen::VectorXd cnt = Eigen::VectorXd::Zero(g.num_boundary());
  for (int m = 0; m < g.num_wall_vertices(); ++m) {
    const WallVertex& w = g.wall_vertices[m];
    sum[w.node_a] += t[m];
    sum[w.node_b] += t[m];
    cnt[w.node_a] += 1;
    cnt[w.node_b] += 1;
  }
  return sum.cwiseQuotient(cnt);
}

Eigen::Vector2d spatial_mean(const Grid& g, const VelocityField& y) {
  const Eigen::VectorXd w = face_weights(g);
  const Eigen::VectorXd x = y.to_vector();
  return {w.head(g.num_u()).dot(x.head(g.num_u())), w.tail(g.num_v()).dot(x.tail(g.num_v()))};
}

void impose_normal_trace(const Grid& g, VelocityField& y, const Eigen::Ref<const Eigen::VectorXd>& a) {
  if (a.size() != g.num_boundary()) throw std::invalid_argument("impose_normal_trace: size mismatch");
  for (int k = 0; k < g.num_boundary(); ++k) {
    const BoundaryNode& b = g.boundary[k];
    const double val = b.sign * a[k];
    if (b.face < g.num_u())
      y.u(b.face % (g.nx + 1), b.face / (g.nx + 1)) = val;
    else
      y.v((b.face - g.num_u()) % g.nx, (b.face - g.num_u()) / g.nx) = val;
  }
}

BoundarySeries zero_series(const Grid& g, const TimeGrid& time) {
  return BoundarySeries::Zero(g.num_boundary(), time.slices());
}

BoundaryControl zero_control(const Grid& g, const TimeGrid& time, double p_exponent, double radius) {
  return {zero_series(g, time), zero_series(g, time), p_exponent, radius};
}

namespace {

double loop_distance(const Grid& g, int k, int l) {
  const double d = std::abs(g.boundary[k].s - g.boundary[l].s);
  return std::min(d, g.perimeter() - d);
}

}  // namespace

double boundary_wsp_norm(const Grid& g, const Eigen::Ref<const Eigen::VectorXd>& f, double p) {
  const int nb = g.num_boundary();
  // order 1-1/p in one dimension: the kernel exponent 1 + s p equals p
  double semi = 0.0, lp = 0.0;
  for (int k = 0; k < nb; ++k) {
    const double lk = g.boundary[k].length;
    lp += lk * std::pow(std::abs(f[k]), p);
    for (int l = 0; l < nb; ++l) {
      if (l == k) continue;
      const double diff = std::abs(f[k] - f[l]);
      if (diff == 0.0) continue;
      semi += lk * g.boundary[l].length * std::pow(diff / loop_distance(g, k, l), p);
    }
  }
  return std::pow(semi, 1.0 / p) + std::pow(lp, 1.0 / p);
}

double boundary_hm12_norm(const Grid& g, const Eigen::Ref<const Eigen::VectorXd>& f) {
  const int nb = g.num_boundary();
  const double L = g.perimeter();
  double sum = 0.0;
  for (int j = -nb / 2; j <= nb / 2; ++j) {
    std::complex<double> c = 0.0;
    for (int k = 0; k < nb; ++k)
      c += g.boundary[k].length * f[k] * std::polar(1.0, -2.0 * std::numbers::pi * j * g.boundary[k].s / L);
    c /= L;
    sum += std::norm(c) / (1.0 + std::abs(j));
  }
  return std::sqrt(L * sum);
}

HpNormParts hp_norm_parts(const Grid& g, const TimeGrid& time, const BoundarySeries& a,
                          const BoundarySeries& b, double p) {
  if (a.cols() < 2) throw std::invalid_argument("hp_norm: need at least two time slices");
  if (!(p > 2.0)) throw std::invalid_argument("hp_norm: p must exceed 2");
  if (a.rows() != g.num_boundary() || b.rows() != g.num_boundary() || a.cols() != b.cols() ||
      a.cols() != time.slices())
    throw std::invalid_argument("hp_norm: shape mismatch");
  HpNormParts h;
  double s1 = 0.0, s2 = 0.0, s3 = 0.0;
  for (int n = 0; n < a.cols(); ++n) {
    const double w = time.weight(n);
    if (w > 0.0) {
      const double wsp = boundary_wsp_norm(g, a.col(n), p);
      s1 += w * wsp * wsp;
      s3 += w * integrate_boundary(g, b.col(n).cwiseAbs2());
    }
    if (n + 1 < a.cols()) {
      const Eigen::VectorXd dadt = (a.col(n + 1) - a.col(n)) / time.dt;
      const double hm = boundary_hm12_norm(g, dadt);
      s2 += time.dt * hm * hm;
    }
  }
  h.space = std::sqrt(s1);
  h.time = std::sqrt(s2);
  h.traction = std::sqrt(s3);
  return h;
}

double hp_norm(const Grid& g, const TimeGrid& time, const BoundarySeries& a, const BoundarySeries& b,
               double p) {
  return hp_norm_parts(g, time, a, b, p).total();
}

double hp_norm(const Grid& g, const TimeGrid& time, const BoundaryControl& c) {
  return hp_norm(g, time, c.a, c.b, c.p_exponent);
}

double boundary_time_inner(const Grid& g, const TimeGrid& time, const BoundarySeries& f,
                           const BoundarySeries& h) {
  double s = 0.0;
  for (int n = 1; n < f.cols(); ++n) s += time.weight(n) * integrate_boundary(g, f.col(n).cwiseProduct(h.col(n)));
  return s;
}

BoundarySeries remove_boundary_mean(const Grid& g, const BoundarySeries& a) {
  BoundarySeries r = a;
  const double L = g.perimeter();
  for (int n = 0; n < a.cols(); ++n) r.col(n).array() -= integrate_boundary(g, a.col(n)) / L;
  return r;
}

}  // namespace slip
