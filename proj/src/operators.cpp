#include "slip/operators.hpp"

#include "slip/fields.hpp"

#include <stdexcept>

namespace slip {

namespace {

using Trip = Eigen::Triplet<double>;

SpMat from_triplets(int rows, int cols, const std::vector<Trip>& t) {
  SpMat m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SpMat diag(const Eigen::VectorXd& d) {
  SpMat m(d.size(), d.size());
  m.reserve(Eigen::VectorXi::Constant(d.size(), 1));
  for (int k = 0; k < d.size(); ++k) m.insert(k, k) = d[k];
  m.makeCompressed();
  return m;
}

double ccw_factor(const WallVertex& w) {
  const Eigen::Vector2d ccw = w.wall == Wall::Bottom  ? Eigen::Vector2d(1, 0)
                              : w.wall == Wall::Right ? Eigen::Vector2d(0, 1)
                              : w.wall == Wall::Top   ? Eigen::Vector2d(-1, 0)
                                                      : Eigen::Vector2d(0, -1);
  return ccw.dot(w.tau);
}

}  // namespace

DiscreteOperators build_operators(const Grid& g, double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("viscosity must be positive");
  DiscreteOperators op;
  op.grid = g;
  op.nu = nu;
  const int nx = g.nx, ny = g.ny, nf = g.num_faces(), nc = g.num_cells(), nb = g.num_boundary();
  auto U = [&](int i, int j) { return g.u_index(i, j); };
  auto V = [&](int i, int j) { return g.v_index(i, j); };

  std::vector<Trip> tb, t11, t22;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int c = g.cell_index(i, j);
      tb.emplace_back(c, U(i + 1, j), g.hy);
      tb.emplace_back(c, U(i, j), -g.hy);
      tb.emplace_back(c, V(i, j + 1), g.hx);
      tb.emplace_back(c, V(i, j), -g.hx);
      t11.emplace_back(c, U(i + 1, j), 1.0 / g.hx);
      t11.emplace_back(c, U(i, j), -1.0 / g.hx);
      t22.emplace_back(c, V(i, j + 1), 1.0 / g.hy);
      t22.emplace_back(c, V(i, j), -1.0 / g.hy);
    }
  op.B = from_triplets(nc, nf, tb);
  op.D11 = from_triplets(nc, nf, t11);
  op.D22 = from_triplets(nc, nf, t22);

  std::vector<Trip> t12;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const int r = g.vertex_index(i, j);
      const int jl = j == 0 ? 0 : (j == ny ? ny - 2 : j - 1);
      const int il = i == 0 ? 0 : (i == nx ? nx - 2 : i - 1);
      t12.emplace_back(r, U(i, jl + 1), 0.5 / g.hy);
      t12.emplace_back(r, U(i, jl), -0.5 / g.hy);
      t12.emplace_back(r, V(il + 1, j), 0.5 / g.hx);
      t12.emplace_back(r, V(il, j), -0.5 / g.hx);
    }
  op.D12 = from_triplets(g.num_vertices(), nf, t12);

  const int nw = g.num_wall_vertices();
  std::vector<Trip> tt, tp;
  op.vertex_len.resize(nw);
  for (int m = 0; m < nw; ++m) {
    const WallVertex& w = g.wall_vertices[m];
    const double s = ccw_factor(w);
    switch (w.wall) {
      case Wall::Bottom:
        tt.emplace_back(m, U(w.i, 0), 1.5 * s);
        tt.emplace_back(m, U(w.i, 1), -0.5 * s);
        break;
      case Wall::Top:
        tt.emplace_back(m, U(w.i, ny - 1), -1.5 * s);
        tt.emplace_back(m, U(w.i, ny - 2), 0.5 * s);
        break;
      case Wall::Right:
        tt.emplace_back(m, V(nx - 1, w.j), 1.5 * s);
        tt.emplace_back(m, V(nx - 2, w.j), -0.5 * s);
        break;
      case Wall::Left:
        tt.emplace_back(m, V(0, w.j), -1.5 * s);
        tt.emplace_back(m, V(1, w.j), 0.5 * s);
        break;
    }
    tp.emplace_back(m, w.node_a, 0.5);
    tp.emplace_back(m, w.node_b, 0.5);
    op.vertex_len[m] = w.length;
  }
  op.T = from_triplets(nw, nf, tt);
  op.Pb = from_triplets(nw, nb, tp);

  std::vector<char> on_wall(nf, 0);
  std::vector<Trip> tsb;
  Eigen::VectorXd sign(nb);
  for (int k = 0; k < nb; ++k) {
    on_wall[g.boundary[k].face] = 1;
    tsb.emplace_back(k, g.boundary[k].face, 1.0);
    sign[k] = g.boundary[k].sign;
  }
  std::vector<Trip> tsi;
  for (int f = 0; f < nf; ++f)
    if (!on_wall[f]) {
      tsi.emplace_back(static_cast<int>(op.interior.size()), f, 1.0);
      op.interior.push_back(f);
    }
  op.SI = from_triplets(op.num_interior(), nf, tsi);
  op.SB = from_triplets(nb, nf, tsb);
  op.N = diag(sign);

  op.mass = face_weights(g);
  op.cell_w = Eigen::VectorXd::Constant(nc, g.hx * g.hy);
  op.vertex_w = vertex_weights(g);

  const SpMat Wc = diag(op.cell_w), Wv = diag(op.vertex_w);
  op.Kvisc = 2.0 * nu *
             (SpMat(op.D11.transpose() * Wc * op.D11) + SpMat(op.D22.transpose() * Wc * op.D22) +
              2.0 * SpMat(op.D12.transpose() * Wv * op.D12));

  // skew-symmetric advection stencil
  auto face = [&](int row, int f0, int f1, double c, int n0, double a0, int n1, double a1, int cnt,
                  bool wall) {
    op.cv_faces.push_back(CvFace{row, {f0, f1}, {c, c}, {n0, n1}, {a0, a1}, cnt, wall});
  };
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i) {
      const int r = U(i, j);
      face(r, U(i, j), U(i + 1, j), 0.5 * g.hy, U(i + 1, j), 1.0, 0, 0.0, 1, i + 1 == nx);
      face(r, U(i - 1, j), U(i, j), -0.5 * g.hy, U(i - 1, j), 1.0, 0, 0.0, 1, i - 1 == 0);
      if (j + 1 < ny)
        face(r, V(i - 1, j + 1), V(i, j + 1), 0.5 * g.hx, U(i, j + 1), 1.0, 0, 0.0, 1, false);
      else
        face(r, V(i - 1, ny), V(i, ny), 0.5 * g.hx, U(i, ny - 1), 1.5, U(i, ny - 2), -0.5, 2, true);
      if (j > 0)
        face(r, V(i - 1, j), V(i, j), -0.5 * g.hx, U(i, j - 1), 1.0, 0, 0.0, 1, false);
      else
        face(r, V(i - 1, 0), V(i, 0), -0.5 * g.hx, U(i, 0), 1.5, U(i, 1), -0.5, 2, true);
    }
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int r = V(i, j);
      face(r, V(i, j), V(i, j + 1), 0.5 * g.hx, V(i, j + 1), 1.0, 0, 0.0, 1, j + 1 == ny);
      face(r, V(i, j - 1), V(i, j), -0.5 * g.hx, V(i, j - 1), 1.0, 0, 0.0, 1, j - 1 == 0);
      if (i + 1 < nx)
        face(r, U(i + 1, j - 1), U(i + 1, j), 0.5 * g.hy, V(i + 1, j), 1.0, 0, 0.0, 1, false);
      else
        face(r, U(nx, j - 1), U(nx, j), 0.5 * g.hy, V(nx - 1, j), 1.5, V(nx - 2, j), -0.5, 2, true);
      if (i > 0)
        face(r, U(i, j - 1), U(i, j), -0.5 * g.hy, V(i - 1, j), 1.0, 0, 0.0, 1, false);
      else
        face(r, U(0, j - 1), U(0, j), -0.5 * g.hy, V(0, j), 1.5, V(1, j), -0.5, 2, true);
    }
  return op;
}

SpMat DiscreteOperators::viscous(const Eigen::Ref<const Eigen::VectorXd>& alpha) const {
  if (alpha.size() != grid.num_boundary()) throw std::invalid_argument("viscous: alpha size mismatch");
  const Eigen::VectorXd av = Pb * alpha;
  return Kvisc + SpMat(T.transpose() * diag(vertex_len.cwiseProduct(av)) * T);
}

SpMat DiscreteOperators::advection(const Eigen::Ref<const Eigen::VectorXd>& w) const {
  std::vector<Trip> t;
  t.reserve(cv_faces.size() * 2);
  for (const CvFace& f : cv_faces) {
    const double F = f.flux_coef[0] * w[f.flux_idx[0]] + f.flux_coef[1] * w[f.flux_idx[1]];
    for (int q = 0; q < f.nb_count; ++q) t.emplace_back(f.row, f.nb_idx[q], 0.5 * F * f.nb_coef[q]);
  }
  return from_triplets(grid.num_faces(), grid.num_faces(), t);
}

SpMat DiscreteOperators::advection_w(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  std::vector<Trip> t;
  t.reserve(cv_faces.size() * 2);
  for (const CvFace& f : cv_faces) {
    double nbv = 0.0;
    for (int q = 0; q < f.nb_count; ++q) nbv += f.nb_coef[q] * x[f.nb_idx[q]];
    for (int q = 0; q < 2; ++q) t.emplace_back(f.row, f.flux_idx[q], 0.5 * f.flux_coef[q] * nbv);
  }
  return from_triplets(grid.num_faces(), grid.num_faces(), t);
}

Eigen::VectorXd DiscreteOperators::work(const Eigen::Ref<const Eigen::VectorXd>& b) const {
  return T.transpose() * (vertex_len.cwiseProduct(Pb * b));
}

Eigen::VectorXd DiscreteOperators::assemble(const Eigen::Ref<const Eigen::VectorXd>& xi,
                                            const Eigen::Ref<const Eigen::VectorXd>& a) const {
  return SI.transpose() * xi + SB.transpose() * (N * a);
}

}  // namespace slip
