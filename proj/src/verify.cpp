#include "slip/verify.hpp"

#include "slip/errors.hpp"
#include "slip/io.hpp"
#include "slip/parallel.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

namespace slip {

InequalityReport summarize(const std::string& name, const std::vector<double>& ratios, int trivial, double factor,
                           bool spread) {
  InequalityReport r;
  r.name = name;
  r.sample_count = static_cast<int>(ratios.size()) + trivial;
  r.trivial_count = trivial;
  r.tolerance = factor;
  bool finite = true;
  for (double x : ratios) finite = finite && std::isfinite(x);
  if (ratios.empty()) {
    r.pass = finite;
    return r;
  }
  std::vector<double> s = ratios;
  std::sort(s.begin(), s.end());
  r.min = s.front();
  r.max = s.back();
  r.median = s[s.size() / 2];
  const double ref = spread ? r.min : r.median;
  r.pass = finite && (r.max <= factor * ref || r.max == 0.0);
  return r;
}

VelocityField trig_field(const Grid& g, std::uint64_t seed, int modes, double amplitude) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const double pi = std::numbers::pi;
  struct Mode {
    int k, l;
    double c, phase;
  };
  std::vector<Mode> mu, mv;
  for (auto* m : {&mu, &mv})
    for (int k = 0; k <= modes; ++k)
      for (int l = 0; l <= modes; ++l) {
        const double c = U(rng) / (1.0 + k * k + l * l);
        m->push_back({k, l, c, pi * U(rng)});
      }
  auto eval = [&](const std::vector<Mode>& m, const Eigen::Vector2d& x) {
    double s = 0.0;
    for (const auto& q : m) s += q.c * std::cos(pi * (q.k * x.x() / g.Lx + q.l * x.y() / g.Ly) + q.phase);
    return amplitude * s;
  };
  VelocityField y = VelocityField::zero(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) y.u(i, j) = eval(mu, g.u_point(i, j));
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) y.v(i, j) = eval(mv, g.v_point(i, j));
  return y;
}

VelocityField stream_field(const Grid& g, std::uint64_t seed, int modes, double amplitude) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const double pi = std::numbers::pi;
  Eigen::MatrixXd c(modes, modes);
  for (int k = 0; k < modes; ++k)
    for (int l = 0; l < modes; ++l) c(k, l) = U(rng) / ((k + 1) * (l + 1));
  return from_stream(g, [&](double x, double y) {
    double s = 0.0;
    for (int k = 0; k < modes; ++k)
      for (int l = 0; l < modes; ++l) s += c(k, l) * std::sin((k + 1) * pi * x / g.Lx) * std::sin((l + 1) * pi * y / g.Ly);
    return amplitude * s / pi;
  });
}

double lq_norm(const Grid& g, const VelocityField& y, double q) {
  const Eigen::VectorXd w = face_weights(g);
  return std::pow((w.array() * y.to_vector().array().abs().pow(q)).sum(), 1.0 / q);
}

VelocityField remove_mean(const Grid& g, const VelocityField& y) {
  const Eigen::Vector2d m = spatial_mean(g, y) / g.area();
  VelocityField r = y;
  r.u.array() -= m.x();
  r.v.array() -= m.y();
  return r;
}

double boundary_l2(const Grid& g, const VelocityField& y) {
  const Eigen::VectorXd n = normal_trace(g, y), t = tangential_trace(g, y);
  return std::sqrt(integrate_boundary(g, n.cwiseAbs2() + t.cwiseAbs2()));
}

namespace {

// LHS / RHS with 0/0 counted as trivial
// a vanishing right-hand side forces the left one to vanish; roundoff
// relative to the sample size counts as zero
void push_ratio(double lhs, double rhs, double scale, std::vector<double>& ratios, int& trivial) {
  if (rhs <= 1e-300 && lhs <= 1e-12 * scale + 1e-300) {
    ++trivial;
    return;
  }
  ratios.push_back(lhs / rhs);
}

}  // namespace

InequalityReport check_gns(const Grid& g, const std::vector<VelocityField>& samples, double q) {
  std::vector<double> ratios;
  int trivial = 0;
  for (const auto& v : samples) {
    const double lhs = lq_norm(g, remove_mean(g, v), q);
    const double rhs = std::pow(l2_norm(g, v), 2.0 / q) * std::pow(h1_seminorm(g, v), 1.0 - 2.0 / q);
    push_ratio(lhs, rhs, l2_norm(g, v), ratios, trivial);
  }
  return summarize("gns_q" + std::to_string(static_cast<int>(q)), ratios, trivial, 5.0);
}

InequalityReport check_trace(const Grid& g, const std::vector<VelocityField>& samples) {
  std::vector<double> ratios;
  int trivial = 0;
  for (const auto& v : samples) {
    const double lhs = boundary_l2(g, remove_mean(g, v));
    const double rhs = std::sqrt(l2_norm(g, v) * h1_seminorm(g, v));
    push_ratio(lhs, rhs, l2_norm(g, v), ratios, trivial);
  }
  return summarize("trace", ratios, trivial, 5.0);
}

InequalityReport check_korn(const Grid& g, const std::vector<VelocityField>& samples) {
  std::vector<double> ratios;
  int trivial = 0;
  for (const auto& v : samples) {
    const double div = divergence(g, v).cwiseAbs().maxCoeff();
    const double flux = normal_trace(g, v).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, v.to_vector().cwiseAbs().maxCoeff());
    if (div > 1e-9 * scale / std::min(g.hx, g.hy) || flux > 1e-12 * scale)
      throw std::invalid_argument("korn sample is not solenoidal with zero normal trace");
    const double l2 = l2_norm(g, v), h1 = h1_seminorm(g, v);
    push_ratio(std::sqrt(l2 * l2 + h1 * h1), strain_l2(g, v), l2, ratios, trivial);
  }
  return summarize("korn", ratios, trivial, 5.0);
}

InequalityReport check_mean_zero(const Grid& g, const std::vector<VelocityField>& samples) {
  InequalityReport r;
  r.name = "mean_zero";
  r.tolerance = 1e-10;
  r.sample_count = static_cast<int>(samples.size());
  std::vector<double> m;
  for (const auto& v : samples) m.push_back(spatial_mean(g, v).norm());
  if (!m.empty()) {
    std::sort(m.begin(), m.end());
    r.min = m.front();
    r.median = m[m.size() / 2];
    r.max = m.back();
  }
  r.pass = r.max <= r.tolerance;
  return r;
}

std::vector<InequalityReport> functional_inequalities(const Grid& g, int samples, std::uint64_t seed,
                                                      double amplitude, const std::string& tag) {
  std::vector<VelocityField> trig, stream;
  for (int k = 0; k < samples; ++k) {
    trig.push_back(trig_field(g, seed + 1000 + k, 3, amplitude));
    stream.push_back(stream_field(g, seed + 2000 + k, 3, amplitude));
  }
  std::vector<InequalityReport> out;
  for (double q : {3.0, 4.0, 6.0}) out.push_back(check_gns(g, trig, q));
  out.push_back(check_trace(g, trig));
  out.push_back(check_korn(g, stream));
  out.push_back(check_mean_zero(g, stream));
  for (auto& r : out) r.name += tag;
  return out;
}

std::string suite_hash(const SuiteConfig& c) {
  std::ostringstream os;
  os << c.nx << ' ' << c.ny << ' ' << c.nt << ' ' << fmt(c.Lx) << ' ' << fmt(c.Ly) << ' ' << fmt(c.T) << ' '
     << fmt(c.nu) << ' ' << fmt(c.alpha) << ' ' << fmt(c.p) << ' ' << c.samples << ' ' << c.seed << ' '
     << fmt(c.amplitude) << ' ' << c.refinement;
  return sha256_hex(os.str());
}

StateProblem suite_problem(const SuiteConfig& c, std::uint64_t seed) {
  const Grid g = build_grid(c.nx, c.ny, c.Lx, c.Ly);
  const TimeGrid t = build_time_grid(c.T, c.nt);
  StateProblem s{g, t, stream_field(g, seed, 3, c.amplitude), zero_control(g, t, c.p, 10.0),
                 FrictionField::constant(g, t, c.alpha), c.nu, std::nullopt};
  s.controls = random_control(g, t, seed + 7, 2.0 * c.amplitude, c.p, 10.0);
  return s;
}

namespace {

double state_energy(const StateProblem& s, const StateTrajectory& tr) { return linearized_energy(s, tr.y); }

// smallest C >= 0 with E <= C (Y0 + H^2 + 1) exp(C H^2)
double bound_constant(double E, double Y0, double H) {
  if (E <= 0.0) return 0.0;
  auto rhs = [&](double C) { return C * (Y0 + H * H + 1.0) * std::exp(C * H * H); };
  double lo = 0.0, hi = 1.0;
  while (rhs(hi) < E && hi < 1e12) hi *= 2.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (rhs(mid) < E ? lo : hi) = mid;
  }
  return hi;
}

std::vector<VelocityField> source_field(const StateProblem& s, std::uint64_t seed, double amplitude) {
  // solenoidal: a gradient part would be absorbed by the adjoint pressure
  const VelocityField base = stream_field(s.grid, seed, 3, amplitude);
  const VelocityField other = stream_field(s.grid, seed + 1, 3, amplitude);
  std::vector<VelocityField> U;
  for (int n = 0; n < s.time.slices(); ++n) {
    const double th = std::numbers::pi * s.time.t(n) / s.time.T;
    U.push_back(std::cos(th) * base + std::sin(th) * other);
  }
  return U;
}

InequalityReport tagged(InequalityReport r, const SuiteConfig& c, const std::string& detail) {
  r.config_hash = suite_hash(c);
  r.detail = detail;
  return r;
}

}  // namespace

InequalityReport energy_bound_check(const SuiteConfig& c) {
  std::vector<double> C(c.samples, 0.0);
  std::vector<char> monotone(c.samples, 1), trivial(c.samples, 0);
  parallel_for(c.samples, c.workers, [&](int k) {
    const StateProblem s = suite_problem(c, c.seed + 100 * k);
    const StateTrajectory tr = solve_state(s);
    const double E = state_energy(s, tr);
    const double y0 = l2_norm(s.grid, s.y0);
    const double H = hp_norm(s.grid, s.time, s.controls);
    if (E == 0.0) trivial[k] = 1;
    C[k] = bound_constant(E, y0 * y0, H);
    double prev = -1.0;
    for (double sigma : {0.5, 1.0, 2.0}) {
      StateProblem q = s;
      q.y0 = VelocityField::zero(s.grid);
      q.controls.a *= sigma;
      q.controls.b *= sigma;
      const double e = state_energy(q, solve_state(q));
      if (e < prev) monotone[k] = 0;
      prev = e;
    }
  });
  std::vector<double> ratios;
  int nt = 0;
  bool mono = true;
  for (int k = 0; k < c.samples; ++k) {
    mono = mono && monotone[k];
    if (trivial[k])
      ++nt;
    else
      ratios.push_back(C[k]);
  }
  InequalityReport r = summarize("energy_bound", ratios, nt, 1e300);
  r.pass = r.pass && mono;
  return tagged(r, c, mono ? "energy monotone under control scaling {0.5,1,2}" : "energy NOT monotone under scaling");
}

InequalityReport lipschitz_check(const SuiteConfig& c, const std::vector<double>& magnitudes) {
  const int nm = static_cast<int>(magnitudes.size());
  std::vector<double> ratio(c.samples * nm, 0.0);
  parallel_for(c.samples, c.workers, [&](int k) {
    const StateProblem s = suite_problem(c, c.seed + 100 * k);
    const StateTrajectory y1 = solve_state(s);
    const BoundaryControl d = random_control(s.grid, s.time, c.seed + 100 * k + 31, 1.0, c.p, 10.0);
    for (int m = 0; m < nm; ++m) {
      StateProblem q = s;
      q.controls.a += magnitudes[m] * d.a;
      q.controls.b += magnitudes[m] * d.b;
      const StateTrajectory y2 = solve_state(q);
      double sup = 0.0;
      for (int n = 0; n < s.time.slices(); ++n) sup = std::max(sup, l2_norm(s.grid, y1.y[n] - y2.y[n]));
      ratio[k * nm + m] = sup / (magnitudes[m] * hp_norm(s.grid, s.time, d));
    }
  });
  bool stable = true;
  double worst = 1.0;
  for (int k = 0; k < c.samples; ++k) {
    const auto b = ratio.begin() + k * nm;
    const double lo = *std::min_element(b, b + nm), hi = *std::max_element(b, b + nm);
    if (lo > 0.0) worst = std::max(worst, hi / lo);
    stable = stable && std::isfinite(hi) && hi <= 2.0 * lo;
  }
  InequalityReport r = summarize("lipschitz", ratio, 0, 1e300);
  r.tolerance = 2.0;
  r.pass = r.pass && stable;
  return tagged(r, c, "worst per-sample spread across magnitudes " + fmt_sci(worst));
}

namespace {

// sup of the ratio over one ensemble, for two independent ensembles
InequalityReport ensemble_constant(const SuiteConfig& c, const std::string& name,
                                   const std::function<double(const StateProblem&,
                                                              std::shared_ptr<const StateTrajectory>, std::uint64_t)>& ratio_of) {
  const StateProblem s = suite_problem(c, c.seed);
  auto base = std::make_shared<const StateTrajectory>(solve_state(s));
  std::vector<double> ratio(2 * c.samples, 0.0);
  parallel_for(2 * c.samples, c.workers, [&](int k) { ratio[k] = ratio_of(s, base, c.seed + 500 + 7919 * k); });
  const double c1 = *std::max_element(ratio.begin(), ratio.begin() + c.samples);
  const double c2 = *std::max_element(ratio.begin() + c.samples, ratio.end());
  InequalityReport r = summarize(name, {c1, c2}, 0, 3.0, true);
  r.sample_count = 2 * c.samples;
  std::vector<double> all = ratio;
  std::sort(all.begin(), all.end());
  return tagged(r, c,
                "ensemble maxima " + fmt_sci(c1) + ", " + fmt_sci(c2) + "; single-sample ratios in [" +
                    fmt_sci(all.front()) + ", " + fmt_sci(all.back()) + "]");
}

}  // namespace

InequalityReport linearized_estimate_check(const SuiteConfig& c) {
  return ensemble_constant(c, "linearized_estimate", [&](const StateProblem& s, auto base, std::uint64_t seed) {
    const BoundaryControl d = random_control(s.grid, s.time, seed, 1.0, c.p, 10.0);
    const LinearizedTrajectory z = solve_linearized({s, base, d.a, d.b});
    const double h = hp_norm(s.grid, s.time, d);
    return linearized_energy(s, z.z) / (h * h);
  });
}

InequalityReport adjoint_estimate_check(const SuiteConfig& c) {
  return ensemble_constant(c, "adjoint_estimate", [&](const StateProblem& s, auto base, std::uint64_t seed) {
    const AdjointProblem ap{s, base, source_field(s, seed, 1.0)};
    return adjoint_energy_check(s, solve_adjoint(ap), ap.U);
  });
}

InequalityReport gateaux_check(const SuiteConfig& c) {
  const std::vector<double> eps{1e-1, 1e-2, 1e-3};
  std::vector<double> ratios;
  bool monotone = true;
  for (int k = 0; k < c.samples; ++k) {
    const StateProblem s = suite_problem(c, c.seed + 100 * k);
    auto base = std::make_shared<const StateTrajectory>(solve_state(s));
    const BoundaryControl d = random_control(s.grid, s.time, c.seed + 900 + k, 1.0, c.p, 10.0);
    const LinearizedProblem lp{s, base, d.a, d.b};
    const LinearizedTrajectory z = solve_linearized(lp);
    const std::vector<double> disc = gateaux_discrepancy(lp, z, eps, c.workers);
    for (std::size_t e = 0; e < eps.size(); ++e) {
      if (e > 0 && !(disc[e] < disc[e - 1])) monotone = false;
      ratios.push_back(disc[e] / eps[e]);
    }
  }
  // all zero when the base state does not react nonlinearly (null data)
  int trivial = 0;
  std::vector<double> nz;
  for (double r : ratios) (r == 0.0 ? ++trivial : (nz.push_back(r), 0));
  if (static_cast<int>(nz.size()) < static_cast<int>(ratios.size())) monotone = true;
  InequalityReport r = summarize("gateaux", nz, trivial, 3.0, true);
  r.pass = r.pass && monotone;
  return tagged(r, c, monotone ? "discrepancy decreasing in eps" : "discrepancy NOT decreasing in eps");
}

InequalityReport duality_check(const SuiteConfig& c) {
  std::vector<double> res(c.samples, 0.0);
  parallel_for(c.samples, c.workers, [&](int k) {
    const StateProblem s = suite_problem(c, c.seed + 100 * k);
    auto base = std::make_shared<const StateTrajectory>(solve_state(s));
    const BoundaryControl d = random_control(s.grid, s.time, c.seed + 300 + k, 1.0, c.p, 10.0);
    const LinearizedTrajectory z = solve_linearized({s, base, d.a, d.b});
    const VelocityField yd = trig_field(s.grid, c.seed + 400 + k, 2, c.amplitude);
    std::vector<VelocityField> U;
    for (const auto& y : base->y) U.push_back(y - yd);
    const AdjointTrajectory adj = solve_adjoint({s, base, U});
    res[k] = duality_residual(s.grid, s.time, z, adj, U, d.a, d.b);
  });
  InequalityReport r = summarize("duality", res, 0, 1e300);
  r.tolerance = 1e-9;
  r.pass = r.pass && r.max <= 1e-9;
  return tagged(r, c, "relative residual of the duality pairing");
}

InequalityReport energy_identity_check(const SuiteConfig& c) {
  std::vector<double> res(c.samples, 0.0);
  parallel_for(c.samples, c.workers, [&](int k) {
    const StateProblem s = suite_problem(c, c.seed + 100 * k);
    const StateTrajectory tr = solve_state(s);
    for (double x : energy_identity_residual(tr, s)) res[k] = std::max(res[k], x);
  });
  InequalityReport r = summarize("energy_identity", res, 0, 1e300);
  r.tolerance = 1e-8;
  r.pass = r.pass && r.max <= 1e-8;
  return tagged(r, c, "max per-step relative imbalance");
}

bool SuiteResult::all_pass() const {
  return std::all_of(reports.begin(), reports.end(), [](const InequalityReport& r) { return r.pass; });
}

SuiteResult run_estimate_suite(const SuiteConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteResult out;
  const std::string h = suite_hash(c);
  auto guarded = [&](const std::string& name, auto&& fn) {
    try {
      out.reports.push_back(fn());
    } catch (const std::exception& e) {
      InequalityReport r;
      r.name = name;
      r.pass = false;
      r.config_hash = h;
      r.detail = std::string("failed: ") + e.what();
      out.reports.push_back(r);
    }
  };

  const Grid g = build_grid(c.nx, c.ny, c.Lx, c.Ly);
  std::vector<InequalityReport> coarse, fine;
  guarded("functional_inequalities", [&] {
    coarse = functional_inequalities(g, c.samples, c.seed, c.amplitude, "");
    return coarse.back();
  });
  out.reports.pop_back();
  for (auto& r : coarse) {
    r.config_hash = h;
    out.reports.push_back(r);
  }
  if (c.refinement && !coarse.empty()) {
    const Grid g2 = build_grid(2 * c.nx, 2 * c.ny, c.Lx, c.Ly);
    fine = functional_inequalities(g2, c.samples, c.seed, c.amplitude, "_refined");
    for (std::size_t k = 0; k < fine.size(); ++k) {
      fine[k].config_hash = h;
      out.reports.push_back(fine[k]);
      if (coarse[k].name == "mean_zero") continue;
      InequalityReport d;
      d.name = "drift_" + coarse[k].name;
      d.sample_count = 1;
      d.tolerance = 0.5;
      d.config_hash = h;
      const double a = coarse[k].max, b = fine[k].max;
      d.max = d.min = d.median = a > 0.0 ? std::abs(b - a) / a : 0.0;
      d.pass = std::isfinite(d.max) && d.max < 0.5;
      d.detail = "relative change of the measured constant between resolutions";
      out.reports.push_back(d);
    }
  }
  guarded("energy_identity", [&] { return energy_identity_check(c); });
  guarded("energy_bound", [&] { return energy_bound_check(c); });
  guarded("lipschitz", [&] { return lipschitz_check(c, {1e-1, 1e-2, 1e-3}); });
  guarded("linearized_estimate", [&] { return linearized_estimate_check(c); });
  guarded("adjoint_estimate", [&] { return adjoint_estimate_check(c); });
  guarded("gateaux", [&] { return gateaux_check(c); });
  guarded("duality", [&] { return duality_check(c); });
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::string suite_json(const SuiteResult& r) {
  nlohmann::ordered_json j;
  j["all_pass"] = r.all_pass();
  auto arr = nlohmann::ordered_json::array();
  for (const auto& x : r.reports)
    arr.push_back({{"name", x.name},
                   {"sample_count", x.sample_count},
                   {"trivial_count", x.trivial_count},
                   {"min", x.min},
                   {"median", x.median},
                   {"max", x.max},
                   {"tolerance", x.tolerance},
                   {"pass", x.pass},
                   {"config_hash", x.config_hash},
                   {"detail", x.detail}});
  j["reports"] = arr;
  return j.dump(2) + "\n";
}

std::string suite_table(const SuiteResult& r) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-32s %7s %12s %12s %12s  %s\n", "check", "samples", "min", "median", "max",
                "result");
  os << line;
  for (const auto& x : r.reports) {
    std::snprintf(line, sizeof line, "%-32s %7d %12.4e %12.4e %12.4e  %s\n", x.name.c_str(), x.sample_count, x.min,
                  x.median, x.max, x.pass ? "pass" : "FAIL");
    os << line;
  }
  return os.str();
}

}  // namespace slip
