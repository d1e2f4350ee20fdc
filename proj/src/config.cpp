#include "slip/config.hpp"

#include "slip/errors.hpp"
#include "slip/io.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace slip {

namespace pt = boost::property_tree;

namespace {

const char* const kWalls[] = {"bottom", "right", "top", "left"};

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

long to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x)) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return static_cast<long>(x);
}

bool to_bool(const std::string& key, std::string v) {
  boost::algorithm::to_lower(v);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

DataSpec parse_spec(const std::string& key, const std::string& v) {
  DataSpec s;
  s.text = boost::algorithm::trim_copy(v);
  if (s.text == "random" || s.text == "shear" || s.text == "zero" || s.text == "0") {
    s.mode = s.text == "0" ? "zero" : s.text;
    return s;
  }
  s.mode = "terms";
  try {
    s.terms = parse_terms(s.text);
  } catch (const ConfigError& e) {
    throw ConfigError(key + ": " + e.what());
  }
  return s;
}

// flat "section.key" -> value, rejecting duplicates and nesting
std::map<std::string, std::string> flatten(const pt::ptree& tree) {
  std::map<std::string, std::string> out;
  for (const auto& [sec, body] : tree) {
    if (body.empty()) throw ConfigError("key '" + sec + "' outside of a section");
    for (const auto& [key, val] : body) {
      const std::string k = sec + "." + key;
      if (!out.emplace(k, boost::algorithm::trim_copy(val.data())).second) throw ConfigError("duplicate key " + k);
    }
  }
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt(v[i]);
  return s;
}

std::string terms_text(const std::vector<BoundaryTerm>& terms) {
  std::string s;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& t = terms[i];
    s += (i ? "; " : "") + t.wall + " " + t.kind + " " + fmt(t.coef) + " " + fmt(t.k) + " " + fmt(t.tk);
  }
  return s;
}

std::string spec_text(const DataSpec& s) { return s.mode == "terms" ? terms_text(s.terms) : s.mode; }

BoundarySeries resolve_spec(const RunConfig& c, const DataSpec& s, const StateProblem& shear, bool normal,
                            std::uint64_t seed, double norm) {
  const Grid g = config_grid(c);
  const TimeGrid t = config_time(c);
  if (s.mode == "zero") return zero_series(g, t);
  if (s.mode == "shear") return normal ? shear.controls.a : shear.controls.b;
  if (s.mode == "random") {
    const BoundaryControl r = random_control(g, t, seed, norm, c.p, c.R);
    return normal ? r.a : r.b;
  }
  return evaluate_terms(g, t, s.terms);
}

}  // namespace

std::vector<BoundaryTerm> parse_terms(const std::string& text) {
  std::vector<BoundaryTerm> out;
  std::vector<std::string> parts;
  boost::algorithm::split(parts, text, boost::is_any_of(";"));
  for (auto part : parts) {
    boost::algorithm::trim(part);
    if (part.empty()) continue;
    std::vector<std::string> f;
    boost::algorithm::split(f, part, boost::is_space(), boost::token_compress_on);
    if (f.size() < 3 || f.size() > 5) throw ConfigError("term '" + part + "': expected wall kind coef [k [tk]]");
    BoundaryTerm t;
    t.wall = f[0];
    t.kind = f[1];
    const std::set<std::string> walls{"bottom", "right", "top", "left", "all"};
    const std::set<std::string> kinds{"const", "sin", "cos", "poly"};
    if (!walls.count(t.wall)) throw ConfigError("term '" + part + "': unknown wall '" + t.wall + "'");
    if (!kinds.count(t.kind)) throw ConfigError("term '" + part + "': unknown kind '" + t.kind + "'");
    t.coef = to_double("term coefficient", f[2]);
    if (f.size() > 3) t.k = to_double("term order", f[3]);
    if (f.size() > 4) t.tk = to_double("term time frequency", f[4]);
    if (t.kind == "poly" && t.k < 0.0) throw ConfigError("term '" + part + "': negative polynomial degree");
    out.push_back(t);
  }
  return out;
}

BoundarySeries evaluate_terms(const Grid& g, const TimeGrid& time, const std::vector<BoundaryTerm>& terms) {
  BoundarySeries f = zero_series(g, time);
  const double pi = std::numbers::pi;
  const double start[4] = {0.0, g.Lx, g.Lx + g.Ly, 2.0 * g.Lx + g.Ly};
  const double len[4] = {g.Lx, g.Ly, g.Lx, g.Ly};
  for (const auto& t : terms)
    for (int k = 0; k < g.num_boundary(); ++k) {
      const BoundaryNode& b = g.boundary[k];
      const int w = static_cast<int>(b.wall);
      double xi;
      if (t.wall == "all")
        xi = b.s / g.perimeter();
      else if (t.wall == kWalls[w])
        xi = (b.s - start[w]) / len[w];
      else
        continue;
      double basis = 1.0;
      if (t.kind == "sin") basis = std::sin(t.k * pi * xi);
      if (t.kind == "cos") basis = std::cos(t.k * pi * xi);
      if (t.kind == "poly") basis = std::pow(xi, t.k);
      for (int n = 0; n < time.slices(); ++n) f(k, n) += t.coef * basis * std::cos(t.tk * pi * time.t(n) / time.T);
    }
  return f;
}

RunConfig parse_config(const std::filesystem::path& path) {
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("cannot read config: " + std::string(e.what()));
  }
  auto kv = flatten(tree);
  RunConfig c;
  c.source = path;
  std::set<std::string> used;
  auto get = [&](const std::string& k) -> const std::string* {
    auto it = kv.find(k);
    if (it == kv.end()) return nullptr;
    used.insert(k);
    return &it->second;
  };
  auto num = [&](const std::string& k, double& x) {
    if (auto v = get(k)) x = to_double(k, *v);
  };
  auto integer = [&](const std::string& k, int& x) {
    if (auto v = get(k)) x = static_cast<int>(to_int(k, *v));
  };
  auto seed = [&](const std::string& k, std::uint64_t& x) {
    if (auto v = get(k)) {
      const long s = to_int(k, *v);
      if (s < 0) throw ConfigError(k + ": seed must be non-negative");
      x = static_cast<std::uint64_t>(s);
    }
  };
  auto word = [&](const std::string& k, std::string& x) {
    if (auto v = get(k)) x = *v;
  };

  num("domain.Lx", c.Lx);
  num("domain.Ly", c.Ly);
  integer("domain.nx", c.nx);
  integer("domain.ny", c.ny);
  num("time.T", c.T);
  integer("time.nt", c.nt);

  num("physics.nu", c.nu);
  num("physics.alpha", c.alpha);
  for (int w = 0; w < 4; ++w) num(std::string("physics.alpha_") + kWalls[w], c.alpha_wall[w]);
  if (auto v = get("physics.alpha_terms")) {
    c.alpha_terms = parse_terms(*v);
    c.alpha_terms_text = terms_text(c.alpha_terms);
  }
  num("physics.alpha_min", c.alpha_min);

  word("initial.kind", c.initial);
  num("initial.c1", c.shear_c1);
  num("initial.c2", c.shear_c2);
  num("initial.amplitude", c.stream_amplitude);

  if (auto v = get("control.a")) c.a = parse_spec("control.a", *v);
  if (auto v = get("control.b")) c.b = parse_spec("control.b", *v);
  num("control.random_norm", c.random_norm);
  num("control.R", c.R);
  num("control.p", c.p);
  num("control.lambda1", c.lambda1);
  num("control.lambda2", c.lambda2);

  word("target.kind", c.target);
  num("target.u", c.target_u);
  num("target.v", c.target_v);
  if (auto v = get("target.a")) c.target_a = parse_spec("target.a", *v);
  if (auto v = get("target.b")) c.target_b = parse_spec("target.b", *v);
  num("target.random_norm", c.target_norm);
  seed("target.seed", c.target_seed);
  if (auto v = get("target.path")) {
    c.target_path = *v;
    if (c.target_path.is_relative()) c.target_path = path.parent_path() / c.target_path;
  }

  num("optimizer.tol", c.opt.tol);
  num("optimizer.rtol", c.opt.rtol);
  integer("optimizer.max_iters", c.opt.max_iters);
  num("optimizer.c1", c.opt.c1);
  integer("optimizer.max_backtracks", c.opt.max_backtracks);
  integer("optimizer.probes", c.opt.probes);
  num("optimizer.initial_step", c.opt.initial_step);

  integer("gradcheck.directions", c.gc_directions);
  if (auto v = get("gradcheck.eps")) {
    std::vector<std::string> f;
    const std::string s = boost::algorithm::trim_copy(*v);
    boost::algorithm::split(f, s, boost::is_any_of(" ,"), boost::token_compress_on);
    c.gc_eps.clear();
    for (const auto& x : f) c.gc_eps.push_back(to_double("gradcheck.eps", x));
  }

  integer("verify.samples", c.verify_samples);
  num("verify.amplitude", c.verify_amplitude);
  if (auto v = get("verify.refinement")) c.verify_refinement = to_bool("verify.refinement", *v);

  if (auto v = get("output.dir")) {
    c.out_dir = *v;
    if (c.out_dir.is_relative()) c.out_dir = path.parent_path() / c.out_dir;
  }
  integer("output.snapshot_every", c.snapshot_every);
  seed("run.seed", c.seed);
  if (auto v = get("debug.corrupt_adjoint")) c.corrupt_adjoint = to_bool("debug.corrupt_adjoint", *v);

  for (const auto& [k, v] : kv)
    if (!used.count(k)) throw ConfigError("unknown key " + k);
  validate(c);
  return c;
}

void validate(const RunConfig& c) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(c.Lx > 0.0 && c.Ly > 0.0, "domain: Lx and Ly must be positive");
  require(c.nx >= 2 && c.ny >= 2, "domain: nx and ny must be at least 2");
  require(c.T > 0.0, "time: T must be positive");
  require(c.nt >= 1, "time: nt must be at least 1");
  require(c.nu > 0.0, "physics: nu must be positive");
  require(c.alpha_min > 0.0, "physics: alpha_min must be positive");
  require(c.alpha >= c.alpha_min, "physics: alpha below alpha_min");
  for (double a : c.alpha_wall) require(a < 0.0 || a >= c.alpha_min, "physics: per-wall alpha below alpha_min");
  const std::set<std::string> initial{"zero", "shear", "stream"};
  require(initial.count(c.initial) > 0, "initial.kind must be zero, shear or stream");
  require(c.R > 0.0, "control: R must be positive");
  require(c.p > 2.0, "control: p must exceed 2");
  require(c.lambda1 >= 0.0 && c.lambda2 >= 0.0, "control: lambda1 and lambda2 must be non-negative");
  require(c.random_norm >= 0.0 && c.target_norm >= 0.0, "random_norm must be non-negative");
  const std::set<std::string> targets{"none", "zero", "uniform", "state", "file"};
  require(targets.count(c.target) > 0, "target.kind must be none, zero, uniform, state or file");
  if (c.target == "file") {
    require(!c.target_path.empty(), "target.path is required for target.kind = file");
    require(std::filesystem::exists(c.target_path / "manifest.json"),
            "target.path: no trajectory manifest in " + c.target_path.string());
  }
  require(c.opt.tol >= 0.0 && c.opt.rtol >= 0.0, "optimizer: tolerances must be non-negative");
  require(c.opt.max_iters >= 0, "optimizer: max_iters must be non-negative");
  require(c.opt.c1 > 0.0 && c.opt.c1 < 1.0, "optimizer: c1 must lie in (0,1)");
  require(c.opt.max_backtracks >= 0 && c.opt.probes >= 0, "optimizer: counts must be non-negative");
  require(c.opt.initial_step > 0.0, "optimizer: initial_step must be positive");
  require(c.gc_directions >= 1, "gradcheck: directions must be positive");
  require(!c.gc_eps.empty(), "gradcheck: eps list is empty");
  for (double e : c.gc_eps) require(e > 0.0, "gradcheck: eps must be positive");
  require(c.verify_samples >= 1, "verify: samples must be positive");
  require(c.snapshot_every >= 1, "output: snapshot_every must be positive");
  require(c.workers >= 1, "workers must be positive");
}

std::string resolved_config(const RunConfig& c) {
  std::ostringstream os;
  os << "[domain]\nLx = " << fmt(c.Lx) << "\nLy = " << fmt(c.Ly) << "\nnx = " << c.nx << "\nny = " << c.ny << "\n\n";
  os << "[time]\nT = " << fmt(c.T) << "\nnt = " << c.nt << "\n\n";
  os << "[physics]\nnu = " << fmt(c.nu) << "\nalpha = " << fmt(c.alpha) << "\n";
  for (int w = 0; w < 4; ++w)
    if (c.alpha_wall[w] >= 0.0) os << "alpha_" << kWalls[w] << " = " << fmt(c.alpha_wall[w]) << "\n";
  if (!c.alpha_terms.empty()) os << "alpha_terms = " << c.alpha_terms_text << "\n";
  os << "alpha_min = " << fmt(c.alpha_min) << "\n\n";
  os << "[initial]\nkind = " << c.initial << "\nc1 = " << fmt(c.shear_c1) << "\nc2 = " << fmt(c.shear_c2)
     << "\namplitude = " << fmt(c.stream_amplitude) << "\n\n";
  os << "[control]\na = " << spec_text(c.a) << "\nb = " << spec_text(c.b) << "\nrandom_norm = " << fmt(c.random_norm)
     << "\nR = " << fmt(c.R) << "\np = " << fmt(c.p) << "\nlambda1 = " << fmt(c.lambda1)
     << "\nlambda2 = " << fmt(c.lambda2) << "\n\n";
  os << "[target]\nkind = " << c.target << "\nu = " << fmt(c.target_u) << "\nv = " << fmt(c.target_v)
     << "\na = " << spec_text(c.target_a) << "\nb = " << spec_text(c.target_b)
     << "\nrandom_norm = " << fmt(c.target_norm) << "\nseed = " << c.target_seed << "\n";
  if (!c.target_path.empty()) os << "path = " << c.target_path.string() << "\n";
  os << "\n[optimizer]\ntol = " << fmt(c.opt.tol) << "\nrtol = " << fmt(c.opt.rtol)
     << "\nmax_iters = " << c.opt.max_iters << "\nc1 = " << fmt(c.opt.c1)
     << "\nmax_backtracks = " << c.opt.max_backtracks << "\nprobes = " << c.opt.probes
     << "\ninitial_step = " << fmt(c.opt.initial_step) << "\n\n";
  os << "[gradcheck]\ndirections = " << c.gc_directions << "\neps = " << join(c.gc_eps) << "\n\n";
  os << "[verify]\nsamples = " << c.verify_samples << "\namplitude = " << fmt(c.verify_amplitude)
     << "\nrefinement = " << (c.verify_refinement ? "true" : "false") << "\n\n";
  os << "[output]\nsnapshot_every = " << c.snapshot_every << "\n\n";
  os << "[run]\nseed = " << c.seed << "\n";
  if (c.corrupt_adjoint) os << "\n[debug]\ncorrupt_adjoint = true\n";
  return os.str();
}

std::string config_hash(const RunConfig& c) { return sha256_hex(resolved_config(c)); }

Grid config_grid(const RunConfig& c) { return build_grid(c.nx, c.ny, c.Lx, c.Ly); }
TimeGrid config_time(const RunConfig& c) { return build_time_grid(c.T, c.nt); }

StateProblem build_state_problem(const RunConfig& c) {
  const Grid g = config_grid(c);
  const TimeGrid t = config_time(c);
  const StateProblem shear = shear_problem(g, t, c.shear_c1, c.shear_c2, c.alpha, c.nu);
  StateProblem s{g, t, VelocityField::zero(g), zero_control(g, t, c.p, c.R),
                 FrictionField::constant(g, t, c.alpha, c.alpha_min), c.nu, std::nullopt};
  for (int k = 0; k < g.num_boundary(); ++k) {
    const double w = c.alpha_wall[static_cast<int>(g.boundary[k].wall)];
    if (w >= 0.0) s.friction.alpha.row(k).setConstant(w);
  }
  if (!c.alpha_terms.empty()) s.friction.alpha += evaluate_terms(g, t, c.alpha_terms);
  try {
    s.friction.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("physics: ") + e.what());
  }

  if (c.initial == "shear") s.y0 = shear.y0;
  if (c.initial == "stream") s.y0 = stream_field(g, c.seed, 3, c.stream_amplitude);
  s.controls.a = resolve_spec(c, c.a, shear, true, c.seed, c.random_norm);
  s.controls.b = resolve_spec(c, c.b, shear, false, c.seed, c.random_norm);
  s.controls.a.col(0) = normal_trace(g, s.y0);
  return s;
}

CostParams build_cost(const RunConfig& c, const StateProblem& s) {
  CostParams P;
  P.lambda1 = c.lambda1;
  P.lambda2 = c.lambda2;
  P.radius = c.R;
  P.p_exponent = c.p;
  const Grid& g = s.grid;
  const int slices = s.time.slices();
  if (c.target == "none" || c.target == "zero") {
    P.y_d.assign(slices, VelocityField::zero(g));
  } else if (c.target == "uniform") {
    VelocityField u = VelocityField::zero(g);
    u.u.setConstant(c.target_u);
    u.v.setConstant(c.target_v);
    P.y_d.assign(slices, u);
  } else if (c.target == "state") {
    const StateProblem shear = shear_problem(g, s.time, c.shear_c1, c.shear_c2, c.alpha, c.nu);
    StateProblem q = s;
    q.controls.a = resolve_spec(c, c.target_a, shear, true, c.target_seed, c.target_norm);
    q.controls.b = resolve_spec(c, c.target_b, shear, false, c.target_seed, c.target_norm);
    q.controls.a.col(0) = normal_trace(g, s.y0);
    validate(q);
    P.y_d = solve_state(q).y;
  } else {
    P.y_d = read_trajectory(c.target_path, g, slices);
  }
  return P;
}

SuiteConfig build_suite(const RunConfig& c) {
  SuiteConfig s;
  s.nx = c.nx;
  s.ny = c.ny;
  s.nt = c.nt;
  s.Lx = c.Lx;
  s.Ly = c.Ly;
  s.T = c.T;
  s.nu = c.nu;
  s.alpha = c.alpha;
  s.p = c.p;
  s.samples = c.verify_samples;
  s.seed = c.seed;
  s.workers = c.workers;
  s.amplitude = c.verify_amplitude;
  s.refinement = c.verify_refinement;
  return s;
}

std::vector<VelocityField> read_trajectory(const std::filesystem::path& dir, const Grid& g, int slices) {
  std::vector<VelocityField> y;
  for (int n = 0; n < slices; ++n) {
    char name[32];
    std::snprintf(name, sizeof name, "y_%05d.bin", n);
    const auto f = dir / name;
    if (!std::filesystem::exists(f)) throw ConfigError("target trajectory is missing " + f.string());
    const Snapshot s = read_snapshot(f);
    if (s.nx != g.nx || s.ny != g.ny) throw ConfigError("target trajectory grid does not match the domain");
    y.push_back(snapshot_velocity(g, s));
  }
  return y;
}

}  // namespace slip
