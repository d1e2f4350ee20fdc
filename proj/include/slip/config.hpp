// INI run configuration: parsing, validation, resolution into solver inputs.
#pragma once

#include "slip/control_opt.hpp"
#include "slip/verify.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace slip {

/// One term of a boundary data list: coef * basis_k(xi) * cos(tk pi t / T),
/// xi in [0,1] along the wall in loop order ("all": along the whole loop).
/// basis: const -> 1, sin -> sin(k pi xi), cos -> cos(k pi xi), poly -> xi^k.
struct BoundaryTerm {
  std::string wall;  // bottom | right | top | left | all
  std::string kind;  // const | sin | cos | poly
  double coef = 0.0;
  double k = 0.0;
  double tk = 0.0;
};

/// "bottom sin 0.5 1; top cos -0.5 2 1". Throws ConfigError.
std::vector<BoundaryTerm> parse_terms(const std::string& text);
BoundarySeries evaluate_terms(const Grid& grid, const TimeGrid& time, const std::vector<BoundaryTerm>& terms);

/// Boundary data source: a term list, "random", "shear" or "zero".
struct DataSpec {
  std::string mode = "zero";
  std::vector<BoundaryTerm> terms;
  std::string text = "0";
};

struct RunConfig {
  std::filesystem::path source;

  double Lx = 1.0, Ly = 1.0;
  int nx = 16, ny = 16;
  double T = 1.0;
  int nt = 32;

  double nu = 1.0;
  double alpha = 1.0;
  double alpha_wall[4] = {-1.0, -1.0, -1.0, -1.0};  // per-wall override when >= 0
  std::vector<BoundaryTerm> alpha_terms;
  std::string alpha_terms_text;
  double alpha_min = 1e-3;

  std::string initial = "zero";  // zero | shear | stream
  double shear_c1 = 0.0, shear_c2 = 1.0;
  double stream_amplitude = 0.5;

  DataSpec a, b;
  double random_norm = 0.5;
  double R = 10.0;
  double p = 3.0;
  double lambda1 = 0.0, lambda2 = 0.0;

  std::string target = "none";  // none | zero | uniform | state | file
  double target_u = 0.0, target_v = 0.0;
  DataSpec target_a, target_b;
  double target_norm = 1.0;
  std::uint64_t target_seed = 42;
  std::filesystem::path target_path;

  OptimizeOptions opt;

  int gc_directions = 10;
  std::vector<double> gc_eps{1e-2, 1e-3, 1e-4};

  int verify_samples = 5;
  double verify_amplitude = 0.5;
  bool verify_refinement = true;

  std::filesystem::path out_dir = "out";
  int snapshot_every = 1;
  std::uint64_t seed = 1;
  int workers = 1;
  bool corrupt_adjoint = false;
};

/// Throws ConfigError for unreadable files, unknown keys and out-of-range values.
RunConfig parse_config(const std::filesystem::path& path);
void validate(const RunConfig& c);

/// Canonical INI text of every resolved value, and its hash.
std::string resolved_config(const RunConfig& c);
std::string config_hash(const RunConfig& c);

Grid config_grid(const RunConfig& c);
TimeGrid config_time(const RunConfig& c);
/// State data with the configured initial controls; slice 0 of a is the normal trace of y0.
StateProblem build_state_problem(const RunConfig& c);
/// Cost with the configured target.
CostParams build_cost(const RunConfig& c, const StateProblem& problem);
SuiteConfig build_suite(const RunConfig& c);

/// Velocity slices of a trajectory directory written with cadence 1.
std::vector<VelocityField> read_trajectory(const std::filesystem::path& dir, const Grid& grid, int slices);

}  // namespace slip
