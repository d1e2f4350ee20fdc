// Measured constants of the functional inequalities and a-priori estimates.
#pragma once

#include "slip/control_opt.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace slip {

struct InequalityReport {
  std::string name;
  int sample_count = 0;
  int trivial_count = 0;  // zero left-hand side, counted as passes
  double min = 0.0, median = 0.0, max = 0.0;
  double tolerance = 0.0;  // stability factor, or absolute bound for identities
  bool pass = false;
  std::string config_hash;
  std::string detail;
};

/// Summary of ratio samples: finite and max/median within `factor` (max/min for `spread`).
InequalityReport summarize(const std::string& name, const std::vector<double>& ratios, int trivial, double factor,
                           bool spread = false);

// --- sample fields ---------------------------------------------------------

/// Band-limited trigonometric velocity (no constraints), fixed continuum object per seed.
VelocityField trig_field(const Grid& grid, std::uint64_t seed, int modes = 3, double amplitude = 1.0);
/// Discretely divergence-free with zero normal trace, from a stream function vanishing on walls.
VelocityField stream_field(const Grid& grid, std::uint64_t seed, int modes = 3, double amplitude = 1.0);
/// Velocity from a vertex stream function given pointwise.
template <class Psi>
VelocityField from_stream(const Grid& g, Psi psi) {
  Eigen::MatrixXd s(g.nx + 1, g.ny + 1);
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      const bool wall = i == 0 || j == 0 || i == g.nx || j == g.ny;
      s(i, j) = wall ? 0.0 : psi(i * g.hx, j * g.hy);
    }
  VelocityField y = VelocityField::zero(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) y.u(i, j) = (s(i, j + 1) - s(i, j)) / g.hy;
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) y.v(i, j) = -(s(i + 1, j) - s(i, j)) / g.hx;
  return y;
}

// --- functional inequalities ------------------------------------------------

double lq_norm(const Grid& grid, const VelocityField& y, double q);
/// y minus its domain average
VelocityField remove_mean(const Grid& grid, const VelocityField& y);
/// L2 norm over the wall loop of the full vector (normal and tangential traces)
double boundary_l2(const Grid& grid, const VelocityField& y);

InequalityReport check_gns(const Grid& grid, const std::vector<VelocityField>& samples, double q);
InequalityReport check_trace(const Grid& grid, const std::vector<VelocityField>& samples);
/// Throws std::invalid_argument for samples outside the discrete solenoidal space.
InequalityReport check_korn(const Grid& grid, const std::vector<VelocityField>& samples);
InequalityReport check_mean_zero(const Grid& grid, const std::vector<VelocityField>& samples);

// --- suite -----------------------------------------------------------------

struct SuiteConfig {
  int nx = 16, ny = 16, nt = 32;
  double Lx = 1.0, Ly = 1.0, T = 1.0;
  double nu = 1.0, alpha = 1.0, p = 3.0;
  int samples = 5;
  std::uint64_t seed = 1;
  int workers = 1;
  double amplitude = 0.5;
  bool refinement = true;  // repeat the functional inequalities at twice the resolution
};

std::string suite_hash(const SuiteConfig& c);

struct SuiteResult {
  std::vector<InequalityReport> reports;
  double seconds = 0.0;  // not serialized
  bool all_pass() const;
};

SuiteResult run_estimate_suite(const SuiteConfig& config);

/// Functional inequalities only, at one resolution.
std::vector<InequalityReport> functional_inequalities(const Grid& grid, int samples, std::uint64_t seed,
                                                      double amplitude, const std::string& tag);

// individual estimate items, also used by the acceptance suite
InequalityReport energy_bound_check(const SuiteConfig& c);
InequalityReport lipschitz_check(const SuiteConfig& c, const std::vector<double>& magnitudes);
InequalityReport linearized_estimate_check(const SuiteConfig& c);
InequalityReport adjoint_estimate_check(const SuiteConfig& c);
InequalityReport gateaux_check(const SuiteConfig& c);
InequalityReport duality_check(const SuiteConfig& c);
InequalityReport energy_identity_check(const SuiteConfig& c);

StateProblem suite_problem(const SuiteConfig& c, std::uint64_t seed);

std::string suite_json(const SuiteResult& r);
std::string suite_table(const SuiteResult& r);

}  // namespace slip
