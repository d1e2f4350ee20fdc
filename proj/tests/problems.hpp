#pragma once

#include "slip/control_opt.hpp"

namespace slip::test {

inline StateProblem random_state(int n, int nt, std::uint64_t seed, double alpha = 0.5, double norm = 1.0) {
  const Grid g = build_grid(n, n, 1.0, 1.0);
  const TimeGrid t = build_time_grid(1.0, nt);
  StateProblem s{g, t, VelocityField::zero(g), zero_control(g, t), FrictionField::constant(g, t, alpha), 1.0,
                 std::nullopt};
  s.controls = random_control(g, t, seed, norm, 3.0, 10.0);
  return s;
}

inline BoundaryControl direction(const StateProblem& s, std::uint64_t seed, double norm = 1.0) {
  return random_control(s.grid, s.time, seed, norm, 3.0, 10.0);
}

}  // namespace slip::test
