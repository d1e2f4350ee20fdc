#pragma once

#include <stdexcept>
#include <string>

namespace slip {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Boundary normal data with nonzero net flux.
struct IncompatibleFlux : Error {
  using Error::Error;
};

struct SolverDivergence : Error {
  using Error::Error;
};

struct BaseTrajectoryMissing : Error {
  using Error::Error;
};

/// Trajectories computed around different base states were combined.
struct MismatchedBase : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace slip
