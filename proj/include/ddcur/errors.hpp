#pragma once

#include <stdexcept>
#include <string>

namespace ddcur {

/// Vector or matrix shapes do not match what the operation expects.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Non-finite values where finite arithmetic is required.
struct NumericError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Goal outside the goal space or on a blocked cell.
struct InvalidGoalError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Action outside the environment's action space.
struct InvalidActionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// step() called after the episode already terminated.
struct EpisodeFinishedError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Episode violates its structural invariants.
struct InvalidEpisodeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Sampling from a buffer that holds no transitions.
struct EmptyBufferError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Training on an empty dataset / updating on an empty batch.
struct EmptyDatasetError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Class label outside the valid range.
struct LabelError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Requested bin discretization is infeasible, or a distance falls
/// outside the binned range.
struct BinningError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Blocked or out-of-bounds grid cell passed to a cell operation.
struct InvalidCellError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Bad configuration file or configuration invariant violation.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Filesystem and serialization failures.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ddcur
