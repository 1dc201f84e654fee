#pragma once

#include <stdexcept>

namespace vdslab {

// Thrown on malformed or out-of-range configuration values.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when tensor/layer shapes do not line up.
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown on malformed input files (maze grids, snapshots).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when an operation is called out of sequence (stepping a finished
// episode, pushing a gapped episode).
struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when an update would introduce non-finite values; state is left
// unchanged.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a resource is empty or missing (e.g. sampling an empty buffer).
struct UnavailableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace vdslab
