#pragma once

#include <stdexcept>
#include <string>

namespace bevkit {

/// Invalid or inconsistent caller input (bad file, mismatched dimensions,
/// out-of-range parameter).
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure: non-finite values where finite ones are required, or a
/// failed matrix decomposition.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Point cloud does not span three dimensions; carries the detected rank.
struct DegeneracyError : std::runtime_error {
  int rank;
  DegeneracyError(const std::string& msg, int detected_rank)
      : std::runtime_error(msg), rank(detected_rank) {}
};

/// Operation applied to an episode state that does not admit it.
struct StateError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Hard size guard tripped (exhaustive-search ceiling).
struct GuardError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace bevkit
