#pragma once

#include <stdexcept>

namespace booom {

// Input fails an orthonormality requirement.
struct FeasibilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Square orthogonal input has determinant -1 where a rotation is required.
struct ReflectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A numerical procedure could not complete (rank deficiency, non-finite
// intermediate results, an all-failed candidate sweep).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed configuration: unknown or missing keys, unparsable values.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input data: matrix files, labels, subprocess replies.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace booom
