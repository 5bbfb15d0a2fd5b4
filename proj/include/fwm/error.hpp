#pragma once

#include <stdexcept>

namespace fwm {

/// Mismatched or invalid tensor extents.
struct shape_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Out-of-range or inconsistent configuration values.
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Numerical failures: non-real inverse transforms, undefined similarities,
/// diverged training.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed or incompatible files and signatures.
struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace fwm
