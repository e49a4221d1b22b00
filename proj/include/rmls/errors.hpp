#pragma once

#include <stdexcept>
#include <string>

namespace rmls {

// Error categories map to the CLI exit-code contract:
// 1 validation, 2 property violation, 3 I/O.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PropertyViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace rmls
