#pragma once

#include <stdexcept>

namespace saddlebench {

// Game dimensions beyond what the exact oracle enumerates.
class UnsupportedSizeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// No candidate support pair produced a feasible optimal solution.
class SolverFailureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Multiplicative-weights exponent left the representable range.
class StepSizeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace saddlebench
