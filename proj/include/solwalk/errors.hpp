#pragma once
#include <stdexcept>
#include <string>

namespace solwalk {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// bad arguments, malformed files, violated preconditions; CLI exit code 2
struct validation_error : error {
    using error::error;
};
struct degenerate_input_error : validation_error {
    using validation_error::validation_error;
};
struct zero_drift_error : validation_error {
    using validation_error::validation_error;
};
struct method_mismatch_error : validation_error {
    using validation_error::validation_error;
};

// atom budget exhausted mid-computation; carries the largest completed power
struct budget_error : validation_error {
    int reached_k;
    budget_error(const std::string& what, int k) : validation_error(what), reached_k(k) {}
};

// numeric failure at runtime (non-convergence, precision exhausted); CLI exit code 3
struct numeric_error : error {
    using error::error;
};
struct precision_error : numeric_error {
    using numeric_error::numeric_error;
};
struct convergence_error : numeric_error {
    using numeric_error::numeric_error;
};
struct insufficient_samples_error : numeric_error {
    using numeric_error::numeric_error;
};

}  // namespace solwalk
