#pragma once

#include <stdexcept>
#include <string>

namespace epinet {

// Closure denominators (n or N - I) fell below the guard in validation mode.
struct DegenerateState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A state coordinate became non-finite during integration.
struct IntegrationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The endemic residual scan found more than one positive root.
struct MultipleRoots : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bisection endpoints do not bracket the controllability transition.
struct BracketInvalid : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// No target mean degree is reachable even close to zero.
struct NoAchievableTarget : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownScenario : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad configuration input (CLI maps this to exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace epinet
