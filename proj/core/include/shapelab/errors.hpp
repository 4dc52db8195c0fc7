#pragma once

#include <stdexcept>
#include <string>

namespace shapelab {

struct DimensionMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shell/lex search for an occupied site exhausted its bound.
struct NoOccupiedSite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoBParticles : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScheduleInfeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyInterior : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Unbounded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionUnsupported : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AllReplicasFlagged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientReplicas : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace shapelab
