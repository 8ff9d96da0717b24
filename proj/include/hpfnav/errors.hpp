#pragma once

#include <stdexcept>
#include <string>

namespace hpfnav {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Scenario document is syntactically malformed or has an unknown key.
struct ParseError : Error {
    using Error::Error;
};

/// Scenario document parsed but violates an invariant; message names it.
struct ValidationError : Error {
    using Error::Error;
};

/// Relaxation hit max_iterations with residual above tolerance.
struct NonConvergence : Error {
    NonConvergence(double residual, int iterations)
        : Error("solver did not converge: residual " + std::to_string(residual) +
                " after " + std::to_string(iterations) + " iterations"),
          residual(residual),
          iterations(iterations) {}
    double residual;
    int iterations;
};

/// Target is unreachable from start through Free cells.
struct DisconnectedDomain : Error {
    DisconnectedDomain() : Error("target unreachable from start through Free cells") {}
};

/// Gamma solve has no positive-conductance path from start to target.
struct AllZeroGamma : Error {
    AllZeroGamma() : Error("no positive-conductance path from start to target") {}
};

/// Orientation offset cell is an Obstacle or coincides with the target cell.
struct OffsetCellInvalid : Error {
    using Error::Error;
};

/// Gradient queried at a point outside the admissible space.
struct PointNotAdmissible : Error {
    PointNotAdmissible() : Error("query point is not in a Free cell") {}
};

/// FSR steering command exceeds phi_max.
struct SteeringOutOfRange : Error {
    using Error::Error;
};

/// Reference-path tracing found a vanishing gradient away from the target.
struct StalledPath : Error {
    StalledPath() : Error("gradient vanished away from the target; solver defect suspected") {}
};

/// Fractional saturation requested without a recorded reference maximum.
struct MissingReferenceMax : Error {
    MissingReferenceMax()
        : Error("saturation_fraction set but no reference maximum from an undisturbed run") {}
};

/// A step carried the robot into an Obstacle cell.
struct LeftAdmissibleSpace : Error {
    LeftAdmissibleSpace() : Error("step left the admissible space") {}
};

/// A state magnitude exceeded the blowup threshold.
struct NumericalBlowup : Error {
    NumericalBlowup() : Error("state magnitude exceeded 1e9") {}
};

}  // namespace hpfnav
