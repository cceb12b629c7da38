#pragma once

#include <stdexcept>
#include <string>

namespace normcraft {

// Base of everything this library throws. Two branches: DataError for
// malformed or inconsistent inputs, ComputeError for failures that arise
// while the math itself is running. The CLI maps them to exit codes 2 and 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : Error {
    using Error::Error;
};

struct ComputeError : Error {
    using Error::Error;
};

struct ParseError : DataError {
    using DataError::DataError;
};

struct InvalidParams : DataError {
    using DataError::DataError;
};

struct DimensionMismatch : DataError {
    using DataError::DataError;
};

struct RegionOutOfBounds : DataError {
    using DataError::DataError;
};

struct SwatchTooSmall : DataError {
    using DataError::DataError;
};

struct EmptyOverlap : DataError {
    using DataError::DataError;
};

struct EmptyNeighborhood : DataError {
    using DataError::DataError;
};

struct MaskNotFull : DataError {
    using DataError::DataError;
};

// A vector too short to carry a direction (near-zero input pixel, or a
// blend/convolution that cancelled to zero).
struct DegeneratePixel : ComputeError {
    using ComputeError::ComputeError;
};

// Rodrigues construction is singular for directions at or near -z.
struct PoleSingularity : ComputeError {
    PoleSingularity(const std::string& msg, int row = -1, int col = -1)
        : ComputeError(msg), row(row), col(col) {}
    int row;
    int col;
};

struct ConvergenceFailure : ComputeError {
    ConvergenceFailure(const std::string& msg, double residual, int iterations)
        : ComputeError(msg), residual(residual), iterations(iterations) {}
    double residual;
    int iterations;
};

struct ExternalEnhancerFailed : ComputeError {
    using ComputeError::ComputeError;
};

struct NonConvergence : ComputeError {
    using ComputeError::ComputeError;
};

}  // namespace normcraft
