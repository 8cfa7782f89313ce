#pragma once

#include <stdexcept>
#include <string>

namespace odp {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shape or layout mismatch between tensors/layers.
struct DimensionError : Error {
    using Error::Error;
};

// Bad input data (non-finite values, empty batches, too few samples).
struct ValidationError : Error {
    using Error::Error;
};

// Query outside a schedule's or table's domain.
struct DomainError : Error {
    using Error::Error;
};

// Inconsistent component wiring (sampler/regime mismatch, bad config keys).
struct ConfigError : Error {
    using Error::Error;
};

// Optimization failure (non-finite loss or gradients).
struct TrainingError : Error {
    using Error::Error;
};

// Division by a zero noise level.
struct SingularityError : Error {
    using Error::Error;
};

// Latency calibration could not find a separating cost.
struct CalibrationError : Error {
    using Error::Error;
};

// Missing or malformed files (checkpoints, configs).
struct FileError : Error {
    using Error::Error;
};

} // namespace odp
