#pragma once
// Error taxonomy shared by all verdict components.

#include <stdexcept>
#include <string>

namespace verdict {

// Base class for every error raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Caller passed arguments that violate a precondition.
struct InvalidArgument : Error {
    using Error::Error;
};

// A file exists but its content does not match the expected format.
struct ParseFailure : Error {
    using Error::Error;
};

// Two run records map to the same (item, source) cell with different votes.
struct ConflictingRecords : Error {
    using Error::Error;
};

// Prediction and gold item-id sets differ; message lists the symmetric difference.
struct KeyMismatch : Error {
    using Error::Error;
};

// An estimator received a matrix with no usable (non-abstain) votes.
struct EmptyInput : Error {
    using Error::Error;
};

// Triplet accuracy estimation needs at least three sources.
struct NotEnoughSources : Error {
    using Error::Error;
};

// Every triplet for some source fell below the moment threshold.
struct DegenerateMoments : Error {
    using Error::Error;
};

// A fit produced a non-finite intermediate value.
struct NumericalFailure : Error {
    using Error::Error;
};

// Estimator name not present in the registry.
struct UnknownModel : Error {
    using Error::Error;
};

// Subset study would evaluate more than the configured cap.
struct TooManyCombinations : Error {
    using Error::Error;
};

// Completion request failed after exhausting the retry policy.
struct TransportError : Error {
    using Error::Error;
};

// Replay mode asked for a run_key the store does not hold.
struct CacheMiss : Error {
    using Error::Error;
};

// store_put saw an existing key with different content.
struct KeyCollision : Error {
    using Error::Error;
};

// Destination unwritable or file I/O failed mid-operation.
struct IoError : Error {
    using Error::Error;
};

}  // namespace verdict
