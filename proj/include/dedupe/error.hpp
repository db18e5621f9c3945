#pragma once

#include <stdexcept>
#include <string>

namespace dedupe {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Attempt to pair a record with itself.
class SelfPairError : public Error { public: using Error::Error; };

/// Invalid algorithm parameter (metric weights, beta, n-gram size, ...).
class ParamError : public Error { public: using Error::Error; };

/// Invalid configuration (unknown field, bad blocking key, infeasible target, ...).
class ConfigError : public Error { public: using Error::Error; };

/// A referenced record id is not present in the corpus.
class LookupError : public Error { public: using Error::Error; };

/// Training preconditions violated (single-class data, too few samples).
class TrainingError : public Error { public: using Error::Error; };

/// Input dimensions do not match the model.
class ShapeError : public Error { public: using Error::Error; };

/// Non-finite or otherwise unusable numeric input.
class InputError : public Error { public: using Error::Error; };

/// Model was trained under a different feature schema.
class SchemaMismatchError : public Error { public: using Error::Error; };

/// Corrupt or truncated file content.
class FormatError : public Error { public: using Error::Error; };

/// An operation that needs at least one element got none.
class EmptyInputError : public Error { public: using Error::Error; };

/// Metric undefined for the given inputs (single-class scores, no positives).
class DegenerateError : public Error { public: using Error::Error; };

/// Filesystem failure while writing artifacts.
class IoError : public Error { public: using Error::Error; };

} // namespace dedupe
