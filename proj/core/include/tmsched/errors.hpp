#pragma once

#include <stdexcept>
#include <string>

namespace tmsched {

/// Raised when an operation receives arguments outside its domain.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a scheduler breaks the engine contract (invokes a transaction
/// that is not pending, not yet visible, or violates the one-per-processor
/// rule of the queue-based model).
class ProtocolViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tmsched
