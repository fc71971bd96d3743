#pragma once

#include <stdexcept>
#include <string>

namespace ucond {

// Every error the core raises derives from Error; the C API maps the
// concrete type onto a status code.

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad argument to a pure function (invalid phase index, non-positive load...).
class InputError : public Error {
public:
    using Error::Error;
};

/// Scenario file could not be parsed or violates a parameter invariant.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Topology accepted for documentation but not simulated.
class NotImplementedError : public Error {
public:
    using Error::Error;
};

/// Network matrix could not be factored; message names the floating node.
class SingularSystemError : public Error {
public:
    using Error::Error;
};

/// Conduction-state fixed point did not converge within one step.
class StepError : public Error {
public:
    using Error::Error;
};

/// A run aborted (step failure after all dt halvings).
class RunError : public Error {
public:
    using Error::Error;
};

/// A post-processing measurement could not be taken from a trace.
class MeasurementError : public Error {
public:
    using Error::Error;
};

/// Caller broke a documented precondition (e.g. event bracket without sign change).
class ContractViolation : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace ucond
