#pragma once

#include <stdexcept>
#include <string>

namespace kasner {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid inputs / configuration (maps to CLI exit code 2).
struct ConfigError : Error {
    using Error::Error;
};
struct ExponentDomain : ConfigError {
    using ConfigError::ConfigError;
};
struct ExponentSign : ConfigError {
    using ConfigError::ConfigError;
};
struct NonpositiveTime : ConfigError {
    using ConfigError::ConfigError;
};
struct ZeroScalarAmplitude : ConfigError {
    using ConfigError::ConfigError;
};
struct WrongGauge : ConfigError {
    using ConfigError::ConfigError;
};
struct ForwardParabolic : ConfigError {
    using ConfigError::ConfigError;
};

// Numerical failures (maps to CLI exit code 3).
struct NumericalError : Error {
    using Error::Error;
};
struct SolveFailure : NumericalError {
    using NumericalError::NumericalError;
};
struct StaleLapse : NumericalError {
    using NumericalError::NumericalError;
};
struct MissingLapse : NumericalError {
    using NumericalError::NumericalError;
};
struct StepLimitExceeded : NumericalError {
    using NumericalError::NumericalError;
};
struct NonFiniteState : NumericalError {
    using NumericalError::NumericalError;
};
struct MissingAccumulator : NumericalError {
    using NumericalError::NumericalError;
};
struct InsufficientSpan : NumericalError {
    using NumericalError::NumericalError;
};
struct InsufficientDepth : NumericalError {
    using NumericalError::NumericalError;
};

} // namespace kasner
