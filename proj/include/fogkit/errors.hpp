#pragma once

#include <stdexcept>
#include <string>

namespace fogkit {

/// Tensor or image dimensions that do not fit together.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Caller broke a documented precondition.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Inconsistent model or run configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input data on disk could not be loaded, parsed or disambiguated.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A calibration target that the fog model cannot reach.
class InfeasibleTarget : public ContractError {
public:
    using ContractError::ContractError;
};

/// Training produced a non-finite value.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fogkit
