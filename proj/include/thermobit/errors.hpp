#pragma once

#include <stdexcept>
#include <string>

namespace thermobit {

/// Argument outside the mathematical domain of an operation (p > 1, T <= 0, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Mismatched lengths or matrix dimensions.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A strict-mode bit operation received an input of the wrong type.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Power iteration failed to produce a verified fixed point.
class NoStationaryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace thermobit
