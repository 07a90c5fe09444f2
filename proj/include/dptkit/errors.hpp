// errors.hpp
// Exception types shared across dptkit.

#pragma once

#include <stdexcept>
#include <string>

namespace dptkit {

// Base for every error dptkit raises on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Operand shapes do not line up (matrix sizes, subsystem specs, alphabets).
class DimensionError : public Error {
public:
    using Error::Error;
};

// An argument lies outside the domain of the operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// The input is valid but the requested computation is not supported exactly.
class CapabilityError : public Error {
public:
    using Error::Error;
};

// An enumeration or table would exceed its configured size budget.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

class InfeasibleError : public Error {
public:
    using Error::Error;
};

class UnboundedError : public Error {
public:
    using Error::Error;
};

// A documented validity gate of a bound formula does not hold.
class GateViolation : public Error {
public:
    using Error::Error;
};

// A participant broke the protocol rules (e.g. leaked after outputs were fixed).
class ProtocolViolation : public Error {
public:
    using Error::Error;
};

} // namespace dptkit
