#pragma once

#include <stdexcept>
#include <string>

namespace spinqc {

// Root of the library's exception hierarchy. Callers that only care about
// "something in spinqc failed" can catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad scalar argument: qubit index out of range, k < 1, negative duration.
class ArgumentError : public Error {
public:
    using Error::Error;
};

// Requested chain is larger than the propagator can hold.
class CapacityError : public Error {
public:
    using Error::Error;
};

// Call-boundary contract violated (frame or time mismatch between states).
class ContractError : public Error {
public:
    using Error::Error;
};

// Protocol cannot be built or is not of a supported shape.
class ProtocolError : public Error {
public:
    using Error::Error;
};

// Two-level pairing broke down (non-mutual or ambiguous partners).
class PairingError : public Error {
public:
    using Error::Error;
};

// Analytic model evaluated outside its validity range.
class ValidityError : public Error {
public:
    using Error::Error;
};

// Malformed config file or table; carries the offending line.
class ParseError : public Error {
public:
    ParseError(int line, std::string field, const std::string& what)
        : Error("line " + std::to_string(line) + ", field '" + field + "': " + what),
          line_(line), field_(std::move(field)) {}

    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    int line_;
    std::string field_;
};

}  // namespace spinqc
