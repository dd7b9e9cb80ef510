#pragma once

#include <stdexcept>
#include <string>

namespace mflq {

/// Base class for all errors raised by the library on bad input.
/// Solver-level outcomes (singular control weight, blow-up) are not
/// exceptions; they are reported as status values so the epsilon sweep
/// can treat them as data.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Expression or config text could not be parsed.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Problem config file is structurally invalid.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A coefficient evaluated to a non-finite value or outside its horizon.
class EvalError : public Error {
public:
    using Error::Error;
};

/// Problem data violates a structural invariant (shape, symmetry, PSD).
class ValidationError : public Error {
public:
    using Error::Error;
};

}  // namespace mflq
