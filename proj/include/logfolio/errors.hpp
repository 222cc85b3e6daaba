#pragma once

#include <stdexcept>
#include <string>

namespace logfolio {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input data (CSV rows, headers, dates). Messages carry the
// offending line number where one exists.
class ParseError : public Error {
public:
    using Error::Error;
};

// A documented precondition was violated (too few rows, bad parameter,
// missing instrument, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

// Numeric failure: rank-deficient designs, non-positive portfolio value.
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace logfolio
