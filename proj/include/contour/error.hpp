#pragma once

#include <stdexcept>
#include <string>

namespace contour {

// Base for all library failures that are not plain precondition violations.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input documents (JSON, SVG, PNG, JSONL).
class ParseError : public Error {
public:
    using Error::Error;
};

// Two maps/drawings that must share dimensions do not.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

}  // namespace contour
