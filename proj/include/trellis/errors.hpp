#pragma once

#include <stdexcept>
#include <string>

namespace trellis {

/// Base for domain errors raised by the library (bad input data, violated
/// preconditions on trellis contents, degenerate channels).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidTrellis : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class PathCapExceeded : public Error {
public:
    using Error::Error;
};

} // namespace trellis
