#pragma once

#include <stdexcept>
#include <string>

namespace insar {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user-supplied parameters (bad config values, negative thresholds, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

/// Malformed grid file contents.
class FormatError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Non-finite values or divergence inside a numerical routine.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace insar
