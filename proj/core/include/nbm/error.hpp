#pragma once

#include <stdexcept>
#include <string>

namespace nbm {

/// Malformed input text: bad numeric cell, bad header, out-of-range value.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Matrix/vector shape disagreement between caller and callee.
class DimensionError : public std::invalid_argument {
public:
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Invalid configuration or hyperparameter value.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Unreadable, truncated, or version-mismatched artifact file.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace nbm
