#pragma once

#include <stdexcept>
#include <string>

namespace vbe {

// Input fails referential integrity or schema validation.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Data is structurally fine but carries no usable signal (zero total mass, empty series, ...).
class DegenerateDataError : public std::runtime_error {
public:
    explicit DegenerateDataError(const std::string& what) : std::runtime_error(what) {}
};

// Caller passed an out-of-domain parameter.
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

} // namespace vbe
