#pragma once

#include <stdexcept>
#include <string>

namespace tachyquench {

/// Raised when a kernel argument would overflow double precision
/// (growth exponent xi*t beyond the supported range).
class NumericRangeError : public std::range_error {
public:
    NumericRangeError(const std::string& what, double t)
        : std::range_error(what), t_(t) {}

    /// Time at which the overflow guard tripped.
    double time() const noexcept { return t_; }

private:
    double t_;
};

/// Configuration or parameter validation failure, tagged with the field name.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& msg)
        : std::invalid_argument(field + ": " + msg), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

} // namespace tachyquench
