#pragma once

#include <stdexcept>
#include <string>

namespace meo {

// Invalid numeric argument (angle outside its range, non-positive gain, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Scenario file could not be parsed or failed validation. `field()` holds the
// dotted JSON path of the offending entry, empty when not field-specific.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// A user never enters the field of view of any satellite.
class CoverageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Per-satellite bandwidth/power capacity exceeded.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Instance too large for exhaustive search.
class SizeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace meo
