#pragma once

#include <stdexcept>
#include <string>

namespace wgscatter {

// Invalid user input: bad config values, out-of-range arguments, malformed grids.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// A config file that could not be parsed; carries the 1-based line number.
class ParseError : public ConfigError {
public:
    ParseError(int line, const std::string& what)
        : ConfigError("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

// Validation failure tied to a named config field, e.g. "integrator.dt".
class FieldError : public ConfigError {
public:
    FieldError(std::string field, const std::string& what)
        : ConfigError(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// The numerics could not deliver a trustworthy answer (coverage, stability,
// calibration, long-time limit).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Pulse spectrum not contained in the detuning window.
class CoverageError : public NumericalError {
public:
    CoverageError(const std::string& what, double outside_mass)
        : NumericalError(what), outside_mass_(outside_mass) {}
    double outside_mass() const noexcept { return outside_mass_; }

private:
    double outside_mass_;
};

}  // namespace wgscatter
