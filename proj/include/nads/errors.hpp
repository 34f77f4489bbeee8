#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace nads {

/// Base class for every error raised by the library.
class Error : public std::exception {
public:
    explicit Error(std::string message) : message_(std::move(message)) {}
    const char* what() const noexcept override { return message_.c_str(); }

protected:
    std::string message_;
};

/// Failures of the numerics (branch tracking, underflow, step control).
/// Maps to CLI exit code 2.
class NumericalError : public Error {
public:
    explicit NumericalError(std::string message) : Error(std::move(message)), base_(message_) {}

    std::optional<std::size_t> grid_index() const noexcept { return index_; }

    /// Attach the offending grid index; the message is rebuilt to include it.
    void set_grid_index(std::size_t k)
    {
        index_ = k;
        message_ = base_ + " (grid index " + std::to_string(k) + ")";
    }

private:
    std::string base_;
    std::optional<std::size_t> index_;
};

/// Ω(t) dropped below the configured floor; Ω⁻¹∂ₜΩ is meaningless there.
class EnvelopeUnderflow : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Both square-root candidates are equidistant from the previous sample.
class BranchAmbiguity : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// |Ω̃′| too small to divide by.
class DegenerateRabi : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// c_g vanishes relative to c_e so c_e/c_g overflows.
class RatioUndefined : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Substep halving drove the RK4 step below the allowed minimum.
class StepUnderflow : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Configuration problems. Map to CLI exit code 1.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed scenario file or unknown key. `field` is the dotted key path
/// when one is known; `suggestion` the closest valid key for a typo.
class ParseError : public ConfigError {
public:
    explicit ParseError(std::string message, std::string field = {}, std::string suggestion = {})
        : ConfigError(std::move(message)), field_(std::move(field)), suggestion_(std::move(suggestion))
    {
    }
    const std::string& field() const noexcept { return field_; }
    const std::string& suggestion() const noexcept { return suggestion_; }

private:
    std::string field_;
    std::string suggestion_;
};

/// Well-formed input that violates an invariant. Names the field and the bound.
class ValidationError : public ConfigError {
public:
    ValidationError(std::string field, std::string detail)
        : ConfigError(field + ": " + detail), field_(std::move(field))
    {
    }
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace nads
