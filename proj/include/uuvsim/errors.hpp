#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uuvsim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A shunting integration step cannot keep the activity inside (-D, B).
class StepTooLarge : public Error
{
public:
    using Error::Error;
};

/// Innovation covariance could not be factorized, or a filter produced non-finite values.
class NumericalFailure : public Error
{
public:
    using Error::Error;
};

/// Invalid configuration value or unknown configuration key.
class ConfigError : public Error
{
public:
    using Error::Error;
};

class UnknownPreset : public ConfigError
{
public:
    explicit UnknownPreset(const std::string& name) : ConfigError("unknown preset '" + name + "'") {}
};

/// Out-of-range lookup into a sampled (table) trajectory.
class RangeError : public Error
{
public:
    using Error::Error;
};

/// A runtime invariant was violated during simulation. Carries the step index.
class InvariantViolation : public Error
{
public:
    InvariantViolation(std::size_t step, const std::string& what)
        : Error("step " + std::to_string(step) + ": " + what), step_(step)
    {
    }

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

}  // namespace uuvsim
