#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace nsqn {

/// Vector or tensor shapes that must agree do not.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An argument is outside its documented domain.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A loss, gradient or iterate became NaN/Inf.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what, std::uint64_t iteration = 0)
        : std::runtime_error(what), iteration_(iteration) {}

    std::uint64_t iteration() const noexcept { return iteration_; }

private:
    std::uint64_t iteration_;
};

/// A BFGS update was asked to absorb a pair with sᵀy ≤ 0.
class CurvatureError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An internal invariant of the optimizer state does not hold.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unknown key or malformed line in an experiment config.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A config value violates the bound of the field it feeds.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace nsqn
