#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ltm {

/// Invalid argument or configuration value.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operation called in a state where it is not allowed (seeding an active node, ...).
class UsageError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Input that has no defined result (e.g. assortativity of an edgeless graph).
class UndefinedInputError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text input; carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace ltm
