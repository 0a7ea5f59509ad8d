#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pml {

// Precondition violations on numeric/geometric inputs.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Missing or inconsistent configuration (error models, fixtures, families).
class ConfigurationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Rule text that does not conform to the mission language grammar.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line), column_(column), message_(message) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string message_;
};

// Failure while grounding or evaluating a program (unbound variables, unsafe rules).
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A program refers to a spatial relation or distributional atom that has no source.
class UnknownAtomError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Program shape not supported by the requested inference mode.
class UnsupportedProgramError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace pml
