#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gridseg {

/// Malformed case-file text. `line()` is 1-based; 0 means the problem is not
/// tied to a single line (e.g. a required matrix is absent).
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& message)
        : std::runtime_error(line == 0 ? message : "line " + std::to_string(line) + ": " + message),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Structurally inconsistent grid data (dangling references, duplicate ids).
class CaseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A power-flow problem that cannot be posed or solved.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File-system failure while reading inputs or writing artifacts.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace gridseg
