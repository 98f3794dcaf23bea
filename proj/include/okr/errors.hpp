#pragma once

#include <stdexcept>
#include <string>

namespace okr {

/// Bad shapes, sizes or parameter values supplied by the caller.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A factorization failed or a variance/eigenvalue left its tolerance band.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. `row()` is 1-based; 0 when not tied to a row.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t row)
        : std::runtime_error(what), row_(row) {}

    [[nodiscard]] std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

}  // namespace okr
