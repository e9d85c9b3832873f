#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rmshift {

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. `row` is the 1-based data row (0 for the header).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t row) : std::runtime_error(message), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

}  // namespace rmshift
