#pragma once

#include <stdexcept>
#include <string>

namespace seglens {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or missing input: bad CSV, ragged rows, label length mismatch.
class InputError : public Error {
public:
    enum class Kind { schema, parse, empty, length_mismatch, io };

    explicit InputError(const std::string& what, Kind kind = Kind::schema, std::size_t line = 0,
                        std::size_t column = 0)
        : Error(what), kind_(kind), line_(line), column_(column) {}

    [[nodiscard]] Kind kind() const { return kind_; }
    /// 1-based source line, 0 when not tied to a line.
    [[nodiscard]] std::size_t line() const { return line_; }
    /// 1-based column (cell), 0 when not tied to a cell.
    [[nodiscard]] std::size_t column() const { return column_; }

private:
    Kind kind_;
    std::size_t line_;
    std::size_t column_;
};

/// The data admit no meaningful answer (zero-variance embedding, zero-norm rows).
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// Search parameters that cannot be satisfied for the given signal length.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

} // namespace seglens
