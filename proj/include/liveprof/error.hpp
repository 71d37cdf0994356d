#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace liveprof {

/// Source location in DSL text. Lines and columns are 1-based; a zero line
/// means "no location".
struct SourceSpan {
    std::size_t line = 0;
    std::size_t column = 0;
    std::size_t length = 0;

    bool operator==(const SourceSpan&) const = default;
};

/// Base of every error raised by the library. `kind()` is the stable name
/// used on the wire (e.g. "NameError").
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message, SourceSpan span = {})
        : std::runtime_error(message), kind_(std::move(kind)), span_(span) {}

    [[nodiscard]] const std::string& kind() const noexcept { return kind_; }
    [[nodiscard]] const SourceSpan& span() const noexcept { return span_; }
    void set_span(SourceSpan span) noexcept { span_ = span; }

private:
    std::string kind_;
    SourceSpan span_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error("IoError", message) {}
};

class CsvError : public Error {
public:
    CsvError(std::size_t line, const std::string& message)
        : Error("CsvError", "line " + std::to_string(line) + ": " + message), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& message, SourceSpan span, std::vector<std::string> expected)
        : Error("ParseError", message, span), expected_(std::move(expected)) {}

    [[nodiscard]] const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::vector<std::string> expected_;
};

class NameError : public Error {
public:
    explicit NameError(const std::string& name, SourceSpan span = {})
        : Error("NameError", "unknown name '" + name + "'", span), name_(name) {}

    [[nodiscard]] const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class TypeError : public Error {
public:
    explicit TypeError(const std::string& message, SourceSpan span = {})
        : Error("TypeError", message, span) {}
};

/// Strict cast failure. `row()` is the 0-based index of the first cell that
/// could not be converted.
class CastError : public Error {
public:
    CastError(std::size_t row, const std::string& message, SourceSpan span = {})
        : Error("CastError", message, span), row_(row) {}

    [[nodiscard]] std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

}  // namespace liveprof
