#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tdcount {

//! Base class of all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

//! Malformed input at a known position (1-based line and column).
class SyntaxError : public Error {
public:
    SyntaxError(std::size_t line, std::size_t column, const std::string& message)
        : Error("syntax error at " + std::to_string(line) + ":" + std::to_string(column) + ": " + message)
        , line_(line)
        , column_(column) {}
    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

//! Well-formed tokens that are not acceptable in ground input (e.g. variables).
class ParseError : public Error {
public:
    using Error::Error;
};

class UnsupportedRule : public Error {
public:
    explicit UnsupportedRule(int type)
        : Error("unsupported smodels rule type " + std::to_string(type))
        , type_(type) {}
    [[nodiscard]] int type() const noexcept { return type_; }

private:
    int type_;
};

class FormatError : public Error {
public:
    using Error::Error;
};

class HeaderMismatch : public Error {
public:
    using Error::Error;
};

//! Input exceeds a hard size guard (oracles, bag width of the table encoding).
class TooLarge : public Error {
public:
    using Error::Error;
};

class ProjectionOutOfRange : public Error {
public:
    using Error::Error;
};

class BagMismatch : public Error {
public:
    using Error::Error;
};

//! A node handler failed during traversal; carries the nice-TD node id.
class HandlerFailure : public Error {
public:
    HandlerFailure(std::size_t node, const std::string& message)
        : Error("handler failure at node " + std::to_string(node) + ": " + message)
        , node_(node) {}
    [[nodiscard]] std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

class InternalError : public Error {
public:
    using Error::Error;
};

} // namespace tdcount
