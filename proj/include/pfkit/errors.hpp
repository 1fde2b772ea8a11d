#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pfkit {

// Every failure raised by the library derives from Error so callers can
// catch the whole family at once. The CLI maps all of them to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller broke a precondition: mixed moduli, unknown relation, bad arity.
class UsageError : public Error {
public:
    using Error::Error;
};

// Mathematically undefined request (inverse of zero, composite modulus).
class DomainError : public Error {
public:
    using Error::Error;
};

// A variable was looked up in a valuation that does not bind it.
class UnboundVariable : public Error {
public:
    explicit UnboundVariable(std::string name)
        : Error("unbound variable '" + name + "'"), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

// Lexical or syntactic problem in PFCS text, or a load-time check such as
// a forward reference. Line and column are 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          line_(line), column_(column) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

// An equality that cannot be rendered as (a)(b)=(c) with linear a, b, c.
class NotR1CSForm : public Error {
public:
    using Error::Error;
};

// Malformed interchange document. The message carries a location path
// such as "constraints[2].b[0]".
class FormatError : public Error {
public:
    using Error::Error;
};

// An exhaustive search would visit more candidates than allowed.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

}  // namespace pfkit
