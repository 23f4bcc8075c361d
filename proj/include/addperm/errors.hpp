#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace addperm {

/// Malformed matrix or DIMACS input. Line and column are 1-based; 0 means unknown.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0);

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Random generation could not produce a feasible matrix within the retry budget.
class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An input exceeds a configured size limit (brute force, explicit Ryser).
class LimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TimeoutError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The live ADD node count exceeded the configured budget.
class NodeBudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A broken internal invariant (e.g. a variable left unabstracted).
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace addperm
