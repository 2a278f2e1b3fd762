#pragma once

#include <stdexcept>
#include <string>

namespace revhilbert {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (non-finite term, nonpositive
/// weight, out-of-range parameter, ...).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// An iterative routine ran out of its evaluation or index budget.
class BudgetExceeded : public Error {
public:
    BudgetExceeded(const std::string& what, double best_estimate)
        : Error(what), best_estimate_(best_estimate) {}

    [[nodiscard]] double best_estimate() const noexcept { return best_estimate_; }

private:
    double best_estimate_;
};

/// The truncated exponential family does not carry enough mass.
class InsufficientTruncation : public Error {
public:
    InsufficientTruncation(const std::string& what, double achieved_mass)
        : Error(what), achieved_mass_(achieved_mass) {}

    [[nodiscard]] double achieved_mass() const noexcept { return achieved_mass_; }

private:
    double achieved_mass_;
};

/// Malformed input file; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace revhilbert
