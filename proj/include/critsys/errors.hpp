#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace critsys {

/// Base class for every error raised by the library.
///
/// Carries a short machine-readable `code`, the name of the violated
/// constraint and a printable representation of the offending value, so
/// front ends can emit structured diagnostics without parsing messages.
class Error : public std::runtime_error {
public:
    Error(std::string code, std::string constraint, std::string value, const std::string& message)
        : std::runtime_error(message),
          code_(std::move(code)),
          constraint_(std::move(constraint)),
          value_(std::move(value)) {}

    const std::string& code() const noexcept { return code_; }
    const std::string& constraint() const noexcept { return constraint_; }
    const std::string& value() const noexcept { return value_; }

private:
    std::string code_;
    std::string constraint_;
    std::string value_;
};

/// Input outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    DomainError(std::string constraint, std::string value, const std::string& message,
                std::string code = "domain")
        : Error(std::move(code), std::move(constraint), std::move(value), message) {}
};

/// An operation that failed numerically: no bracket, divergence,
/// unresolved discretization, a detected counterexample.
class NumericalError : public Error {
public:
    NumericalError(std::string code, std::string constraint, std::string value,
                   const std::string& message)
        : Error(std::move(code), std::move(constraint), std::move(value), message) {}
};

/// A sampled pair (c, d) that violates a domination property.
class CounterexampleError : public NumericalError {
public:
    CounterexampleError(double c, double d, double margin, const std::string& message)
        : NumericalError("counterexample", "domination", pair_string(c, d), message),
          c_(c), d_(d), margin_(margin) {}

    double c() const noexcept { return c_; }
    double d() const noexcept { return d_; }
    double margin() const noexcept { return margin_; }

private:
    static std::string pair_string(double c, double d);

    double c_;
    double d_;
    double margin_;
};

std::string format_value(double v);

} // namespace critsys
