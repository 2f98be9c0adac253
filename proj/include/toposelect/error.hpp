#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace toposelect {

/// Base of every error the library throws. The CLI maps the concrete type to
/// its exit code, so new error classes should derive from one of the leaves.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: out-of-range parameters, malformed files, unknown names.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Parse failure in a text input; carries the 1-based line number when known.
class ParseError : public InvalidArgument {
public:
    ParseError(const std::string& what, std::size_t line)
        : InvalidArgument(line ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// The request is well formed but has no solution (e.g. a deflection limit
/// that even a fully dense part cannot meet).
class Infeasible : public Error {
public:
    using Error::Error;
};

/// A meta-model cannot be fitted to the supplied anchors.
class FitError : public Infeasible {
public:
    using Infeasible::Infeasible;
};

/// Linear solve did not reach the residual target.
class SolverFailure : public Error {
public:
    SolverFailure(const std::string& what, std::size_t iterations, double residual)
        : Error(what + " (iterations=" + std::to_string(iterations) +
                ", relative residual=" + std::to_string(residual) + ")"),
          iterations_(iterations),
          residual_(residual) {}
    std::size_t iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    std::size_t iterations_;
    double residual_;
};

}  // namespace toposelect
