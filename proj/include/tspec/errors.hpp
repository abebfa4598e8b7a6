#pragma once

#include <stdexcept>
#include <string>

namespace tspec {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

/// The adaptive integrator could not continue; `x()` is where the step size collapsed.
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double x) : Error(what), x_(x) {}
    double x() const noexcept { return x_; }

private:
    double x_;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual) : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

} // namespace tspec
