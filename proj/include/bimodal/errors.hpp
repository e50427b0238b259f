#pragma once

#include <stdexcept>
#include <string>

namespace bimodal {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class CriticalPointError : public Error {
public:
    using Error::Error;
};

class NoFixedPoint : public Error {
public:
    using Error::Error;
};

class NotInRegion : public Error {
public:
    using Error::Error;
};

class BracketError : public Error {
public:
    using Error::Error;
};

/// Neither a period nor a clearly positive Lyapunov exponent was found.
class UnresolvedAttractor : public Error {
public:
    UnresolvedAttractor(const std::string& what, double lyapunov)
        : Error(what), lyapunov_(lyapunov) {}
    double lyapunov() const noexcept { return lyapunov_; }

private:
    double lyapunov_;
};

/// Newton-type solver failures carry the last residual norm.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class NoConvergence : public SolverError {
public:
    using SolverError::SolverError;
};

class SingularJacobian : public SolverError {
public:
    using SolverError::SolverError;
};

/// The solver converged onto a cycle whose minimal period divides but is
/// smaller than the requested one.
class DegenerateCycle : public SolverError {
public:
    using SolverError::SolverError;
};

class StepUnderflow : public Error {
public:
    using Error::Error;
};

class NoCrossings : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// A data file does not follow its CSV or JSON schema.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace bimodal
