#pragma once

#include <stdexcept>
#include <string>

namespace droplet {

/// Base class for every error raised by the solvers.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a formula (T <= 0, rho <= 0, ...).
class DomainError : public SolverError {
public:
    using SolverError::SolverError;
};

/// Too few neighbours to build a least-squares stencil.
class StencilError : public SolverError {
public:
    using SolverError::SolverError;
};

/// Least-squares normal matrix is numerically singular.
class SingularStencilError : public StencilError {
public:
    using StencilError::StencilError;
};

/// A collision pair had an acceptance probability above one.
class TimeStepViolation : public SolverError {
public:
    using SolverError::SolverError;
};

/// An explicit step produced negative density or temperature.
class StepRejected : public SolverError {
public:
    using SolverError::SolverError;
};

/// Inconsistent simulation state (lost droplet, molecule inside the liquid, ...).
class StateError : public SolverError {
public:
    using SolverError::SolverError;
};

/// Bad user configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace droplet
