#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace twistmodel {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad or missing configuration (file, key, value, or parameter invariant).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed input data; carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(int line, const std::string& msg)
        : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// Two samples share the same (frame, marker_id).
class DuplicateSampleError : public Error {
public:
    using Error::Error;
};

/// Fewer usable markers than a fit requires; names the occluded ids.
class InsufficientMarkersError : public Error {
public:
    InsufficientMarkersError(const std::string& msg, std::vector<std::string> missing)
        : Error(msg), missing_(std::move(missing)) {}
    const std::vector<std::string>& missing_ids() const { return missing_; }

private:
    std::vector<std::string> missing_;
};

/// Not enough trials for statistics.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// Geometrically degenerate input (collinear points, coplanar cloud, ...).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// Quadrature failed its refinement convergence check.
class QuadratureError : public Error {
public:
    using Error::Error;
};

/// A matrix required to be positive definite is not.
class IndefiniteMatrixError : public Error {
public:
    using Error::Error;
};

/// Linear-solve residual exceeded its bound.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Iteration cap exceeded; carries the best state visited.
class SolverFailureError : public Error {
public:
    SolverFailureError(const std::string& msg, Eigen::VectorXd best, double residual_inf,
                       int iterations)
        : Error(msg),
          best_(std::move(best)),
          residual_inf_(residual_inf),
          iterations_(iterations) {}
    const Eigen::VectorXd& best_state() const { return best_; }
    double residual_inf() const { return residual_inf_; }
    int iterations() const { return iterations_; }

private:
    Eigen::VectorXd best_;
    double residual_inf_;
    int iterations_;
};

/// Strain-block Hessian of the potential is not positive definite.
class IllPosedModelError : public Error {
public:
    using Error::Error;
};

/// Temperature combination the actuator does not define a motion for.
class UndefinedConfigurationError : public Error {
public:
    using Error::Error;
};

/// Curvature state with no finite twist radius.
class StraightConfigurationError : public Error {
public:
    using Error::Error;
};

/// Geometry that makes the model singular (e.g. zero fiber angle).
class DegenerateGeometryError : public Error {
public:
    using Error::Error;
};

}  // namespace twistmodel
