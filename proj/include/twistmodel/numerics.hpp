#pragma once

#include <Eigen/Dense>
#include <functional>

#include "twistmodel/errors.hpp"

namespace twistmodel {

struct SolverSettings {
    double gradient_tol = 1e-8;  // absolute inf-norm tolerance on the gradient
    int max_iterations = 200;
    double fd_step = 1e-6;
};

struct NewtonDiagnostics {
    int iterations = 0;
    double residual_inf = 0.0;
    bool converged = false;
};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// nodes ascending. Results are cached per order.
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre_rule(int n);

/// Fixed n-point Gauss-Legendre estimate of the integral of f over [a, b].
double gauss_legendre(const std::function<double(double)>& f, double a, double b, int n);

/// 32-point Gauss-Legendre integral of f over [a, b], verified by doubling
/// to 64 points; throws QuadratureError if the two estimates differ by more
/// than rel_tol relative to max(1, |result|).
double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    double rel_tol = 1e-10);

/// Solves A x = b for symmetric positive definite A via Cholesky.
/// Throws IndefiniteMatrixError when factorization hits a non-PD pivot and
/// NumericalError when the solve residual exceeds 1e-10 * ||b||.
Eigen::VectorXd solve_symmetric(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

/// Damped Newton iteration for a stationary point of the field `grad`:
/// finds x with ||grad(x)||_inf < settings.gradient_tol. The Jacobian is
/// formed by central differences of grad; steps are halved until the
/// least-squares merit 1/2 ||grad||^2 satisfies an Armijo decrease.
/// Throws SolverFailureError (best state attached) when the iteration cap
/// is exceeded or no acceptable step exists.
Eigen::VectorXd newton_stationary(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad,
    const Eigen::VectorXd& seed, const SolverSettings& settings = {},
    NewtonDiagnostics* diagnostics = nullptr);

/// Central finite-difference gradient of f at x with absolute step h.
Eigen::VectorXd finite_diff_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                     const Eigen::VectorXd& x, double h);

}  // namespace twistmodel
