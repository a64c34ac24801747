#include "twistmodel/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace twistmodel {

namespace {

// Legendre polynomial value and derivative at x via the three-term
// recurrence.
std::pair<double, double> legendre_pd(int n, double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    double dp = n * (x * p1 - p0) / (x * x - 1.0);
    return {p1, dp};
}

std::pair<std::vector<double>, std::vector<double>> build_rule(int n) {
    std::vector<double> nodes(n), weights(n);
    int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-based initial guess, refined by Newton on P_n.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            auto [p, d] = legendre_pd(n, x);
            dp = d;
            double dx = p / d;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        auto [p, d] = legendre_pd(n, x);
        dp = d;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
    }
    return {std::move(nodes), std::move(weights)};
}

}  // namespace

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre_rule(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre_rule: order must be >= 1");
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
    return it->second;
}

double gauss_legendre(const std::function<double(double)>& f, double a, double b, int n) {
    const auto& [nodes, weights] = gauss_legendre_rule(n);
    const double mid = 0.5 * (a + b);
    const double halfwidth = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += weights[i] * f(mid + halfwidth * nodes[i]);
    return halfwidth * sum;
}

double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    double rel_tol) {
    if (!(a <= b)) throw std::invalid_argument("integrate_1d: requires a <= b");
    if (a == b) return 0.0;
    const double q32 = gauss_legendre(f, a, b, 32);
    const double q64 = gauss_legendre(f, a, b, 64);
    const double diff = std::abs(q64 - q32);
    if (!(diff <= rel_tol * std::max(1.0, std::abs(q64)))) {
        throw QuadratureError("integrate_1d: doubling check failed, |q64 - q32| = " +
                              std::to_string(diff));
    }
    return q32;
}

Eigen::VectorXd solve_symmetric(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    if (A.rows() != A.cols() || A.rows() != b.size())
        throw std::invalid_argument("solve_symmetric: dimension mismatch");
    if (!A.isApprox(A.transpose(), 1e-12))
        throw std::invalid_argument("solve_symmetric: matrix is not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success)
        throw IndefiniteMatrixError("solve_symmetric: non-positive-definite pivot");
    Eigen::VectorXd x = llt.solve(b);
    const double residual = (A * x - b).norm();
    if (!(residual <= 1e-10 * std::max(b.norm(), 1e-300)) && b.norm() > 0.0)
        throw NumericalError("solve_symmetric: residual " + std::to_string(residual) +
                             " exceeds bound");
    return x;
}

Eigen::VectorXd newton_stationary(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad,
    const Eigen::VectorXd& seed, const SolverSettings& settings,
    NewtonDiagnostics* diagnostics) {
    if (settings.gradient_tol <= 0.0 || settings.max_iterations < 1 || settings.fd_step <= 0.0)
        throw std::invalid_argument("newton_stationary: invalid settings");

    const auto n = seed.size();
    Eigen::VectorXd x = seed;
    Eigen::VectorXd g = grad(x);
    if (!g.allFinite()) throw std::invalid_argument("newton_stationary: gradient not finite at seed");

    auto inf_norm = [](const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); };
    double merit = 0.5 * g.squaredNorm();

    Eigen::VectorXd best_x = x;
    double best_res = inf_norm(g);

    auto finish = [&](int iterations, double residual, bool converged) {
        if (diagnostics) *diagnostics = {iterations, residual, converged};
    };

    for (int iter = 0; iter < settings.max_iterations; ++iter) {
        double res = inf_norm(g);
        if (res < best_res) {
            best_res = res;
            best_x = x;
        }
        if (res < settings.gradient_tol) {
            finish(iter, res, true);
            return x;
        }

        // Jacobian of the gradient field by central differences.
        Eigen::MatrixXd J(n, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double h = settings.fd_step * std::max(1.0, std::abs(x[j]));
            Eigen::VectorXd xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            J.col(j) = (grad(xp) - grad(xm)) / (2.0 * h);
        }

        Eigen::VectorXd direction = Eigen::PartialPivLU<Eigen::MatrixXd>(J).solve(-g);
        if (!direction.allFinite() || direction.squaredNorm() == 0.0) direction = -g;

        bool accepted = false;
        double step = 1.0;
        for (int halving = 0; halving < 60; ++halving) {
            Eigen::VectorXd x_trial = x + step * direction;
            Eigen::VectorXd g_trial = grad(x_trial);
            if (g_trial.allFinite()) {
                double merit_trial = 0.5 * g_trial.squaredNorm();
                if (merit_trial <= merit * (1.0 - 1e-4 * step)) {
                    x = std::move(x_trial);
                    g = std::move(g_trial);
                    merit = merit_trial;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!accepted) {
            finish(iter + 1, best_res, false);
            throw SolverFailureError("newton_stationary: no acceptable step", best_x, best_res,
                                     iter + 1);
        }
    }

    double res = inf_norm(g);
    if (res < best_res) {
        best_res = res;
        best_x = x;
    }
    if (res < settings.gradient_tol) {
        finish(settings.max_iterations, res, true);
        return x;
    }
    finish(settings.max_iterations, best_res, false);
    throw SolverFailureError("newton_stationary: iteration cap exceeded", best_x, best_res,
                             settings.max_iterations);
}

Eigen::VectorXd finite_diff_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                     const Eigen::VectorXd& x, double h) {
    if (h <= 0.0) throw std::invalid_argument("finite_diff_gradient: step must be positive");
    Eigen::VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        g[i] = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

}  // namespace twistmodel
