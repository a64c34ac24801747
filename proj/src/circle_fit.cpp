#include "twistmodel/circle_fit.hpp"

#include <cmath>

namespace twistmodel {

namespace {

// Linearized fit: minimize sum (|p|^2 + a*x + b*y + c)^2, which is linear
// in (a, b, c); center = -(a, b)/2, radius^2 = |center|^2 - c.
Circle2D algebraic_seed(std::span<const Eigen::Vector2d> points) {
    Eigen::Matrix3d normal = Eigen::Matrix3d::Zero();
    Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
    for (const auto& p : points) {
        Eigen::Vector3d row(p.x(), p.y(), 1.0);
        normal += row * row.transpose();
        rhs -= row * p.squaredNorm();
    }
    Eigen::Vector3d abc = normal.ldlt().solve(rhs);
    Circle2D circle;
    circle.center = Eigen::Vector2d(-0.5 * abc[0], -0.5 * abc[1]);
    double r2 = circle.center.squaredNorm() - abc[2];
    circle.radius = std::sqrt(std::max(r2, 0.0));
    return circle;
}

double sum_squared_radial(std::span<const Eigen::Vector2d> points, const Eigen::Vector2d& c,
                          double r) {
    double ssr = 0.0;
    for (const auto& p : points) {
        double d = (p - c).norm() - r;
        ssr += d * d;
    }
    return ssr;
}

}  // namespace

Circle2D fit_circle_2d(std::span<const Eigen::Vector2d> points) {
    const auto n = points.size();
    if (n < 3) throw DegenerateInputError("fit_circle_2d: need at least 3 points");

    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& p : points) mean += p;
    mean /= static_cast<double>(n);
    Eigen::Matrix2d scatter = Eigen::Matrix2d::Zero();
    for (const auto& p : points) {
        Eigen::Vector2d d = p - mean;
        scatter += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(scatter);
    if (eig.eigenvalues()[0] <= 1e-12 * std::max(eig.eigenvalues()[1], 1e-30))
        throw DegenerateInputError("fit_circle_2d: points are collinear");

    Circle2D circle = algebraic_seed(points);
    if (!(circle.radius > 0.0)) throw DegenerateInputError("fit_circle_2d: zero-radius seed");

    // Gauss-Newton on (cx, cy, r), residual_i = |p_i - c| - r.
    double ssr = sum_squared_radial(points, circle.center, circle.radius);
    for (int iter = 0; iter < 100; ++iter) {
        Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
        Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
        for (const auto& p : points) {
            Eigen::Vector2d d = p - circle.center;
            double dist = d.norm();
            if (dist < 1e-14) continue;  // point at the current center carries no direction
            Eigen::Vector3d jrow(-d.x() / dist, -d.y() / dist, -1.0);
            double res = dist - circle.radius;
            jtj += jrow * jrow.transpose();
            jtr += jrow * res;
        }
        Eigen::Vector3d delta = jtj.ldlt().solve(-jtr);
        if (!delta.allFinite()) break;

        double scale = std::max(1.0, circle.radius);
        Eigen::Vector2d center_prev = circle.center;
        double radius_prev = circle.radius;
        double step = 1.0;
        bool moved = false;
        for (int halving = 0; halving < 30; ++halving) {
            Eigen::Vector2d c_trial = center_prev + step * delta.head<2>();
            double r_trial = radius_prev + step * delta[2];
            double ssr_trial = sum_squared_radial(points, c_trial, r_trial);
            if (ssr_trial <= ssr) {
                circle.center = c_trial;
                circle.radius = r_trial;
                ssr = ssr_trial;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved || delta.cwiseAbs().maxCoeff() < 1e-14 * scale) break;
    }

    if (!(circle.radius > 0.0))
        throw DegenerateInputError("fit_circle_2d: fit collapsed to non-positive radius");
    circle.rms_residual = std::sqrt(ssr / static_cast<double>(n));
    return circle;
}

}  // namespace twistmodel
