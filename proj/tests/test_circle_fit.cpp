#include <doctest.h>

#include <cmath>
#include <random>

#include "twistmodel/circle_fit.hpp"

using namespace twistmodel;

namespace {

std::vector<Eigen::Vector2d> circle_points(int n, double radius, const Eigen::Vector2d& center,
                                           double angle0 = 0.0, double arc = 2.0 * M_PI) {
    std::vector<Eigen::Vector2d> pts(n);
    for (int i = 0; i < n; ++i) {
        double a = angle0 + arc * i / n;
        pts[i] = center + radius * Eigen::Vector2d(std::cos(a), std::sin(a));
    }
    return pts;
}

}  // namespace

TEST_CASE("three exact points are interpolated") {
    std::vector<Eigen::Vector2d> pts = {{10.0, 0.0}, {0.0, 10.0}, {-10.0, 0.0}};
    Circle2D c = fit_circle_2d(pts);
    CHECK(std::abs(c.radius - 10.0) <= 1e-9);
    CHECK(c.center.norm() <= 1e-9);
    CHECK(c.rms_residual <= 1e-9);
}

TEST_CASE("noiseless points recover the circle to 1e-9") {
    auto pts = circle_points(20, 43.5, {12.0, -7.0});
    Circle2D c = fit_circle_2d(pts);
    CHECK(std::abs(c.radius - 43.5) <= 1e-9);
    CHECK((c.center - Eigen::Vector2d(12.0, -7.0)).norm() <= 1e-9);

    // partial arcs too: geometric refinement is what keeps these unbiased
    auto arc = circle_points(9, 43.5, {12.0, -7.0}, 0.3, 1.1);
    Circle2D ca = fit_circle_2d(arc);
    CHECK(std::abs(ca.radius - 43.5) <= 1e-7);
}

TEST_CASE("degenerate inputs are rejected") {
    std::vector<Eigen::Vector2d> two = {{0.0, 0.0}, {1.0, 1.0}};
    CHECK_THROWS_AS(fit_circle_2d(two), DegenerateInputError);

    std::vector<Eigen::Vector2d> line;
    for (int i = 0; i < 8; ++i) line.emplace_back(0.5 * i, 1.25 * i);
    CHECK_THROWS_AS(fit_circle_2d(line), DegenerateInputError);
}

TEST_CASE("fit is invariant under rigid motions") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> noise(0.0, 0.3);
    auto pts = circle_points(16, 27.0, {3.0, 4.0});
    for (auto& p : pts) p += Eigen::Vector2d(noise(rng), noise(rng));
    Circle2D base = fit_circle_2d(pts);

    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    for (int trial = 0; trial < 10; ++trial) {
        double a = angle(rng);
        Eigen::Rotation2D<double> rot(a);
        Eigen::Vector2d shift(noise(rng) * 50.0, noise(rng) * 50.0);
        std::vector<Eigen::Vector2d> moved;
        moved.reserve(pts.size());
        for (const auto& p : pts) moved.push_back(rot * p + shift);
        Circle2D c = fit_circle_2d(moved);
        CHECK(std::abs(c.radius - base.radius) <= 1e-9 * std::max(1.0, base.radius));
        CHECK((c.center - (rot * base.center + shift)).norm() <= 1e-8);
        CHECK(std::abs(c.rms_residual - base.rms_residual) <= 1e-9);
    }
}

TEST_CASE("noisy fit stays within 0.3 mm of truth (smoke, full run in acceptance)") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> noise(0.0, 0.5);
    int hits = 0;
    constexpr int kReps = 100;
    for (int rep = 0; rep < kReps; ++rep) {
        auto pts = circle_points(20, 43.5, {0.0, 0.0});
        for (auto& p : pts) p += Eigen::Vector2d(noise(rng), noise(rng));
        Circle2D c = fit_circle_2d(pts);
        if (std::abs(c.radius - 43.5) <= 0.3) ++hits;
    }
    CHECK(hits >= 97);
}
