#pragma once

#include <Eigen/Dense>
#include <span>

#include "twistmodel/errors.hpp"

namespace twistmodel {

struct Circle2D {
    Eigen::Vector2d center{0.0, 0.0};  // mm
    double radius = 0.0;               // mm
    double rms_residual = 0.0;         // mm, RMS of radial distances
};

/// Least-squares circle through 2D points: algebraic (linearized) fit as
/// seed, then Gauss-Newton refinement of the sum of squared radial
/// distances. Throws DegenerateInputError on fewer than 3 points or a
/// collinear set.
Circle2D fit_circle_2d(std::span<const Eigen::Vector2d> points);

}  // namespace twistmodel
