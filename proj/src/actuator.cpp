#include "twistmodel/actuator.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace twistmodel {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Aggregates everything the stationarity system needs: the elastic
// coefficients, the x3 moments of the section weight over both wall parts,
// and the pressure-work coefficient. The potential is
//   (n+1) * ( quadratic(strains; moments) - pressure * work_coeff * bracket(phi) ).
struct SectionModel {
    double alpha;       // E/(1+v), coefficient of the J2 term
    double beta;        // E*v*(1-2v)/(1+v), coefficient of the J1^2 term
    double m0, m1, m2;  // section weight moments: integral of w(x3)*x3^k
    double work_coeff;  // c*h1*(W/sin(theta))*pitch
    double fiber_angle;
    double chambers;    // n+1

    SectionModel(const ActuatorGeometry& g, const MaterialModel& m) {
        const double e = m.youngs_modulus_kpa;
        const double v = m.poisson_ratio;
        alpha = e / (1.0 + v);
        beta = e * v * (1.0 - 2.0 * v) / (1.0 + v);

        const double r = g.outer_radius_mm;
        const double t = g.wall_thickness_mm;
        const double flat_weight = g.pitch_mm * g.part1_width_mm / std::cos(g.fiber_angle_rad);
        const double u0 = std::asin((r - t) / r);
        double mom[3];
        for (int k = 0; k < 3; ++k) {
            mom[k] = integrate_1d([&](double x3) { return flat_weight * std::pow(x3, k); },
                                  0.0, t);
            // Curved shell measured with x3 = r*sin(u): the local width
            // 2*sqrt(r^2 - x3^2) becomes 2*r*cos(u) and dx3 = r*cos(u)*du,
            // removing the square-root endpoint singularity.
            mom[k] += integrate_1d(
                [&](double u) {
                    const double c = r * std::cos(u);
                    return g.pitch_mm * 2.0 * c * std::pow(r * std::sin(u), k) * c;
                },
                u0, kPi / 2.0);
        }
        m0 = mom[0];
        m1 = mom[1];
        m2 = mom[2];

        const double s = std::sin(g.fiber_angle_rad);
        if (std::abs(s) < 1e-12)
            throw DegenerateGeometryError("pressure work undefined at zero fiber angle");
        work_coeff = m.correction_factor * g.chamber_height_mm *
                     (g.part1_width_mm / s) * g.pitch_mm;
        fiber_angle = g.fiber_angle_rad;
        chambers = g.winding_count + 1.0;
    }

    // Gradient in the packed order (e11, e22, e33, k1, k2, q, phi).
    Eigen::VectorXd gradient(const Eigen::VectorXd& x, double pressure) const {
        Eigen::VectorXd g(7);
        const double s0 = x[0] + x[1] + x[2];
        const double s1 = x[3] + x[4] + x[5];
        for (int i = 0; i < 3; ++i) {
            g[i] = alpha * (m0 * x[i] + m1 * x[3 + i]) + 2.0 * beta * (m0 * s0 + m1 * s1);
            g[3 + i] = alpha * (m1 * x[i] + m2 * x[3 + i]) + 2.0 * beta * (m1 * s0 + m2 * s1);
        }
        const double psi = fiber_angle - x[6];
        const double sp = std::sin(psi), cp = std::cos(psi);
        g[0] -= pressure * work_coeff * sp * sp;
        g[1] -= pressure * work_coeff * cp * cp;
        g[6] = -pressure * work_coeff * (x[1] - x[0]) * std::sin(2.0 * psi);
        return chambers * g;
    }

    // Hessian restricted to the six quadratic variables; state independent.
    Eigen::MatrixXd strain_hessian() const {
        Eigen::MatrixXd h(6, 6);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                const double diag = (i == j) ? alpha : 0.0;
                h(i, j) = diag * m0 + 2.0 * beta * m0;
                h(i, 3 + j) = diag * m1 + 2.0 * beta * m1;
                h(3 + i, j) = diag * m1 + 2.0 * beta * m1;
                h(3 + i, 3 + j) = diag * m2 + 2.0 * beta * m2;
            }
        }
        return chambers * h;
    }

    // Pressure-work load vector on the six quadratic variables.
    Eigen::VectorXd load(double pressure, double phi) const {
        Eigen::VectorXd b = Eigen::VectorXd::Zero(6);
        const double psi = fiber_angle - phi;
        b[0] = pressure * work_coeff * std::sin(psi) * std::sin(psi);
        b[1] = pressure * work_coeff * std::cos(psi) * std::cos(psi);
        return chambers * b;
    }
};

double potential_from_vector(const ActuatorGeometry& geom, const MaterialModel& mat,
                             const Eigen::VectorXd& x, double pressure) {
    return total_potential(geom, mat, EquilibriumState::from_vector(x), pressure);
}

}  // namespace

void ActuatorGeometry::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("geometry: " + msg); };
    if (!(length_mm > 0.0)) fail("length_mm must be positive");
    if (!(wall_thickness_mm > 0.0 && wall_thickness_mm < outer_radius_mm))
        fail("wall_thickness_mm must satisfy 0 < t < outer radius");
    if (!(pitch_mm > 0.0)) fail("pitch_mm must be positive");
    if (!(fiber_angle_rad > 0.0 && fiber_angle_rad < kPi / 2.0))
        fail("fiber_angle must lie strictly between 0 and 90 degrees");
    if (winding_count < 1) fail("winding_count must be >= 1");
    if (!(chamber_height_mm > 0.0 &&
          chamber_height_mm <= outer_radius_mm - wall_thickness_mm))
        fail("chamber_height_mm must lie in (0, r - t]");
    if (!(part1_width_mm > 0.0 && part1_width_mm <= 2.0 * outer_radius_mm))
        fail("part1_width_mm must lie in (0, 2r]");
}

void MaterialModel::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("material: " + msg); };
    if (!(youngs_modulus_kpa > 0.0)) fail("youngs_modulus_kpa must be positive");
    if (!(poisson_ratio >= 0.0 && poisson_ratio <= 0.5))
        fail("poisson_ratio must lie in [0, 0.5]");
    if (!(correction_factor > 0.0)) fail("correction_factor must be positive");
}

Eigen::VectorXd EquilibriumState::to_vector() const {
    Eigen::VectorXd v(7);
    v << e11, e22, e33, k1, k2, q, phi;
    return v;
}

EquilibriumState EquilibriumState::from_vector(const Eigen::VectorXd& v) {
    if (v.size() != 7) throw std::invalid_argument("EquilibriumState: expected 7 components");
    return {v[0], v[1], v[2], v[3], v[4], v[6], v[5]};
}

bool EquilibriumState::is_zero() const {
    return e11 == 0.0 && e22 == 0.0 && e33 == 0.0 && k1 == 0.0 && k2 == 0.0 && phi == 0.0 &&
           q == 0.0;
}

double normalize_phi(double phi) {
    double wrapped = std::fmod(phi, kPi);
    if (wrapped < 0.0) wrapped += kPi;
    return wrapped;
}

const char* motion_mode_name(MotionMode mode) {
    switch (mode) {
        case MotionMode::Bending: return "bending";
        case MotionMode::Twisting: return "twisting";
        case MotionMode::Extension: return "extension";
    }
    return "unknown";
}

std::array<double, 3> strain_components(const EquilibriumState& state, double x3) {
    return {state.e11 + x3 * state.k1, state.e22 + x3 * state.k2, state.e33 + x3 * state.q};
}

std::pair<double, double> strain_invariants(double eps11, double eps22, double eps33) {
    return {eps11 + eps22 + eps33, eps11 * eps11 + eps22 * eps22 + eps33 * eps33};
}

double strain_energy_density(double j1, double j2, const MaterialModel& mat) {
    const double e = mat.youngs_modulus_kpa;
    const double v = mat.poisson_ratio;
    return 0.5 * e / (1.0 + v) * j2 + e * v * (1.0 - 2.0 * v) / (1.0 + v) * j1 * j1;
}

namespace {

double density_at(const ActuatorGeometry&, const MaterialModel& mat,
                  const EquilibriumState& state, double x3) {
    auto [s11, s22, s33] = strain_components(state, x3);
    auto [j1, j2] = strain_invariants(s11, s22, s33);
    return strain_energy_density(j1, j2, mat);
}

}  // namespace

double elastic_energy_part1(const ActuatorGeometry& geom, const MaterialModel& mat,
                            const EquilibriumState& state) {
    const double weight = geom.pitch_mm * geom.part1_width_mm / std::cos(geom.fiber_angle_rad);
    return weight * integrate_1d([&](double x3) { return density_at(geom, mat, state, x3); },
                                 0.0, geom.wall_thickness_mm);
}

double elastic_energy_part2(const ActuatorGeometry& geom, const MaterialModel& mat,
                            const EquilibriumState& state) {
    const double r = geom.outer_radius_mm;
    const double u0 = std::asin((r - geom.wall_thickness_mm) / r);
    // Substitution x3 = r*sin(u) keeps the integrand smooth at x3 = r where
    // the chord width 2*sqrt(r^2 - x3^2) vanishes with a square-root cusp.
    return geom.pitch_mm * integrate_1d(
                               [&](double u) {
                                   const double w = r * std::cos(u);
                                   return 2.0 * w * density_at(geom, mat, state, r * std::sin(u)) * w;
                               },
                               u0, kPi / 2.0);
}

double pressure_work(const ActuatorGeometry& geom, const MaterialModel& mat,
                     const EquilibriumState& state, double pressure_kpa) {
    const double s = std::sin(geom.fiber_angle_rad);
    if (std::abs(s) < 1e-12)
        throw DegenerateGeometryError("pressure work undefined at zero fiber angle");
    const double psi = geom.fiber_angle_rad - state.phi;
    const double sp = std::sin(psi), cp = std::cos(psi);
    const double bracket = state.e11 * sp * sp + state.e22 * cp * cp;
    return mat.correction_factor * pressure_kpa * geom.chamber_height_mm *
           (geom.part1_width_mm / s) * geom.pitch_mm * bracket;
}

double total_potential(const ActuatorGeometry& geom, const MaterialModel& mat,
                       const EquilibriumState& state, double pressure_kpa) {
    const double elastic = elastic_energy_part1(geom, mat, state) +
                           elastic_energy_part2(geom, mat, state);
    return (geom.winding_count + 1.0) *
           (elastic - pressure_work(geom, mat, state, pressure_kpa));
}

Eigen::VectorXd potential_gradient(const ActuatorGeometry& geom, const MaterialModel& mat,
                                   const EquilibriumState& state, double pressure_kpa) {
    return SectionModel(geom, mat).gradient(state.to_vector(), pressure_kpa);
}

Eigen::MatrixXd strain_block_hessian(const ActuatorGeometry& geom, const MaterialModel& mat) {
    return SectionModel(geom, mat).strain_hessian();
}

namespace {

// Stationarity residual in phi along the inner-solve manifold.
double reduced_phi_gradient(const SectionModel& model, const Eigen::LLT<Eigen::MatrixXd>& llt,
                            double pressure, double phi) {
    Eigen::VectorXd s = llt.solve(model.load(pressure, phi));
    const double psi = model.fiber_angle - phi;
    return -model.chambers * pressure * model.work_coeff * (s[1] - s[0]) *
           std::sin(2.0 * psi);
}

double reduced_potential(const ActuatorGeometry& geom, const MaterialModel& mat,
                         const SectionModel& model, const Eigen::LLT<Eigen::MatrixXd>& llt,
                         double pressure, double phi) {
    Eigen::VectorXd s = llt.solve(model.load(pressure, phi));
    Eigen::VectorXd x(7);
    x << s, phi;
    return potential_from_vector(geom, mat, x, pressure);
}

}  // namespace

EquilibriumState nested_equilibrium_estimate(const ActuatorGeometry& geom,
                                             const MaterialModel& mat, double pressure_kpa) {
    if (!(pressure_kpa >= 0.0))
        throw std::invalid_argument("nested_equilibrium_estimate: pressure must be >= 0");
    if (pressure_kpa == 0.0) return {};

    const SectionModel model(geom, mat);
    Eigen::MatrixXd hessian = model.strain_hessian();
    Eigen::LLT<Eigen::MatrixXd> llt(hessian);
    if (llt.info() != Eigen::Success)
        throw IllPosedModelError("strain-block Hessian is not positive definite");

    auto residual = [&](double phi) {
        return reduced_phi_gradient(model, llt, pressure_kpa, phi);
    };

    // 1-degree sign-change scan over [0, pi), then bisection.
    constexpr int kScanSteps = 180;
    std::vector<double> roots;
    double prev_phi = 0.0;
    double prev_val = residual(0.0);
    for (int i = 1; i <= kScanSteps; ++i) {
        const double phi = kPi * i / kScanSteps;
        const double val = residual(phi);
        if (prev_val == 0.0) {
            roots.push_back(prev_phi);
        } else if (prev_val * val < 0.0) {
            double lo = prev_phi, hi = phi, flo = prev_val;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = residual(mid);
                if (flo * fm <= 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
                if (hi - lo < 1e-15) break;
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev_phi = phi;
        prev_val = val;
    }
    if (roots.empty()) roots.push_back(model.fiber_angle);  // flat residual: load-aligned phase

    double best_phi = roots.front();
    double best_value = reduced_potential(geom, mat, model, llt, pressure_kpa, best_phi);
    for (size_t i = 1; i < roots.size(); ++i) {
        const double value = reduced_potential(geom, mat, model, llt, pressure_kpa, roots[i]);
        if (value < best_value - 1e-12 * std::max(1.0, std::abs(best_value))) {
            best_value = value;
            best_phi = roots[i];
        }
    }

    Eigen::VectorXd strains = llt.solve(model.load(pressure_kpa, best_phi));
    Eigen::VectorXd x(7);
    x << strains, normalize_phi(best_phi);
    return EquilibriumState::from_vector(x);
}

EquilibriumResult solve_equilibrium(const ActuatorGeometry& geom, const MaterialModel& mat,
                                    double pressure_kpa, const EquilibriumState& init,
                                    const SolverSettings& settings) {
    if (!(pressure_kpa >= 0.0))
        throw std::invalid_argument("solve_equilibrium: pressure must be >= 0");

    EquilibriumResult result;
    result.pre_loop = pressure_kpa < kLoopOnsetPressureKPa;
    if (pressure_kpa == 0.0) {
        result.state = {};
        result.scaled_residual = 0.0;
        result.iterations = 0;
        return result;
    }

    const SectionModel model(geom, mat);
    Eigen::LLT<Eigen::MatrixXd> llt(model.strain_hessian());
    if (llt.info() != Eigen::Success)
        throw IllPosedModelError("strain-block Hessian is not positive definite");

    auto grad = [&](const Eigen::VectorXd& x) { return model.gradient(x, pressure_kpa); };
    auto scaled_residual = [&](const Eigen::VectorXd& x) {
        const double res = grad(x).cwiseAbs().maxCoeff();
        return res / std::max(1.0, std::abs(potential_from_vector(geom, mat, x, pressure_kpa)));
    };

    const EquilibriumState seed_state =
        init.is_zero() ? nested_equilibrium_estimate(geom, mat, pressure_kpa) : init;
    Eigen::VectorXd seed = seed_state.to_vector();

    // Newton works on the raw gradient; its absolute tolerance is derived
    // from the requested residual scaled by the potential at the seed, then
    // tightened until the scaled criterion holds at the solution.
    double scale = std::max(1.0, std::abs(potential_from_vector(geom, mat, seed, pressure_kpa)));
    SolverSettings inner = settings;
    NewtonDiagnostics diag;
    Eigen::VectorXd solution;
    for (int attempt = 0; attempt < 4; ++attempt) {
        inner.gradient_tol = settings.gradient_tol * scale;
        solution = newton_stationary(grad, seed, inner, &diag);
        if (scaled_residual(solution) < settings.gradient_tol) break;
        scale *= 0.1;
        seed = solution;
        if (attempt == 3)
            throw SolverFailureError("solve_equilibrium: scaled residual not met", solution,
                                     diag.residual_inf, diag.iterations);
    }

    solution[6] = normalize_phi(solution[6]);
    result.state = EquilibriumState::from_vector(solution);
    result.scaled_residual = scaled_residual(solution);
    result.iterations = diag.iterations;
    return result;
}

double twist_radius(const EquilibriumState& state) {
    const double k1 = state.k1, k2 = state.k2;
    const double c2 = std::cos(2.0 * state.phi);
    const double numerator = k1 + k2 + (k1 - k2) * c2;
    const double denominator = k1 * k1 + k2 * k2 + (k1 - k2) * (k1 + k2) * c2;
    if (std::abs(denominator) < 1e-12)
        throw StraightConfigurationError("twist radius undefined: straight configuration");
    // The signed ratio encodes coiling handedness; the traced circle's
    // radius is its magnitude.
    return std::abs(numerator / denominator);
}

namespace {

TwistSample sample_from_solve(const ActuatorGeometry& geom, const MaterialModel& mat,
                              double pressure, const EquilibriumState& init,
                              const SolverSettings& settings, EquilibriumState* solved) {
    TwistSample sample;
    sample.pressure_kpa = pressure;
    sample.pre_loop = pressure < kLoopOnsetPressureKPa;
    try {
        EquilibriumResult res = solve_equilibrium(geom, mat, pressure, init, settings);
        sample.gradient_residual = res.scaled_residual;
        if (solved) *solved = res.state;
        try {
            sample.twist_radius_mm = twist_radius(res.state);
        } catch (const StraightConfigurationError&) {
            sample.twist_radius_mm = std::nullopt;
        }
    } catch (const SolverFailureError& failure) {
        sample.converged = false;
        sample.gradient_residual = failure.residual_inf();
    }
    return sample;
}

}  // namespace

TwistCurve predict_twist_curve(const ActuatorGeometry& geom, const MaterialModel& mat,
                               std::span<const double> pressures_kpa, SweepMode mode,
                               const SolverSettings& settings) {
    for (size_t i = 0; i < pressures_kpa.size(); ++i) {
        if (!(pressures_kpa[i] >= 0.0))
            throw std::invalid_argument("predict_twist_curve: pressures must be >= 0");
        if (i > 0 && !(pressures_kpa[i] > pressures_kpa[i - 1]))
            throw std::invalid_argument("predict_twist_curve: pressures must be strictly increasing");
    }

    TwistCurve curve;
    curve.samples.resize(pressures_kpa.size());

    if (mode == SweepMode::Continuation) {
        EquilibriumState warm;  // zero state: the first solve is cold
        for (size_t i = 0; i < pressures_kpa.size(); ++i) {
            EquilibriumState solved;
            curve.samples[i] = sample_from_solve(geom, mat, pressures_kpa[i], warm, settings,
                                                 &solved);
            if (curve.samples[i].converged) warm = solved;
        }
    } else {
        // Model-level problems (bad section, indefinite Hessian) would fail
        // every sample identically; surface them before going parallel.
        Eigen::LLT<Eigen::MatrixXd> llt(strain_block_hessian(geom, mat));
        if (llt.info() != Eigen::Success)
            throw IllPosedModelError("strain-block Hessian is not positive definite");

        const auto count = static_cast<std::ptrdiff_t>(pressures_kpa.size());
        std::exception_ptr first_error;
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            try {
                curve.samples[i] = sample_from_solve(geom, mat, pressures_kpa[i], {}, settings,
                                                     nullptr);
            } catch (...) {
#pragma omp critical
                if (!first_error) first_error = std::current_exception();
            }
        }
        if (first_error) std::rethrow_exception(first_error);
    }
    return curve;
}

StiffnessState stiffness_state(double temperature_c) {
    if (!std::isfinite(temperature_c))
        throw std::invalid_argument("stiffness_state: temperature must be finite");
    if (temperature_c <= 10.0) return StiffnessState::Stiff;
    if (temperature_c >= 28.0) return StiffnessState::Soft;
    return StiffnessState::Transition;
}

MotionMode motion_mode(double humofit1_temp_c, double humofit2_temp_c) {
    const StiffnessState s1 = stiffness_state(humofit1_temp_c);
    const StiffnessState s2 = stiffness_state(humofit2_temp_c);
    if (s1 == StiffnessState::Transition || s2 == StiffnessState::Transition)
        throw UndefinedConfigurationError(
            "motion mode undefined while an element is mid-transition (10-28 C)");
    if (s1 == StiffnessState::Stiff && s2 == StiffnessState::Stiff) return MotionMode::Bending;
    if (s1 == StiffnessState::Soft && s2 == StiffnessState::Stiff) return MotionMode::Twisting;
    if (s1 == StiffnessState::Stiff && s2 == StiffnessState::Soft) return MotionMode::Extension;
    throw UndefinedConfigurationError("motion mode undefined with both elements soft");
}

}  // namespace twistmodel
