#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "twistmodel/errors.hpp"
#include "twistmodel/numerics.hpp"

namespace twistmodel {

/// Physical description of the semi-circular, fiber-reinforced actuator.
/// Lengths in mm, angles in radians.
struct ActuatorGeometry {
    double length_mm = 170.0;
    double outer_radius_mm = 12.0;     // r
    double wall_thickness_mm = 3.0;    // t
    double pitch_mm = 4.0;             // p, axial spacing of the winding
    double fiber_angle_rad = 5.0 * (3.14159265358979323846 / 180.0);
    int winding_count = 42;            // n
    double chamber_height_mm = 9.0;    // h1
    double part1_width_mm = 24.0;      // W, width of the flat wall

    /// Throws ConfigError on any violated parameter constraint.
    void validate() const;
};

/// Elastic constants of the cast elastomer plus the pressure-work
/// correction factor. Stresses in kPa.
struct MaterialModel {
    double youngs_modulus_kpa = 125.0;
    double poisson_ratio = 0.5;
    double correction_factor = 0.003;

    void validate() const;
};

/// The seven unknowns of the stationarity system: mid-surface strains,
/// curvatures (1/mm), the strain gradient q along the wall normal (1/mm)
/// and the phase angle phi (radians, reduced to [0, pi)).
struct EquilibriumState {
    double e11 = 0.0;
    double e22 = 0.0;
    double e33 = 0.0;
    double k1 = 0.0;
    double k2 = 0.0;
    double phi = 0.0;
    double q = 0.0;

    /// Packs as (e11, e22, e33, k1, k2, q, phi); the six quadratic
    /// variables lead, phi last. All vector-valued interfaces use this
    /// order.
    Eigen::VectorXd to_vector() const;
    static EquilibriumState from_vector(const Eigen::VectorXd& v);

    bool is_zero() const;
};

/// Wraps an angle into [0, pi). The potential depends on phi only through
/// pi-periodic terms.
double normalize_phi(double phi);

enum class StiffnessState { Stiff, Transition, Soft };
enum class MotionMode { Bending, Twisting, Extension };

const char* motion_mode_name(MotionMode mode);  // "bending" | "twisting" | "extension"

struct EquilibriumResult {
    EquilibriumState state;
    double scaled_residual = 0.0;  // ||grad||_inf / max(1, |potential|)
    int iterations = 0;
    bool pre_loop = false;         // pressure below the visible-loop onset
};

struct TwistSample {
    double pressure_kpa = 0.0;
    std::optional<double> twist_radius_mm;  // absent when straight or failed
    double gradient_residual = 0.0;
    bool pre_loop = false;
    bool converged = true;
};

struct TwistCurve {
    std::vector<TwistSample> samples;
};

enum class SweepMode {
    Continuation,       // serial, warm-started from the previous pressure
    ParallelColdStart,  // one independent cold-started solve per sample
};

/// Pressure below which the actuator has not yet closed into a visible
/// loop; samples under it are flagged rather than rejected.
inline constexpr double kLoopOnsetPressureKPa = 18.0;

/// Principal strain components at wall height x3 (mm):
/// (e11 + x3*k1, e22 + x3*k2, e33 + x3*q).
std::array<double, 3> strain_components(const EquilibriumState& state, double x3);

/// J1 = sum of components, J2 = sum of squares.
std::pair<double, double> strain_invariants(double eps11, double eps22, double eps33);

/// Strain energy density (kPa = energy per mm^3 in the kPa-mm system):
/// 0.5*E/(1+v)*J2 + E*v*(1-2v)/(1+v)*J1^2.
double strain_energy_density(double j1, double j2, const MaterialModel& mat);

/// Elastic energy stored per chamber in the flat wall (part 1):
/// pitch * W/cos(theta) * integral of the energy density over [0, t].
double elastic_energy_part1(const ActuatorGeometry& geom, const MaterialModel& mat,
                            const EquilibriumState& state);

/// Elastic energy stored per chamber in the curved shell (part 2):
/// pitch * integral over [r-t, r] of the density times the local width
/// 2*sqrt(r^2 - x3^2).
double elastic_energy_part2(const ActuatorGeometry& geom, const MaterialModel& mat,
                            const EquilibriumState& state);

/// Work done by pressure P (kPa) in one chamber via its volume change;
/// strains are taken at the mid-surface x3 = 0. Throws
/// DegenerateGeometryError when the fiber angle is (numerically) zero.
double pressure_work(const ActuatorGeometry& geom, const MaterialModel& mat,
                     const EquilibriumState& state, double pressure_kpa);

/// Total potential of the (n+1)-chamber actuator:
/// (n+1) * (elastic part1 + elastic part2 - pressure work).
double total_potential(const ActuatorGeometry& geom, const MaterialModel& mat,
                       const EquilibriumState& state, double pressure_kpa);

/// Analytic gradient of the total potential in the packed state order
/// (e11, e22, e33, k1, k2, q, phi).
Eigen::VectorXd potential_gradient(const ActuatorGeometry& geom, const MaterialModel& mat,
                                   const EquilibriumState& state, double pressure_kpa);

/// Hessian of the potential restricted to the six quadratic variables.
/// Constant in the state; must be SPD for the model to be well posed.
Eigen::MatrixXd strain_block_hessian(const ActuatorGeometry& geom, const MaterialModel& mat);

/// Deterministic global seed: for fixed phi the potential is quadratic in
/// the six strain variables (direct symmetric solve); the stationary phi is
/// located by a 1-degree sign-change scan of dPi/dphi over [0, pi) plus
/// bisection, and the scan root with the lowest potential wins.
EquilibriumState nested_equilibrium_estimate(const ActuatorGeometry& geom,
                                             const MaterialModel& mat, double pressure_kpa);

/// Full equilibrium solve: seeds damped Newton on all seven variables from
/// `init` when nonzero (warm start) or from the nested estimate otherwise.
/// The accepted state satisfies ||grad||_inf < tol * max(1, |potential|)
/// and an SPD strain-block Hessian (else IllPosedModelError).
EquilibriumResult solve_equilibrium(const ActuatorGeometry& geom, const MaterialModel& mat,
                                    double pressure_kpa, const EquilibriumState& init = {},
                                    const SolverSettings& settings = {});

/// Radius (mm) of the circle the tip traces in top view, from the
/// curvature state. The underlying signed expression encodes handedness;
/// the traced circle's radius is its magnitude. Throws
/// StraightConfigurationError when the configuration has no finite radius.
double twist_radius(const EquilibriumState& state);

/// Evaluates the pressure -> twist radius curve over strictly increasing
/// pressures. Continuation warm-starts each solve from the previous
/// solution; ParallelColdStart solves every sample independently (OpenMP).
/// Per-sample solver failures are recorded in the sample, not thrown.
TwistCurve predict_twist_curve(const ActuatorGeometry& geom, const MaterialModel& mat,
                               std::span<const double> pressures_kpa,
                               SweepMode mode = SweepMode::Continuation,
                               const SolverSettings& settings = {});

/// Stiff at or below 10 C, Soft at or above 28 C, Transition between.
StiffnessState stiffness_state(double temperature_c);

/// Motion mode from the two reinforcing-element temperatures. Only the
/// three produced configurations are defined; anything else (both soft, or
/// either element mid-transition) throws UndefinedConfigurationError.
MotionMode motion_mode(double humofit1_temp_c, double humofit2_temp_c);

}  // namespace twistmodel
