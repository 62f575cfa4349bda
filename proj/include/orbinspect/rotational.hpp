#pragma once

// Torque-free rigid-body attitude of the target and its expression in
// Hill's frame. Quaternions follow the Eigen (w, x, y, z) convention and map
// body-frame vectors into the frame named after the underscore: q_bf_eci
// rotates body coordinates into ECI.

#include "orbinspect/common.hpp"
#include "orbinspect/orbital.hpp"

#include <optional>
#include <string_view>

namespace orbinspect::attitude {

using Quaternion = Eigen::Quaterniond;

struct InertiaDiag {
    double xx = 100.0;
    double yy = 50.0;
    double zz = 70.0;

    void validate() const;
    Vec3 diagonal() const { return {xx, yy, zz}; }
};

struct AttitudeState {
    Quaternion q_bf_eci = Quaternion::Identity();
    Vec3 omega_bf = Vec3::Zero();  ///< body rate [rad/s], body frame
};

enum class DynamicMode { StaticHill, StaticEci, SingleAxis, StableTumble, ChaoticTumble };

inline constexpr DynamicMode kAllModes[] = {DynamicMode::StaticHill, DynamicMode::StaticEci,
                                            DynamicMode::SingleAxis, DynamicMode::StableTumble,
                                            DynamicMode::ChaoticTumble};

/// Initial body rate of each mode; StaticHill spins at the orbital rate.
Vec3 preset_omega(DynamicMode mode, double mean_motion);
std::string_view to_string(DynamicMode mode);
std::optional<DynamicMode> parse_mode(std::string_view name);

/// Euler's torque-free equations, e.g. wx' = (Iyy - Izz) wy wz / Ixx.
Vec3 euler_derivative(const Vec3& omega, const InertiaDiag& inertia);

/// q' = 1/2 q (x) [0, omega], returned as (w, x, y, z).
Eigen::Vector4d quat_derivative(const Quaternion& q, const Vec3& omega);

/// Largest RK4 substep used by step_attitude by default [s].
inline constexpr double kDefaultAttitudeSubstep = 0.25;

/// Advances the coupled rate/quaternion system by `dt` with classical RK4,
/// split into equal substeps no longer than `max_substep`; the quaternion is
/// renormalized after every substep.
AttitudeState step_attitude(const AttitudeState& state, double dt, const InertiaDiag& inertia,
                            double max_substep = kDefaultAttitudeSubstep);

/// Coordinate rotation from ECI into Hill's frame: a turn of n*t about the
/// shared orbit normal, identity at t = 0 (i.e. Rz(-n t) acting on vectors).
Quaternion hill_from_eci(double t, const orbit::OrbitParams& params);

struct HillAttitude {
    Quaternion q_bf_hill;
    Vec3 omega_hill;  ///< body rate seen from Hill's frame, Hill coordinates
};

/// q_bf_hill = hill_from_eci(t) * q_bf_eci; omega_hill = R_hill_bf * omega_bf - (0, 0, n).
HillAttitude attitude_in_hill(const AttitudeState& state, double t, const orbit::OrbitParams& params);

/// Rotational kinetic energy 1/2 w^T I w.
double kinetic_energy(const Vec3& omega, const InertiaDiag& inertia);
/// Angular momentum magnitude |I w|.
double momentum_magnitude(const Vec3& omega, const InertiaDiag& inertia);

/// Lazily extended attitude history on a fixed grid. Queries between grid
/// points take one partial RK4 step from the preceding grid sample, so any
/// two queries at the same time return bit-identical states.
class AttitudeTimeline {
public:
    AttitudeTimeline(AttitudeState initial, InertiaDiag inertia, double dt = 1.0);

    AttitudeState at(double t);
    double step() const noexcept { return dt_; }
    const InertiaDiag& inertia() const noexcept { return inertia_; }

private:
    std::vector<AttitudeState> samples_;
    InertiaDiag inertia_;
    double dt_;
};

}  // namespace orbinspect::attitude
