#pragma once

// Translational relative motion in Hill's frame (x radial, y along-track,
// z orbit normal). Units are meters, seconds and Newtons throughout.

#include "orbinspect/common.hpp"
#include "orbinspect/viewpoints.hpp"

#include <string>

namespace orbinspect::orbit {

struct OrbitParams {
    double mean_motion = 0.001027;    ///< n [rad/s]
    double orbital_radius_km = 7357.0;
    double agent_mass = 100.0;        ///< m [kg]

    void validate() const;
    double period() const;            ///< 2*pi/n [s]
    double orbital_radius_m() const { return orbital_radius_km * 1000.0; }
};

struct HillState {
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();

    Vec6 stacked() const;
    static HillState from_stacked(const Vec6& x);
};

struct ThrustCommand {
    Vec3 force = Vec3::Zero();
};

struct TransferSpec {
    Vec3 start = Vec3::Zero();
    Vec3 end = Vec3::Zero();
    double tof = 0.0;
};

/// Guard thresholds on the NMT denominators D = 8 - 3nT*S - 8C and S = sin(nT).
inline constexpr double kMinDenominatorD = 1e-6;
inline constexpr double kMinDenominatorS = 1e-6;

struct SingularityCheck {
    bool ok = false;
    double d = 0.0;
    double s = 0.0;
    std::string message;

    explicit operator bool() const noexcept { return ok; }
};

/// State derivative of the linearized CWH system.
Vec6 cwh_derivative(const HillState& state, const ThrustCommand& thrust, const OrbitParams& params);

/// Closed-form state transition matrix e^{A dt}.
Mat6 state_transition(double dt, double mean_motion);

/// Zero-order-hold input matrix: integral_0^dt e^{A s} ds * B, with B = [0; I/m].
Eigen::Matrix<double, 6, 3> thrust_input_matrix(double dt, const OrbitParams& params);

/// Exact discrete propagation under constant thrust over `dt`.
HillState propagate(const HillState& state, const ThrustCommand& thrust, double dt,
                    const OrbitParams& params);

SingularityCheck check_tof_singularity(const TransferSpec& spec, const OrbitParams& params);

/// Velocity at `start` that coasts onto `end` after `tof`. Throws SingularTransfer.
Vec3 nmt_initial_velocity(const TransferSpec& spec, const OrbitParams& params);

/// Arrival velocity at `end` of the same natural motion trajectory.
Vec3 nmt_final_velocity(const TransferSpec& spec, const OrbitParams& params);

/// High-level transfer time between two stations. Parking (v1 == v2) takes
/// half the smallest station-to-station angle over the whole set.
double transfer_tof(const Vec3& v1, const Vec3& v2, const geometry::ViewpointSet& viewpoints,
                    const OrbitParams& params);
double transfer_tof(std::size_t from, std::size_t to, const geometry::ViewpointSet& viewpoints,
                    const OrbitParams& params);

/// Instantaneous burn needed to enter the v1 -> v2 transfer given the current velocity.
double transfer_delta_v(const Vec3& v1, const Vec3& v2, const Vec3& current_velocity,
                        const geometry::ViewpointSet& viewpoints, const OrbitParams& params);

}  // namespace orbinspect::orbit
