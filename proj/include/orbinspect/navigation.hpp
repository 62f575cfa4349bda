#pragma once

// Low-level point-to-point navigation. Each control step picks the constant
// thrust that leaves the agent, one step later, exactly on the natural motion
// trajectory that still reaches the goal at the planned time.

#include "orbinspect/common.hpp"
#include "orbinspect/orbital.hpp"

#include <limits>
#include <vector>

namespace orbinspect::nav {

struct ControllerConfig {
    double arrival_radius = 0.35;   ///< epsilon [m]
    double arrival_window = 50.0;   ///< t-bar [s]
    double control_dt = 1.0;        ///< [s]
    double velocity_match_tolerance = 1e-6;  ///< [m/s]
    double thrust_tolerance = 1e-9;          ///< fixed-point stop on |u_k+1 - u_k| [N]
    int max_iterations = 50;
    /// Coast once fewer than this many control steps remain before arrival.
    int terminal_coast_steps = 2;
    /// Thrust magnitude clamp [N]; infinity disables it.
    double max_thrust = std::numeric_limits<double>::infinity();

    void validate() const;
};

struct TransferCommand {
    Vec3 goal = Vec3::Zero();
    double departure_time = 0.0;
    double planned_arrival = 0.0;

    void validate() const;
};

struct LowLevelObservation {
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
    Vec3 goal = Vec3::Zero();
    double remaining = 0.0;  ///< planned arrival minus now; negative when late

    static LowLevelObservation make(const orbit::HillState& state, const TransferCommand& command, double now);
    Eigen::Matrix<double, 10, 1> flat() const;
};

/// Initial velocity of the natural motion trajectory from `position` to
/// `goal` lasting `t_remaining`. Throws SingularTransfer near the guards.
Vec3 required_velocity(const Vec3& position, const Vec3& goal, double t_remaining,
                       const orbit::OrbitParams& params);

struct StepSolution {
    orbit::ThrustCommand thrust;
    int iterations = 0;
    double residual = 0.0;  ///< |v_post - v_required| [m/s]
    bool coast = false;
};

/// Thrust for [now, now + dt]. Coasts with zero thrust in the terminal
/// window. Throws NoConvergence when the iteration budget runs out.
StepSolution solve_step(const orbit::HillState& state, const TransferCommand& command, double now,
                        const ControllerConfig& config, const orbit::OrbitParams& params,
                        const Vec3& initial_guess = Vec3::Zero());

orbit::ThrustCommand solve_step_thrust(const orbit::HillState& state, const TransferCommand& command, double now,
                                       const ControllerConfig& config, const orbit::OrbitParams& params);

/// Success predicate: within epsilon of the goal and within t-bar of the plan.
bool arrived(const orbit::HillState& state, const TransferCommand& command, double now,
             const ControllerConfig& config);

struct TimedState {
    double t = 0.0;
    orbit::HillState state;
    Vec3 thrust = Vec3::Zero();  ///< applied over [t, t + dt]; zero on the final sample
};

/// Steps one transfer at a time; used directly by the rollout engine.
class TransferTracker {
public:
    TransferTracker(const orbit::HillState& start, const TransferCommand& command, const ControllerConfig& config,
                    const orbit::OrbitParams& params);

    /// Applies one control step and returns the thrust used.
    const StepSolution& advance();

    bool arrived() const;
    /// The plan's window has closed without arrival.
    bool expired() const;

    double now() const noexcept { return now_; }
    const orbit::HillState& state() const noexcept { return state_; }
    const TransferCommand& command() const noexcept { return command_; }
    double fuel_used() const noexcept { return fuel_; }
    int max_iterations_seen() const noexcept { return max_iterations_seen_; }
    double closest_distance() const noexcept { return closest_distance_; }
    double closest_time() const noexcept { return closest_time_; }
    double max_velocity_residual() const noexcept { return max_residual_; }

private:
    void note_distance();

    orbit::HillState state_;
    TransferCommand command_;
    ControllerConfig config_;
    orbit::OrbitParams params_;
    double now_;
    double fuel_ = 0.0;
    int max_iterations_seen_ = 0;
    double max_residual_ = 0.0;
    double closest_distance_;
    double closest_time_;
    StepSolution last_;
};

struct NavigationResult {
    std::vector<TimedState> trajectory;
    double fuel_used = 0.0;  ///< sum |u| dt / m [m/s]
    bool arrival_success = false;
    double arrival_time = 0.0;
    double final_error = 0.0;
    double closest_distance = 0.0;
    double closest_time = 0.0;
    int max_iterations = 0;
    double max_velocity_residual = 0.0;
};

/// Flies one transfer from `state` (at command.departure_time) until the
/// success predicate holds or the arrival window closes.
NavigationResult navigate(const orbit::HillState& state, const TransferCommand& command,
                          const ControllerConfig& config, const orbit::OrbitParams& params);

/// As navigate, but throws ArrivalFailure when the agent never arrives.
NavigationResult navigate_or_throw(const orbit::HillState& state, const TransferCommand& command,
                                   const ControllerConfig& config, const orbit::OrbitParams& params);

}  // namespace orbinspect::nav
