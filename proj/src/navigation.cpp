#include "orbinspect/navigation.hpp"

#include "orbinspect/errors.hpp"

#include <cmath>

namespace orbinspect::nav {

void ControllerConfig::validate() const {
    if (!(arrival_radius > 0.0)) throw ConfigError("controller: arrival_radius must be positive");
    if (!(arrival_window > 0.0)) throw ConfigError("controller: arrival_window must be positive");
    if (!(control_dt > 0.0)) throw ConfigError("controller: control_dt must be positive");
    if (!(velocity_match_tolerance > 0.0)) throw ConfigError("controller: velocity_match_tolerance must be positive");
    if (!(thrust_tolerance > 0.0)) throw ConfigError("controller: thrust_tolerance must be positive");
    if (max_iterations < 1) throw ConfigError("controller: max_iterations must be at least 1");
    if (terminal_coast_steps < 0) throw ConfigError("controller: terminal_coast_steps must be non-negative");
    if (!(max_thrust > 0.0)) throw ConfigError("controller: max_thrust must be positive");
}

void TransferCommand::validate() const {
    if (!goal.allFinite()) throw ConfigError("transfer command: goal must be finite");
    if (!(planned_arrival > departure_time)) throw ConfigError("transfer command: arrival must follow departure");
}

LowLevelObservation LowLevelObservation::make(const orbit::HillState& state, const TransferCommand& command,
                                              double now) {
    return {state.position, state.velocity, command.goal, command.planned_arrival - now};
}

Eigen::Matrix<double, 10, 1> LowLevelObservation::flat() const {
    Eigen::Matrix<double, 10, 1> v;
    v << position, velocity, goal, remaining;
    return v;
}

Vec3 required_velocity(const Vec3& position, const Vec3& goal, double t_remaining,
                       const orbit::OrbitParams& params) {
    return orbit::nmt_initial_velocity({position, goal, t_remaining}, params);
}

StepSolution solve_step(const orbit::HillState& state, const TransferCommand& command, double now,
                        const ControllerConfig& config, const orbit::OrbitParams& params,
                        const Vec3& initial_guess) {
    StepSolution sol;
    const double dt = config.control_dt;
    const double after = command.planned_arrival - now - dt;
    if (after < config.terminal_coast_steps * dt ||
        !orbit::check_tof_singularity({state.position, command.goal, after}, params)) {
        sol.coast = true;
        return sol;
    }

    const Vec6 drift = orbit::state_transition(dt, params.mean_motion) * state.stacked();
    const Eigen::Matrix<double, 6, 3> gamma = orbit::thrust_input_matrix(dt, params);
    const Mat3 gamma_v_inv = gamma.bottomRows<3>().inverse();

    auto required_after = [&](const Vec3& u) {
        const Vec6 x1 = drift + gamma * u;
        return required_velocity(x1.head<3>(), command.goal, after, params);
    };

    Vec3 u = initial_guess;
    for (int k = 1;; ++k) {
        const Vec3 next = gamma_v_inv * (required_after(u) - drift.tail<3>());
        const double change = (next - u).norm();
        u = next;
        sol.iterations = k;
        if (change < config.thrust_tolerance) break;
        if (k >= config.max_iterations) {
            const Vec6 x1 = drift + gamma * u;
            throw NoConvergence("thrust fixed point did not settle", (x1.tail<3>() - required_after(u)).norm());
        }
    }
    if (u.norm() > config.max_thrust) u *= config.max_thrust / u.norm();

    const Vec6 x1 = drift + gamma * u;
    sol.residual = (x1.tail<3>() - required_after(u)).norm();
    sol.thrust.force = u;
    return sol;
}

orbit::ThrustCommand solve_step_thrust(const orbit::HillState& state, const TransferCommand& command, double now,
                                       const ControllerConfig& config, const orbit::OrbitParams& params) {
    return solve_step(state, command, now, config, params).thrust;
}

bool arrived(const orbit::HillState& state, const TransferCommand& command, double now,
             const ControllerConfig& config) {
    return (state.position - command.goal).norm() <= config.arrival_radius &&
           std::abs(command.planned_arrival - now) <= config.arrival_window;
}

TransferTracker::TransferTracker(const orbit::HillState& start, const TransferCommand& command,
                                 const ControllerConfig& config, const orbit::OrbitParams& params)
    : state_(start), command_(command), config_(config), params_(params), now_(command.departure_time) {
    config_.validate();
    command_.validate();
    closest_distance_ = (state_.position - command_.goal).norm();
    closest_time_ = now_;
}

const StepSolution& TransferTracker::advance() {
    last_ = solve_step(state_, command_, now_, config_, params_, last_.thrust.force);
    state_ = orbit::propagate(state_, last_.thrust, config_.control_dt, params_);
    now_ += config_.control_dt;
    fuel_ += last_.thrust.force.norm() * config_.control_dt / params_.agent_mass;
    if (last_.iterations > max_iterations_seen_) max_iterations_seen_ = last_.iterations;
    if (!last_.coast && last_.residual > max_residual_) max_residual_ = last_.residual;
    note_distance();
    return last_;
}

void TransferTracker::note_distance() {
    const double d = (state_.position - command_.goal).norm();
    if (d < closest_distance_) {
        closest_distance_ = d;
        closest_time_ = now_;
    }
}

bool TransferTracker::arrived() const { return nav::arrived(state_, command_, now_, config_); }

bool TransferTracker::expired() const {
    return !arrived() && now_ > command_.planned_arrival + config_.arrival_window;
}

NavigationResult navigate(const orbit::HillState& state, const TransferCommand& command,
                          const ControllerConfig& config, const orbit::OrbitParams& params) {
    TransferTracker tracker(state, command, config, params);
    NavigationResult out;
    out.trajectory.push_back({tracker.now(), tracker.state(), Vec3::Zero()});
    while (!tracker.arrived() && !tracker.expired()) {
        const StepSolution& step = tracker.advance();
        out.trajectory.back().thrust = step.thrust.force;
        out.trajectory.push_back({tracker.now(), tracker.state(), Vec3::Zero()});
    }
    out.arrival_success = tracker.arrived();
    out.arrival_time = tracker.now();
    out.fuel_used = tracker.fuel_used();
    out.final_error = (tracker.state().position - command.goal).norm();
    out.closest_distance = tracker.closest_distance();
    out.closest_time = tracker.closest_time();
    out.max_iterations = tracker.max_iterations_seen();
    out.max_velocity_residual = tracker.max_velocity_residual();
    return out;
}

NavigationResult navigate_or_throw(const orbit::HillState& state, const TransferCommand& command,
                                   const ControllerConfig& config, const orbit::OrbitParams& params) {
    NavigationResult r = navigate(state, command, config, params);
    if (!r.arrival_success)
        throw ArrivalFailure("transfer missed its arrival window", r.closest_distance, r.closest_time);
    return r;
}

}  // namespace orbinspect::nav
