#pragma once

// Hierarchical rollout: each agent alternates high-level station choices with
// low-level thrust steps on a shared 1 s calendar. Images are taken when an
// agent actually arrives, so agents move asynchronously.

#include "orbinspect/inspection_env.hpp"
#include "orbinspect/navigation.hpp"
#include "orbinspect/policy.hpp"

#include <array>
#include <string>
#include <vector>

namespace orbinspect::rollout {

struct RolloutConfig {
    double coverage_threshold = 0.83;
    int max_decisions = 100;  ///< per agent
    /// Calendar limit [s]; 0 means max_decisions half-orbit transfers.
    double calendar_timeout = 0.0;
    /// Hold arrived agents until all three have arrived, mirroring the
    /// high-level environment's lock-step decisions.
    bool synchronous = false;
    bool record_trajectory = false;
    double series_interval = 10.0;  ///< [s] between periodic time-series samples

    void validate() const;
};

enum class EventKind { Decision, Arrival, ArrivalFailure };

std::string_view to_string(EventKind kind);

struct RolloutEvent {
    double t = 0.0;
    std::size_t agent = 0;
    EventKind kind = EventKind::Decision;
    std::size_t from = 0;  ///< station departed from (or nearest, after a failure)
    std::size_t to = 0;
    double planned_arrival = 0.0;
    double delta_v_estimate = 0.0;  ///< impulsive estimate of the departure burn
    double transfer_fuel = 0.0;     ///< integrated fuel of the finished transfer
    double position_error = 0.0;    ///< distance to the goal at arrival or failure
    std::size_t new_points = 0;
    double coverage = 0.0;          ///< after this event
};

struct TrajectorySample {
    double t = 0.0;
    std::size_t agent = 0;
    orbit::HillState state;
    Vec3 thrust = Vec3::Zero();
};

/// Plot-ready sample: coverage, fuel and current targets over time.
struct SeriesSample {
    double t = 0.0;
    double coverage = 0.0;
    std::array<double, kAgentCount> delta_v{};  ///< cumulative per agent
    double total_delta_v = 0.0;
    std::array<std::size_t, kAgentCount> viewpoint{};  ///< current goal station
};

struct EpisodeRecord {
    std::uint64_t seed = 0;
    attitude::DynamicMode mode = attitude::DynamicMode::StaticHill;
    std::size_t point_count = 0;
    std::array<std::size_t, kAgentCount> start{};
    std::vector<RolloutEvent> events;
    std::vector<TrajectorySample> trajectory;
    std::vector<SeriesSample> series;
    std::array<std::vector<std::size_t>, kAgentCount> actions;
    std::array<double, kAgentCount> fuel{};  ///< sum |u| dt / m per agent
    std::array<std::size_t, kAgentCount> arrival_failures{};
    std::size_t seen = 0;
    double coverage = 0.0;
    double final_time = 0.0;
    bool reached_threshold = false;
    bool timed_out = false;
    /// Ledger after each synchronous round; filled only in synchronous mode.
    std::vector<geometry::PointMask> round_ledgers;
};

EpisodeRecord hierarchical_rollout(const env::InspectionEnv& env, const nav::ControllerConfig& controller,
                                   const RolloutConfig& config, std::vector<std::unique_ptr<policy::Policy>>& policies,
                                   std::uint64_t seed);

}  // namespace orbinspect::rollout
