#pragma once

// High-level multi-agent inspection environment: three agents hop between
// lattice viewpoints, each arrival produces an image of the target, and the
// shared ledger records which points have been seen.

#include "orbinspect/common.hpp"
#include "orbinspect/orbital.hpp"
#include "orbinspect/point_cloud.hpp"
#include "orbinspect/rotational.hpp"
#include "orbinspect/viewpoints.hpp"
#include "orbinspect/visibility.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>

namespace orbinspect::env {

struct EnvConfig {
    double alpha = 2.0;
    double beta = 1.0;
    double r0 = 0.0;
    double coverage_threshold = 0.85;  ///< M
    double gamma = 0.95;               ///< advisory, consumed by external training
    /// Multiplies beta*dV in the reward; -1 penalizes fuel.
    double fuel_sign = -1.0;
    std::size_t viewpoint_count = 20;
    double viewpoint_radius = 200.0;
    int max_joint_steps = 100;
    attitude::DynamicMode dynamic_mode = attitude::DynamicMode::StaticHill;
    orbit::OrbitParams orbit;
    attitude::InertiaDiag inertia;
    geometry::CameraModel camera;
    std::uint64_t seed = 0;

    void validate() const;
};

class InspectionLedger {
public:
    InspectionLedger() = default;
    explicit InspectionLedger(std::size_t size) : seen_(size) {}

    std::size_t size() const noexcept { return seen_.size(); }
    std::size_t count() const noexcept { return count_; }
    const geometry::PointMask& seen() const noexcept { return seen_; }

    /// ORs `image` into the ledger and returns the number of newly set bits.
    std::size_t record(const geometry::PointMask& image);

    friend bool operator==(const InspectionLedger&, const InspectionLedger&) = default;

private:
    geometry::PointMask seen_;
    std::size_t count_ = 0;
};

struct InfoGain {
    std::size_t new_count = 0;
    std::size_t remaining_before = 0;
};

/// new_count = |image & ~ledger|, remaining_before = |P| - |ledger|.
InfoGain info_gain(const InspectionLedger& ledger_before, const geometry::PointMask& image);
double coverage_ratio(const InspectionLedger& ledger);

/// Information term of the arrival reward: alpha * new / remaining, or 0
/// when nothing remains.
double info_reward(const InfoGain& gain, double alpha);

/// Flat observation vector; see ObservationLayout for the field offsets.
using AgentObservation = Eigen::VectorXd;

struct ObservationLayout {
    static constexpr std::size_t kPositions = 0;   ///< 3 agents x (x, y, z), agent-index order
    static constexpr std::size_t kVelocities = 9;  ///< 3 agents x (vx, vy, vz)
    static constexpr std::size_t kQuaternion = 18; ///< q_bf_hill as (w, x, y, z)
    static constexpr std::size_t kOmega = 22;      ///< Hill-frame body rate
    static constexpr std::size_t kMask = 25;       ///< own current image, one entry per point
    static std::size_t time_offset(std::size_t points) { return kMask + points; }
    static std::size_t size(std::size_t points) { return 26 + points; }
};

using JointAction = std::array<std::size_t, kAgentCount>;

struct JointState {
    std::array<orbit::HillState, kAgentCount> agents;
    std::array<std::size_t, kAgentCount> viewpoint{};  ///< station each agent sits at
    std::array<double, kAgentCount> arrival_time{};    ///< t_{i,k}
    attitude::AttitudeState attitude;                   ///< target attitude at `time`
    InspectionLedger ledger;
    double time = 0.0;  ///< t_k
    int step_count = 0;
    bool done = false;
};

struct ArrivalInfo {
    std::size_t from = 0;
    std::size_t to = 0;
    double tof = 0.0;
    double arrival_time = 0.0;
    double delta_v = 0.0;
    std::size_t new_points = 0;
    std::size_t remaining_before = 0;
    double info_term = 0.0;
    double reward = 0.0;
    bool gated = false;  ///< arrived after coverage had reached the threshold
};

struct StepInfo {
    std::array<ArrivalInfo, kAgentCount> arrivals;
    std::array<std::size_t, kAgentCount> order{};  ///< agent indices in processing order
    double coverage = 0.0;
    double joint_reward = 0.0;
};

struct ResetResult {
    JointState state;
    std::array<AgentObservation, kAgentCount> observations;
};

struct StepResult {
    JointState state;
    std::array<AgentObservation, kAgentCount> observations;
    std::array<double, kAgentCount> rewards{};
    bool done = false;
    StepInfo info;
};

/// Three distinct start stations drawn uniformly from the lattice.
std::array<std::size_t, kAgentCount> draw_start_viewpoints(std::uint64_t seed, std::size_t viewpoint_count);

/// Shared, lazily extended attitude history for one target mode. Safe to
/// query from several threads.
class TargetAttitude {
public:
    TargetAttitude(const attitude::AttitudeState& initial, const attitude::InertiaDiag& inertia,
                   const orbit::OrbitParams& orbit);

    attitude::AttitudeState at(double t) const;
    attitude::HillAttitude in_hill(double t) const;
    const attitude::AttitudeState& initial() const noexcept { return initial_; }

private:
    attitude::AttitudeState initial_;
    orbit::OrbitParams orbit_;
    mutable attitude::AttitudeTimeline timeline_;
    mutable std::mutex mutex_;
};

/// Everything needed to score a candidate station for one agent.
struct CandidateQuery {
    std::size_t from = 0;          ///< station the agent departs from
    Vec3 velocity = Vec3::Zero();  ///< agent velocity before the burn
    double now = 0.0;
    const InspectionLedger* ledger = nullptr;
};

struct CandidatePrediction {
    double tof = 0.0;
    double delta_v = 0.0;
    InfoGain gain;
    double reward = 0.0;
};

class InspectionEnv {
public:
    InspectionEnv(EnvConfig config, geometry::PointCloud cloud);

    ResetResult reset(std::uint64_t seed) const;
    StepResult step_joint(const JointState& state, const JointAction& action) const;

    /// Ungated one-step reward for flying to `candidate`, ignoring the other
    /// agents' concurrent arrivals and the coverage threshold.
    CandidatePrediction predict(const CandidateQuery& query, std::size_t candidate) const;

    /// Image from `station` at calendar time `t`.
    geometry::PointMask image(std::size_t station, double t) const;

    const EnvConfig& config() const noexcept { return config_; }
    const geometry::PointCloud& cloud() const noexcept { return cloud_; }
    const geometry::ViewpointSet& viewpoints() const noexcept { return viewpoints_; }
    const TargetAttitude& target() const noexcept { return *target_; }
    std::size_t observation_size() const noexcept { return ObservationLayout::size(cloud_.size()); }

    /// Assembles an observation from the agent states it may see, its own
    /// image and the time stamp.
    AgentObservation observe(const std::array<orbit::HillState, kAgentCount>& visible_states,
                             const geometry::PointMask& image, double t) const;

private:
    EnvConfig config_;
    geometry::PointCloud cloud_;
    geometry::ViewpointSet viewpoints_;
    std::shared_ptr<TargetAttitude> target_;
};

}  // namespace orbinspect::env
