#include "orbinspect/inspection_env.hpp"

#include "orbinspect/errors.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace orbinspect::env {

void EnvConfig::validate() const {
    if (!(coverage_threshold > 0.0 && coverage_threshold <= 1.0))
        throw ConfigError("env: coverage_threshold must lie in (0, 1]");
    if (!(alpha >= 0.0) || !(beta >= 0.0)) throw ConfigError("env: alpha and beta must be non-negative");
    if (!std::isfinite(r0) || !std::isfinite(fuel_sign)) throw ConfigError("env: r0 and fuel_sign must be finite");
    if (viewpoint_count < kAgentCount) throw ConfigError("env: need at least one viewpoint per agent");
    if (!(viewpoint_radius > 0.0)) throw ConfigError("env: viewpoint_radius must be positive");
    if (max_joint_steps < 1) throw ConfigError("env: max_joint_steps must be at least 1");
    orbit.validate();
    inertia.validate();
    camera.validate();
}

std::size_t InspectionLedger::record(const geometry::PointMask& image) {
    const std::size_t added = image.count_and_not(seen_);
    seen_ |= image;
    count_ += added;
    return added;
}

InfoGain info_gain(const InspectionLedger& ledger_before, const geometry::PointMask& image) {
    return {image.count_and_not(ledger_before.seen()), ledger_before.size() - ledger_before.count()};
}

double coverage_ratio(const InspectionLedger& ledger) {
    if (ledger.size() == 0) return 0.0;
    return static_cast<double>(ledger.count()) / static_cast<double>(ledger.size());
}

double info_reward(const InfoGain& gain, double alpha) {
    if (gain.remaining_before == 0) return 0.0;
    return alpha * static_cast<double>(gain.new_count) / static_cast<double>(gain.remaining_before);
}

std::array<std::size_t, kAgentCount> draw_start_viewpoints(std::uint64_t seed, std::size_t viewpoint_count) {
    if (viewpoint_count < kAgentCount) throw ConfigError("need at least one viewpoint per agent");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, viewpoint_count - 1);
    std::array<std::size_t, kAgentCount> out{};
    for (std::size_t i = 0; i < kAgentCount; ++i) {
        std::size_t v;
        do {
            v = pick(rng);
        } while (std::find(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(i), v) !=
                 out.begin() + static_cast<std::ptrdiff_t>(i));
        out[i] = v;
    }
    return out;
}

TargetAttitude::TargetAttitude(const attitude::AttitudeState& initial, const attitude::InertiaDiag& inertia,
                               const orbit::OrbitParams& orbit)
    : initial_(initial), orbit_(orbit), timeline_(initial, inertia, 1.0) {}

attitude::AttitudeState TargetAttitude::at(double t) const {
    std::lock_guard lock(mutex_);
    return timeline_.at(t);
}

attitude::HillAttitude TargetAttitude::in_hill(double t) const {
    return attitude::attitude_in_hill(at(t), t, orbit_);
}

InspectionEnv::InspectionEnv(EnvConfig config, geometry::PointCloud cloud)
    : config_(std::move(config)), cloud_(std::move(cloud)) {
    config_.validate();
    cloud_.validate();
    viewpoints_ = geometry::fibonacci_viewpoints(config_.viewpoint_count, config_.viewpoint_radius);
    attitude::AttitudeState initial;
    initial.omega_bf = attitude::preset_omega(config_.dynamic_mode, config_.orbit.mean_motion);
    target_ = std::make_shared<TargetAttitude>(initial, config_.inertia, config_.orbit);
}

geometry::PointMask InspectionEnv::image(std::size_t station, double t) const {
    const attitude::HillAttitude att = target_->in_hill(t);
    return geometry::visible_points(cloud_, att.q_bf_hill, viewpoints_.at(station), config_.camera);
}

AgentObservation InspectionEnv::observe(const std::array<orbit::HillState, kAgentCount>& visible_states,
                                        const geometry::PointMask& image, double t) const {
    using L = ObservationLayout;
    const std::size_t n = cloud_.size();
    AgentObservation obs = AgentObservation::Zero(static_cast<Eigen::Index>(L::size(n)));
    for (std::size_t a = 0; a < kAgentCount; ++a) {
        obs.segment<3>(static_cast<Eigen::Index>(L::kPositions + 3 * a)) = visible_states[a].position;
        obs.segment<3>(static_cast<Eigen::Index>(L::kVelocities + 3 * a)) = visible_states[a].velocity;
    }
    const attitude::HillAttitude att = target_->in_hill(t);
    const auto& q = att.q_bf_hill;
    obs.segment<4>(L::kQuaternion) << q.w(), q.x(), q.y(), q.z();
    obs.segment<3>(L::kOmega) = att.omega_hill;
    for (std::size_t i = 0; i < n; ++i)
        if (image.test(i)) obs[static_cast<Eigen::Index>(L::kMask + i)] = 1.0;
    obs[static_cast<Eigen::Index>(L::time_offset(n))] = t;
    return obs;
}

ResetResult InspectionEnv::reset(std::uint64_t seed) const {
    ResetResult out;
    JointState& s = out.state;
    s.viewpoint = draw_start_viewpoints(seed, viewpoints_.size());
    s.ledger = InspectionLedger(cloud_.size());
    s.attitude = target_->initial();
    std::array<geometry::PointMask, kAgentCount> images;
    for (std::size_t a = 0; a < kAgentCount; ++a) {
        s.agents[a].position = viewpoints_[s.viewpoint[a]];
        s.agents[a].velocity = Vec3::Zero();
        images[a] = image(s.viewpoint[a], 0.0);
        s.ledger.record(images[a]);
    }
    for (std::size_t a = 0; a < kAgentCount; ++a) out.observations[a] = observe(s.agents, images[a], 0.0);
    return out;
}

CandidatePrediction InspectionEnv::predict(const CandidateQuery& query, std::size_t candidate) const {
    if (candidate >= viewpoints_.size()) throw InvalidAction("candidate viewpoint out of range");
    if (query.ledger == nullptr) throw ConfigError("candidate query needs a ledger");
    CandidatePrediction p;
    const Vec3& v1 = viewpoints_.at(query.from);
    const Vec3& v2 = viewpoints_[candidate];
    p.tof = orbit::transfer_tof(v1, v2, viewpoints_, config_.orbit);
    p.delta_v = orbit::transfer_delta_v(v1, v2, query.velocity, viewpoints_, config_.orbit);
    p.gain = info_gain(*query.ledger, image(candidate, query.now + p.tof));
    p.reward = info_reward(p.gain, config_.alpha) + config_.fuel_sign * config_.beta * p.delta_v + config_.r0;
    return p;
}

StepResult InspectionEnv::step_joint(const JointState& state, const JointAction& action) const {
    if (state.done) throw EpisodeDone("step_joint called on a finished episode");
    for (std::size_t a : action)
        if (a >= viewpoints_.size()) throw InvalidAction("viewpoint index " + std::to_string(a) + " out of range");

    StepResult out;
    JointState& next = out.state;
    next = state;
    StepInfo& info = out.info;

    for (std::size_t a = 0; a < kAgentCount; ++a) {
        ArrivalInfo& ai = info.arrivals[a];
        ai.from = state.viewpoint[a];
        ai.to = action[a];
        const Vec3& v1 = viewpoints_[ai.from];
        const Vec3& v2 = viewpoints_[ai.to];
        ai.tof = orbit::transfer_tof(v1, v2, viewpoints_, config_.orbit);
        ai.arrival_time = state.time + ai.tof;
        ai.delta_v = orbit::transfer_delta_v(v1, v2, state.agents[a].velocity, viewpoints_, config_.orbit);
    }

    std::iota(info.order.begin(), info.order.end(), std::size_t{0});
    std::stable_sort(info.order.begin(), info.order.end(), [&](std::size_t l, std::size_t r) {
        return info.arrivals[l].arrival_time < info.arrivals[r].arrival_time;
    });

    std::array<geometry::PointMask, kAgentCount> images;
    for (std::size_t a : info.order) {
        ArrivalInfo& ai = info.arrivals[a];
        images[a] = image(ai.to, ai.arrival_time);
        const InfoGain gain = info_gain(next.ledger, images[a]);
        ai.remaining_before = gain.remaining_before;
        ai.gated = coverage_ratio(next.ledger) >= config_.coverage_threshold;
        if (ai.gated || gain.remaining_before == 0) {
            ai.reward = config_.r0;
        } else {
            ai.info_term = info_reward(gain, config_.alpha);
            ai.reward = ai.info_term + config_.fuel_sign * config_.beta * ai.delta_v + config_.r0;
        }
        ai.new_points = next.ledger.record(images[a]);
        out.rewards[a] = ai.reward;
        info.joint_reward += ai.reward;
    }

    double t_next = state.time;
    for (std::size_t a = 0; a < kAgentCount; ++a) {
        const ArrivalInfo& ai = info.arrivals[a];
        const orbit::TransferSpec spec{viewpoints_[ai.from], viewpoints_[ai.to], ai.tof};
        next.agents[a].position = viewpoints_[ai.to];
        next.agents[a].velocity = orbit::nmt_final_velocity(spec, config_.orbit);
        next.viewpoint[a] = ai.to;
        next.arrival_time[a] = ai.arrival_time;
        t_next = std::max(t_next, ai.arrival_time);
    }
    next.time = t_next;
    next.attitude = target_->at(t_next);
    next.step_count = state.step_count + 1;
    info.coverage = coverage_ratio(next.ledger);
    next.done = info.coverage >= config_.coverage_threshold || next.step_count >= config_.max_joint_steps;
    out.done = next.done;

    // Each agent sees its own fresh state and the others as of the previous joint step.
    for (std::size_t a = 0; a < kAgentCount; ++a) {
        std::array<orbit::HillState, kAgentCount> visible = state.agents;
        visible[a] = next.agents[a];
        out.observations[a] = observe(visible, images[a], info.arrivals[a].arrival_time);
    }
    return out;
}

}  // namespace orbinspect::env
