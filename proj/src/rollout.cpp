#include "orbinspect/rollout.hpp"

#include "orbinspect/errors.hpp"

#include <cmath>
#include <optional>

namespace orbinspect::rollout {

void RolloutConfig::validate() const {
    if (!(coverage_threshold > 0.0 && coverage_threshold <= 1.0))
        throw ConfigError("rollout: coverage_threshold must lie in (0, 1]");
    if (max_decisions < 1) throw ConfigError("rollout: max_decisions must be at least 1");
    if (!(calendar_timeout >= 0.0)) throw ConfigError("rollout: calendar_timeout must be non-negative");
    if (!(series_interval > 0.0)) throw ConfigError("rollout: series_interval must be positive");
}

std::string_view to_string(EventKind kind) {
    switch (kind) {
        case EventKind::Decision: return "decision";
        case EventKind::Arrival: return "arrival";
        case EventKind::ArrivalFailure: return "arrival-failure";
    }
    return "unknown";
}

namespace {

struct AgentRun {
    orbit::HillState state;
    std::size_t station = 0;
    std::size_t goal = 0;
    std::optional<nav::TransferTracker> tracker;
    geometry::PointMask image;
    bool waiting = false;
    bool idle = false;
};

}  // namespace

EpisodeRecord hierarchical_rollout(const env::InspectionEnv& env, const nav::ControllerConfig& controller,
                                   const RolloutConfig& config, std::vector<std::unique_ptr<policy::Policy>>& policies,
                                   std::uint64_t seed) {
    config.validate();
    controller.validate();
    if (policies.size() != kAgentCount) throw ConfigError("rollout needs one policy per agent");

    const geometry::ViewpointSet& vps = env.viewpoints();
    const orbit::OrbitParams& params = env.config().orbit;
    const double dt = controller.control_dt;
    const double timeout =
        config.calendar_timeout > 0.0 ? config.calendar_timeout : config.max_decisions * 0.5 * params.period();

    EpisodeRecord rec;
    rec.seed = seed;
    rec.mode = env.config().dynamic_mode;
    rec.point_count = env.cloud().size();
    rec.start = env::draw_start_viewpoints(seed, vps.size());

    env::InspectionLedger ledger(env.cloud().size());
    std::array<AgentRun, kAgentCount> agents;
    for (std::size_t a = 0; a < kAgentCount; ++a) {
        agents[a].state = {vps[rec.start[a]], Vec3::Zero()};
        agents[a].station = rec.start[a];
        agents[a].goal = rec.start[a];
        agents[a].image = env.image(rec.start[a], 0.0);
        ledger.record(agents[a].image);
    }
    for (auto& p : policies) p->reset();

    double t = 0.0;
    auto coverage = [&] { return env::coverage_ratio(ledger); };

    auto decide = [&](std::size_t a) {
        AgentRun& ag = agents[a];
        if (rec.actions[a].size() >= static_cast<std::size_t>(config.max_decisions)) {
            ag.idle = true;
            return;
        }
        std::array<orbit::HillState, kAgentCount> visible;
        for (std::size_t b = 0; b < kAgentCount; ++b) visible[b] = agents[b].state;
        const env::AgentObservation obs = env.observe(visible, ag.image, t);
        policy::DecisionContext ctx;
        ctx.agent = a;
        ctx.observation = &obs;
        ctx.env = &env;
        ctx.query = {ag.station, ag.state.velocity, t, &ledger};
        const std::size_t target = policies[a]->act(ctx);
        if (target >= vps.size()) throw InvalidAction("policy chose station " + std::to_string(target));

        const double tof = orbit::transfer_tof(ag.station, target, vps, params);
        const nav::TransferCommand cmd{vps[target], t, t + tof};
        ag.tracker.emplace(ag.state, cmd, controller, params);
        ag.goal = target;
        rec.actions[a].push_back(target);

        RolloutEvent ev;
        ev.t = t;
        ev.agent = a;
        ev.kind = EventKind::Decision;
        ev.from = ag.station;
        ev.to = target;
        ev.planned_arrival = cmd.planned_arrival;
        ev.delta_v_estimate = orbit::transfer_delta_v(vps[ag.station], vps[target], ag.state.velocity, vps, params);
        ev.coverage = coverage();
        rec.events.push_back(ev);
    };

    auto sample_series = [&] {
        SeriesSample s;
        s.t = t;
        s.coverage = coverage();
        for (std::size_t a = 0; a < kAgentCount; ++a) {
            s.delta_v[a] = rec.fuel[a];
            s.total_delta_v += rec.fuel[a];
            s.viewpoint[a] = agents[a].goal;
        }
        rec.series.push_back(s);
    };

    auto all_settled = [&] {
        for (const AgentRun& ag : agents)
            if (ag.tracker && !ag.waiting) return false;
        return true;
    };

    auto start_round = [&] {
        for (std::size_t a = 0; a < kAgentCount; ++a) {
            agents[a].waiting = false;
            if (!agents[a].idle) decide(a);
        }
    };

    if (config.synchronous) rec.round_ledgers.push_back(ledger.seen());
    start_round();
    sample_series();
    double next_sample = config.series_interval;

    for (;;) {
        if (coverage() >= config.coverage_threshold) {
            rec.reached_threshold = true;
            break;
        }
        bool all_idle = true;
        for (const AgentRun& ag : agents) all_idle = all_idle && ag.idle;
        if (all_idle || t >= timeout) {
            rec.timed_out = true;
            break;
        }

        for (std::size_t a = 0; a < kAgentCount; ++a) {
            AgentRun& ag = agents[a];
            if (ag.waiting) continue;
            Vec3 thrust = Vec3::Zero();
            if (ag.tracker) {
                thrust = ag.tracker->advance().thrust.force;
                rec.fuel[a] += thrust.norm() * dt / params.agent_mass;
                if (config.record_trajectory) rec.trajectory.push_back({t, a, ag.state, thrust});
                ag.state = ag.tracker->state();
            } else {
                if (config.record_trajectory) rec.trajectory.push_back({t, a, ag.state, thrust});
                ag.state = orbit::propagate(ag.state, {}, dt, params);
            }
        }
        t += dt;

        bool event = false;
        for (std::size_t a = 0; a < kAgentCount; ++a) {
            AgentRun& ag = agents[a];
            if (!ag.tracker || ag.waiting) continue;
            const bool ok = ag.tracker->arrived();
            if (!ok && !ag.tracker->expired()) continue;

            RolloutEvent ev;
            ev.t = t;
            ev.agent = a;
            ev.from = ag.station;
            ev.to = ag.goal;
            ev.planned_arrival = ag.tracker->command().planned_arrival;
            ev.transfer_fuel = ag.tracker->fuel_used();
            ev.position_error = (ag.state.position - vps[ag.goal]).norm();
            if (ok) {
                ev.kind = EventKind::Arrival;
                ag.image = env.image(ag.goal, t);
                ev.new_points = ledger.record(ag.image);
                ag.station = ag.goal;
            } else {
                ev.kind = EventKind::ArrivalFailure;
                ++rec.arrival_failures[a];
                ag.station = vps.nearest(ag.state.position);
            }
            ev.coverage = coverage();
            rec.events.push_back(ev);
            ag.tracker.reset();
            event = true;

            if (config.synchronous) {
                ag.waiting = true;
            } else if (coverage() < config.coverage_threshold) {
                decide(a);
            }
        }

        if (config.synchronous && all_settled() && coverage() < config.coverage_threshold) {
            rec.round_ledgers.push_back(ledger.seen());
            start_round();
        }
        if (event || t >= next_sample) {
            sample_series();
            while (next_sample <= t) next_sample += config.series_interval;
        }
    }
    if (config.synchronous && rec.reached_threshold) rec.round_ledgers.push_back(ledger.seen());

    if (rec.series.empty() || rec.series.back().t != t) sample_series();
    rec.seen = ledger.count();
    rec.coverage = coverage();
    rec.final_time = t;
    return rec;
}

}  // namespace orbinspect::rollout
