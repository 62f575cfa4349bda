#include "orbinspect/harness.hpp"

#include "orbinspect/errors.hpp"

#include <atomic>
#include <cmath>
#include <optional>
#include <set>
#include <thread>

namespace orbinspect::harness {

EpisodeMetrics compute_metrics(const rollout::EpisodeRecord& record) {
    EpisodeMetrics m;
    m.inspection_pct = record.point_count ? 100.0 * double(record.seen) / double(record.point_count) : 0.0;
    m.sim_time = record.final_time;
    for (std::size_t a = 0; a < kAgentCount; ++a) {
        const auto& acts = record.actions[a];
        m.total_actions[a] = acts.size();
        m.unique_actions[a] = std::set<std::size_t>(acts.begin(), acts.end()).size();
        m.delta_v[a] = record.fuel[a];
        m.total_delta_v += record.fuel[a];
        m.arrival_failures += record.arrival_failures[a];
    }
    m.reached_threshold = record.reached_threshold;
    return m;
}

EpisodeRun run_episode(const env::InspectionEnv& env, const config::ExperimentConfig& config, std::uint64_t seed) {
    config.validate();
    auto policies = policy::make_policies(config.policy, seed, env.observation_size());
    EpisodeRun run;
    run.record = rollout::hierarchical_rollout(env, config.controller, config.rollout, policies, seed);
    run.metrics = compute_metrics(run.record);
    return run;
}

EpisodeRun run_episode(const config::ExperimentConfig& config, std::uint64_t seed) {
    config.validate();
    const env::InspectionEnv env(config.env, config.target.build());
    return run_episode(env, config, seed);
}

Stat summarize(const std::vector<double>& values) {
    Stat s;
    if (values.empty()) return s;
    for (double v : values) s.mean += v;
    s.mean /= double(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(ss / double(values.size() - 1));
    }
    return s;
}

BatchReport run_batch(const config::ExperimentConfig& base, const std::vector<attitude::DynamicMode>& modes,
                      const std::vector<std::uint64_t>& seeds, unsigned threads) {
    base.validate();
    if (modes.empty()) throw ConfigError("batch needs at least one mode");
    if (seeds.empty()) throw ConfigError("batch needs at least one seed");

    BatchReport report;
    report.fingerprint = config::fingerprint(base);
    report.policy = std::string(policy::to_string(base.policy.kind));
    report.seeds = seeds;

    const geometry::PointCloud cloud = base.target.build();
    std::vector<std::unique_ptr<env::InspectionEnv>> envs;
    for (attitude::DynamicMode mode : modes) {
        env::EnvConfig ec = base.env;
        ec.dynamic_mode = mode;
        envs.push_back(std::make_unique<env::InspectionEnv>(ec, cloud));
    }

    struct Slot {
        std::optional<EpisodeMetrics> metrics;
        std::string error;
    };
    const std::size_t jobs = modes.size() * seeds.size();
    std::vector<Slot> slots(jobs);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t j; (j = next.fetch_add(1)) < jobs;) {
            const std::size_t m = j / seeds.size();
            const std::size_t s = j % seeds.size();
            try {
                slots[j].metrics = run_episode(*envs[m], base, seeds[s]).metrics;
            } catch (const std::exception& e) {
                slots[j].error = e.what();
            }
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    for (std::size_t m = 0; m < modes.size(); ++m) {
        ModeSummary ms;
        ms.mode = modes[m];
        std::vector<double> pct, time, uniq, total, dv;
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            const Slot& slot = slots[m * seeds.size() + s];
            if (!slot.metrics) {
                ms.failures.push_back({seeds[s], slot.error});
                continue;
            }
            const EpisodeMetrics& e = *slot.metrics;
            ms.seeds.push_back(seeds[s]);
            ms.episodes.push_back(e);
            pct.push_back(e.inspection_pct);
            time.push_back(e.sim_time);
            dv.push_back(e.total_delta_v);
            for (std::size_t a = 0; a < kAgentCount; ++a) {
                uniq.push_back(double(e.unique_actions[a]));
                total.push_back(double(e.total_actions[a]));
            }
            if (e.reached_threshold) ++ms.reached;
        }
        ms.runs = ms.episodes.size();
        ms.inspection_pct = summarize(pct);
        ms.sim_time = summarize(time);
        ms.unique_actions = summarize(uniq);
        ms.total_actions = summarize(total);
        ms.total_delta_v = summarize(dv);
        report.modes.push_back(std::move(ms));
    }
    return report;
}

}  // namespace orbinspect::harness
