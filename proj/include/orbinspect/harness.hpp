#pragma once

// Episode and batch runners plus the summary metrics they report.

#include "orbinspect/config.hpp"
#include "orbinspect/rollout.hpp"

#include <string>
#include <vector>

namespace orbinspect::harness {

struct EpisodeMetrics {
    double inspection_pct = 0.0;
    double sim_time = 0.0;  ///< calendar time at termination [s], re-command time included
    std::array<std::size_t, kAgentCount> unique_actions{};
    std::array<std::size_t, kAgentCount> total_actions{};
    std::array<double, kAgentCount> delta_v{};  ///< integrated low-level fuel [m/s]
    double total_delta_v = 0.0;
    std::size_t arrival_failures = 0;
    bool reached_threshold = false;
};

EpisodeMetrics compute_metrics(const rollout::EpisodeRecord& record);

struct EpisodeRun {
    rollout::EpisodeRecord record;
    EpisodeMetrics metrics;
};

EpisodeRun run_episode(const env::InspectionEnv& env, const config::ExperimentConfig& config, std::uint64_t seed);
EpisodeRun run_episode(const config::ExperimentConfig& config, std::uint64_t seed);

struct Stat {
    double mean = 0.0;
    double stddev = 0.0;  ///< sample standard deviation; 0 for one run
};

Stat summarize(const std::vector<double>& values);

struct EpisodeFailure {
    std::uint64_t seed = 0;
    std::string message;
};

struct ModeSummary {
    attitude::DynamicMode mode = attitude::DynamicMode::StaticHill;
    std::size_t runs = 0;
    std::size_t reached = 0;
    Stat inspection_pct;
    Stat sim_time;
    Stat unique_actions;  ///< per agent, pooled over agents
    Stat total_actions;
    Stat total_delta_v;
    std::vector<std::uint64_t> seeds;      ///< seeds that completed, in input order
    std::vector<EpisodeMetrics> episodes;  ///< aligned with `seeds`
    std::vector<EpisodeFailure> failures;
};

struct BatchReport {
    std::string fingerprint;
    std::string policy;
    std::vector<std::uint64_t> seeds;
    std::vector<ModeSummary> modes;
};

/// Runs every (mode, seed) pair on a worker pool. Results do not depend on
/// scheduling. `threads` = 0 picks the hardware concurrency.
BatchReport run_batch(const config::ExperimentConfig& base, const std::vector<attitude::DynamicMode>& modes,
                      const std::vector<std::uint64_t>& seeds, unsigned threads = 0);

}  // namespace orbinspect::harness
