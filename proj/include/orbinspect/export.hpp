#pragma once

// File writers for batch reports, episode records and environment traces.
//
// CSV files start with a "# orbinspect <kind> csv v<N>" comment line followed
// by a header row. JSON-lines files hold one object per line with a "type" key.

#include "orbinspect/harness.hpp"
#include "orbinspect/inspection_env.hpp"
#include "orbinspect/rollout.hpp"

#include <filesystem>
#include <ostream>
#include <vector>

namespace orbinspect::io {

inline constexpr int kCsvSchemaVersion = 1;

enum class Format { Csv, JsonLines };

/// Per-mode means and standard deviations.
void write_batch_summary_csv(const harness::BatchReport& report, std::ostream& out);
/// One row per completed episode.
void write_batch_episodes_csv(const harness::BatchReport& report, std::ostream& out);
/// Time series of coverage, cumulative fuel and current goal stations.
void write_series_csv(const rollout::EpisodeRecord& record, std::ostream& out);
/// Events, then trajectory samples when recorded, then a summary line.
void write_record_jsonl(const rollout::EpisodeRecord& record, std::ostream& out);
/// Summary line followed by one line per (mode, episode).
void write_batch_jsonl(const harness::BatchReport& report, std::ostream& out);

/// High-level environment trace: one line per agent arrival.
struct EnvTraceStep {
    int step = 0;
    env::StepInfo info;
};
void write_env_trace_jsonl(const std::vector<EnvTraceStep>& steps, std::ostream& out);

/// Writes `report` to `path` in the given format (csv: per-episode table).
void export_report(const harness::BatchReport& report, Format format, const std::filesystem::path& path);
/// Writes `record` to `path` (csv: time series).
void export_record(const rollout::EpisodeRecord& record, Format format, const std::filesystem::path& path);

}  // namespace orbinspect::io
