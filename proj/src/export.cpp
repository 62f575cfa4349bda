#include "orbinspect/export.hpp"

#include "orbinspect/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>

namespace orbinspect::io {
namespace {

using nlohmann::json;

json vec3(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

template <class T, std::size_t N>
json arr(const std::array<T, N>& a) {
    json out = json::array();
    for (const T& v : a) out.push_back(v);
    return out;
}

void header(std::ostream& out, const char* kind) {
    out << "# orbinspect " << kind << " csv v" << kCsvSchemaVersion << '\n';
    out << std::setprecision(17);
}

std::ofstream open(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

void check(const std::ostream& out, const std::filesystem::path& path) {
    if (!out) throw IoError("write failed for " + path.string());
}

json metrics_json(const harness::EpisodeMetrics& m) {
    return {{"inspection_pct", m.inspection_pct},
            {"sim_time", m.sim_time},
            {"unique_actions", arr(m.unique_actions)},
            {"total_actions", arr(m.total_actions)},
            {"delta_v", arr(m.delta_v)},
            {"total_delta_v", m.total_delta_v},
            {"arrival_failures", m.arrival_failures},
            {"reached_threshold", m.reached_threshold}};
}

json stat_json(const harness::Stat& s) { return {{"mean", s.mean}, {"stddev", s.stddev}}; }

}  // namespace

void write_batch_summary_csv(const harness::BatchReport& report, std::ostream& out) {
    header(out, "batch-summary");
    out << "mode,policy,fingerprint,runs,failures,reached,inspection_pct_mean,inspection_pct_std,sim_time_mean,"
           "sim_time_std,unique_actions_mean,unique_actions_std,total_actions_mean,total_actions_std,"
           "total_delta_v_mean,total_delta_v_std\n";
    for (const auto& m : report.modes) {
        out << attitude::to_string(m.mode) << ',' << report.policy << ',' << report.fingerprint << ',' << m.runs << ','
            << m.failures.size() << ',' << m.reached << ',' << m.inspection_pct.mean << ',' << m.inspection_pct.stddev
            << ',' << m.sim_time.mean << ',' << m.sim_time.stddev << ',' << m.unique_actions.mean << ','
            << m.unique_actions.stddev << ',' << m.total_actions.mean << ',' << m.total_actions.stddev << ','
            << m.total_delta_v.mean << ',' << m.total_delta_v.stddev << '\n';
    }
}

void write_batch_episodes_csv(const harness::BatchReport& report, std::ostream& out) {
    header(out, "batch-episodes");
    out << "mode,seed,inspection_pct,sim_time,unique_0,unique_1,unique_2,total_0,total_1,total_2,"
           "delta_v_0,delta_v_1,delta_v_2,total_delta_v,arrival_failures,reached\n";
    for (const auto& m : report.modes) {
        for (std::size_t i = 0; i < m.episodes.size(); ++i) {
            const auto& e = m.episodes[i];
            out << attitude::to_string(m.mode) << ',' << m.seeds[i] << ',' << e.inspection_pct << ',' << e.sim_time;
            for (auto v : e.unique_actions) out << ',' << v;
            for (auto v : e.total_actions) out << ',' << v;
            for (auto v : e.delta_v) out << ',' << v;
            out << ',' << e.total_delta_v << ',' << e.arrival_failures << ',' << (e.reached_threshold ? 1 : 0) << '\n';
        }
    }
}

void write_series_csv(const rollout::EpisodeRecord& record, std::ostream& out) {
    header(out, "series");
    out << "t,coverage_pct,delta_v_0,delta_v_1,delta_v_2,total_delta_v,viewpoint_0,viewpoint_1,viewpoint_2\n";
    for (const auto& s : record.series) {
        out << s.t << ',' << 100.0 * s.coverage;
        for (double v : s.delta_v) out << ',' << v;
        out << ',' << s.total_delta_v;
        for (auto v : s.viewpoint) out << ',' << v;
        out << '\n';
    }
}

void write_record_jsonl(const rollout::EpisodeRecord& record, std::ostream& out) {
    for (const auto& e : record.events) {
        json j = {{"type", "event"},
                  {"t", e.t},
                  {"agent", e.agent},
                  {"kind", rollout::to_string(e.kind)},
                  {"from", e.from},
                  {"to", e.to},
                  {"planned_arrival", e.planned_arrival},
                  {"delta_v_estimate", e.delta_v_estimate},
                  {"transfer_fuel", e.transfer_fuel},
                  {"position_error", e.position_error},
                  {"new_points", e.new_points},
                  {"coverage", e.coverage}};
        out << j.dump() << '\n';
    }
    for (const auto& s : record.trajectory) {
        json j = {{"type", "sample"},
                  {"t", s.t},
                  {"agent", s.agent},
                  {"position", vec3(s.state.position)},
                  {"velocity", vec3(s.state.velocity)},
                  {"thrust", vec3(s.thrust)}};
        out << j.dump() << '\n';
    }
    json summary = {{"type", "summary"},
                    {"seed", record.seed},
                    {"mode", attitude::to_string(record.mode)},
                    {"point_count", record.point_count},
                    {"start", arr(record.start)},
                    {"seen", record.seen},
                    {"coverage", record.coverage},
                    {"final_time", record.final_time},
                    {"fuel", arr(record.fuel)},
                    {"arrival_failures", arr(record.arrival_failures)},
                    {"reached_threshold", record.reached_threshold},
                    {"timed_out", record.timed_out}};
    json actions = json::array();
    for (const auto& a : record.actions) actions.push_back(a);
    summary["actions"] = actions;
    out << summary.dump() << '\n';
}

void write_batch_jsonl(const harness::BatchReport& report, std::ostream& out) {
    json head = {{"type", "batch"}, {"fingerprint", report.fingerprint}, {"policy", report.policy},
                 {"seeds", report.seeds}};
    out << head.dump() << '\n';
    for (const auto& m : report.modes) {
        json j = {{"type", "mode"},
                  {"mode", attitude::to_string(m.mode)},
                  {"runs", m.runs},
                  {"reached", m.reached},
                  {"inspection_pct", stat_json(m.inspection_pct)},
                  {"sim_time", stat_json(m.sim_time)},
                  {"unique_actions", stat_json(m.unique_actions)},
                  {"total_actions", stat_json(m.total_actions)},
                  {"total_delta_v", stat_json(m.total_delta_v)}};
        json failures = json::array();
        for (const auto& f : m.failures) failures.push_back({{"seed", f.seed}, {"message", f.message}});
        j["failures"] = failures;
        out << j.dump() << '\n';
        for (std::size_t i = 0; i < m.episodes.size(); ++i) {
            json e = metrics_json(m.episodes[i]);
            e["type"] = "episode";
            e["mode"] = attitude::to_string(m.mode);
            e["seed"] = m.seeds[i];
            out << e.dump() << '\n';
        }
    }
}

void write_env_trace_jsonl(const std::vector<EnvTraceStep>& steps, std::ostream& out) {
    for (const auto& s : steps) {
        for (std::size_t a : s.info.order) {
            const auto& ai = s.info.arrivals[a];
            json j = {{"type", "arrival"},
                      {"step", s.step},
                      {"agent", a},
                      {"action", ai.to},
                      {"arrival_time", ai.arrival_time},
                      {"new_points", ai.new_points},
                      {"delta_v", ai.delta_v},
                      {"reward", ai.reward}};
            out << j.dump() << '\n';
        }
    }
}

void export_report(const harness::BatchReport& report, Format format, const std::filesystem::path& path) {
    std::ofstream out = open(path);
    if (format == Format::Csv) write_batch_episodes_csv(report, out);
    else write_batch_jsonl(report, out);
    check(out, path);
}

void export_record(const rollout::EpisodeRecord& record, Format format, const std::filesystem::path& path) {
    std::ofstream out = open(path);
    if (format == Format::Csv) write_series_csv(record, out);
    else write_record_jsonl(record, out);
    check(out, path);
}

}  // namespace orbinspect::io
