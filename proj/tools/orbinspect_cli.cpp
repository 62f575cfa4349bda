// Command-line front end: single rollouts, batches, lattice dumps and
// one-shot visibility checks.

#include "orbinspect/config.hpp"
#include "orbinspect/errors.hpp"
#include "orbinspect/export.hpp"
#include "orbinspect/harness.hpp"
#include "orbinspect/visibility.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>

namespace fs = std::filesystem;
using namespace orbinspect;

namespace {

constexpr const char* kOutDirEnv = "ORBINSPECT_OUT_DIR";

struct CommonOptions {
    std::string config_path;
    std::string mode;
    std::string policy;
    std::vector<std::string> weights;
    std::string out_dir;
    double threshold = -1.0;
};

void add_common(CLI::App* app, CommonOptions& o) {
    app->add_option("-c,--config", o.config_path, "JSON experiment config")->check(CLI::ExistingFile);
    app->add_option("-p,--policy", o.policy, "random | park | greedy | recurrent-q");
    app->add_option("-w,--weights", o.weights, "weight container(s), one shared or one per agent");
    app->add_option("-o,--out-dir", o.out_dir, std::string("output directory (default $") + kOutDirEnv + " or .)");
    app->add_option("--threshold", o.threshold, "rollout coverage threshold");
}

attitude::DynamicMode mode_or_throw(const std::string& name) {
    const auto m = attitude::parse_mode(name);
    if (!m) throw ConfigError("unknown mode '" + name + "'");
    return *m;
}

config::ExperimentConfig build_config(const CommonOptions& o) {
    config::ExperimentConfig c = o.config_path.empty() ? config::ExperimentConfig{} : config::load_config(o.config_path);
    if (!o.mode.empty()) c.env.dynamic_mode = mode_or_throw(o.mode);
    if (!o.policy.empty()) {
        const auto k = policy::parse_policy_kind(o.policy);
        if (!k) throw ConfigError("unknown policy '" + o.policy + "'");
        c.policy.kind = *k;
    }
    if (!o.weights.empty()) c.policy.weight_files = o.weights;
    if (o.threshold > 0.0) c.rollout.coverage_threshold = o.threshold;
    c.validate();
    return c;
}

fs::path out_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
    return ".";
}

Vec3 parse_vec3(const std::string& text) {
    std::stringstream ss(text);
    Vec3 v;
    char sep = 0;
    if (!(ss >> v.x() >> sep >> v.y() >> sep >> v.z())) throw ConfigError("expected x,y,z but got '" + text + "'");
    return v;
}

void print_metrics(const harness::EpisodeMetrics& m) {
    std::cout << std::fixed << std::setprecision(3) << "inspection_pct " << m.inspection_pct << "\nsim_time "
              << m.sim_time << "\ntotal_delta_v " << m.total_delta_v << "\nreached "
              << (m.reached_threshold ? "yes" : "no") << "\narrival_failures " << m.arrival_failures << '\n';
    for (std::size_t a = 0; a < kAgentCount; ++a)
        std::cout << "agent " << a << " actions " << m.unique_actions[a] << '/' << m.total_actions[a] << " delta_v "
                  << m.delta_v[a] << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-agent orbital inspection simulator"};
    app.require_subcommand(1);

    CommonOptions run_opts;
    std::uint64_t run_seed = 0;
    auto* run = app.add_subcommand("run", "one hierarchical rollout");
    add_common(run, run_opts);
    run->add_option("-m,--mode", run_opts.mode, "dynamic mode, e.g. static-hill");
    run->add_option("-s,--seed", run_seed, "episode seed");

    CommonOptions batch_opts;
    std::vector<std::string> batch_modes;
    std::size_t batch_runs = 10;
    std::uint64_t batch_seed0 = 1;
    unsigned batch_threads = 0;
    auto* batch = app.add_subcommand("batch", "repeated rollouts per mode with mean/stddev");
    add_common(batch, batch_opts);
    batch->add_option("-m,--modes", batch_modes, "dynamic modes (default: all five)");
    batch->add_option("-n,--runs", batch_runs, "episodes per mode")->check(CLI::PositiveNumber);
    batch->add_option("--seed-base", batch_seed0, "first seed; seeds are consecutive");
    batch->add_option("-j,--threads", batch_threads, "worker threads (0 = all cores)");

    std::size_t vp_count = 20;
    double vp_radius = 200.0;
    auto* vps = app.add_subcommand("viewpoints", "print the viewpoint lattice as CSV");
    vps->add_option("-n,--count", vp_count, "number of stations")->check(CLI::PositiveNumber);
    vps->add_option("-r,--radius", vp_radius, "lattice radius [m]")->check(CLI::PositiveNumber);

    std::string vis_config, vis_ply, vis_shape = "sphere", vis_mode = "static-hill", vis_camera;
    std::size_t vis_points = 1000, vis_station = 0;
    double vis_scale = 1.0, vis_time = 0.0;
    auto* vis = app.add_subcommand("visibility-check", "mask statistics for one camera and attitude");
    vis->add_option("-c,--config", vis_config, "JSON experiment config")->check(CLI::ExistingFile);
    vis->add_option("--ply", vis_ply, "ASCII PLY target")->check(CLI::ExistingFile);
    vis->add_option("--shape", vis_shape, "sphere | box | panel-satellite");
    vis->add_option("--points", vis_points, "synthetic point count");
    vis->add_option("--scale", vis_scale, "synthetic scale [m]");
    vis->add_option("-m,--mode", vis_mode, "dynamic mode");
    vis->add_option("-t,--time", vis_time, "calendar time [s]");
    vis->add_option("--station", vis_station, "lattice station index");
    vis->add_option("--camera", vis_camera, "explicit camera position x,y,z [m]");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            const config::ExperimentConfig cfg = build_config(run_opts);
            const harness::EpisodeRun result = harness::run_episode(cfg, run_seed);
            const fs::path dir = out_dir(run_opts.out_dir);
            const std::string stem = "episode_" + std::string(attitude::to_string(cfg.env.dynamic_mode)) + "_" +
                                     std::to_string(run_seed);
            io::export_record(result.record, io::Format::JsonLines, dir / (stem + ".jsonl"));
            io::export_record(result.record, io::Format::Csv, dir / (stem + "_series.csv"));
            std::cout << "fingerprint " << config::fingerprint(cfg) << '\n';
            print_metrics(result.metrics);
            std::cout << "wrote " << (dir / (stem + ".jsonl")).string() << '\n';
        } else if (*batch) {
            const config::ExperimentConfig cfg = build_config(batch_opts);
            std::vector<attitude::DynamicMode> modes;
            if (batch_modes.empty()) modes.assign(std::begin(attitude::kAllModes), std::end(attitude::kAllModes));
            for (const auto& m : batch_modes) modes.push_back(mode_or_throw(m));
            std::vector<std::uint64_t> seeds(batch_runs);
            std::iota(seeds.begin(), seeds.end(), batch_seed0);
            const harness::BatchReport report = harness::run_batch(cfg, modes, seeds, batch_threads);
            const fs::path dir = out_dir(batch_opts.out_dir);
            io::export_report(report, io::Format::Csv, dir / "batch_episodes.csv");
            io::export_report(report, io::Format::JsonLines, dir / "batch.jsonl");
            fs::create_directories(dir);
            std::ofstream summary(dir / "batch_summary.csv");
            io::write_batch_summary_csv(report, summary);
            io::write_batch_summary_csv(report, std::cout);
            int failed = 0;
            for (const auto& m : report.modes) failed += static_cast<int>(m.failures.size());
            if (failed) std::cerr << failed << " episode(s) failed; see batch.jsonl\n";
        } else if (*vps) {
            const auto lattice = geometry::fibonacci_viewpoints(vp_count, vp_radius);
            std::cout << std::setprecision(17) << "index,x,y,z,nearest_angle_rad\n";
            for (std::size_t i = 0; i < lattice.size(); ++i)
                std::cout << i << ',' << lattice[i].x() << ',' << lattice[i].y() << ',' << lattice[i].z() << ','
                          << lattice.nearest_neighbor_angles()[i] << '\n';
        } else if (*vis) {
            config::ExperimentConfig cfg = vis_config.empty() ? config::ExperimentConfig{} : config::load_config(vis_config);
            if (!vis_ply.empty()) cfg.target.ply_path = vis_ply;
            if (vis_config.empty() || vis->count("--shape")) {
                const auto s = geometry::parse_shape(vis_shape);
                if (!s) throw ConfigError("unknown shape '" + vis_shape + "'");
                cfg.target.shape = *s;
            }
            if (vis_config.empty() || vis->count("--points")) cfg.target.point_count = vis_points;
            if (vis_config.empty() || vis->count("--scale")) cfg.target.scale = vis_scale;
            if (vis_config.empty() || vis->count("--mode")) cfg.env.dynamic_mode = mode_or_throw(vis_mode);
            cfg.validate();
            const env::InspectionEnv env(cfg.env, cfg.target.build());
            const Vec3 camera = vis_camera.empty() ? env.viewpoints().at(vis_station) : parse_vec3(vis_camera);
            const auto att = env.target().in_hill(vis_time);
            const auto pts = geometry::transform_cloud(env.cloud(), att.q_bf_hill);
            const auto fov = geometry::fov_filter(pts, camera, cfg.env.camera);
            const auto hpr = geometry::hidden_point_removal(pts, camera, cfg.env.camera);
            const auto both = fov & hpr;
            std::cout << "points " << env.cloud().size() << "\nfov " << fov.count() << "\nhpr " << hpr.count()
                      << "\nvisible " << both.count() << "\nvisible_pct " << std::fixed << std::setprecision(3)
                      << 100.0 * double(both.count()) / double(env.cloud().size()) << '\n';
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
