// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "orbinspect/config.hpp"
#include "orbinspect/export.hpp"
#include "orbinspect/harness.hpp"
#include "orbinspect/navigation.hpp"
#include "orbinspect/orbital.hpp"
#include "orbinspect/rotational.hpp"
#include "orbinspect/viewpoints.hpp"
#include "orbinspect/visibility.hpp"
#include "raycast_oracle.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace orbinspect;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(const char* name, double time_limit_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > time_limit_s) {
        o.pass = false;
        o.detail += " [over time limit " + std::to_string(time_limit_s) + " s]";
    }
    if (!o.pass) ++failures;
    std::printf("%s %-26s %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

Vec3 random_direction(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    return Vec3(g(rng), g(rng), g(rng)).normalized();
}

Outcome nmt_round_trip() {
    const orbit::OrbitParams p;
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> angle(0.1, std::numbers::pi);
    std::uniform_real_distribution<double> frac(0.02, 0.98);
    double worst_pos = 0.0, worst_vel = 0.0;
    int done = 0, resampled = 0;
    while (done < 1000) {
        const Vec3 a = random_direction(rng);
        Vec3 axis = a.cross(random_direction(rng)).normalized();
        const double theta = angle(rng);
        const Vec3 b = Eigen::AngleAxisd(theta, axis) * a;
        const double tof = frac(rng) * p.period();
        const orbit::TransferSpec spec{200.0 * a, 200.0 * b, tof};
        if (!orbit::check_tof_singularity(spec, p)) {
            ++resampled;
            continue;
        }
        const Vec3 v0 = orbit::nmt_initial_velocity(spec, p);
        const orbit::HillState end = orbit::propagate({spec.start, v0}, {}, tof, p);
        worst_pos = std::max(worst_pos, (end.position - spec.end).norm());
        worst_vel = std::max(worst_vel, (end.velocity - orbit::nmt_final_velocity(spec, p)).norm());
        ++done;
    }
    return {worst_pos <= 1e-6 && worst_vel <= 1e-6,
            fmt("1000 transfers, max position error %.2e m, max velocity error %.2e m/s", worst_pos, worst_vel) +
                ", " + std::to_string(resampled) + " singular draws resampled"};
}

Outcome tof_heuristic() {
    const orbit::OrbitParams p;
    const auto vps = geometry::fibonacci_viewpoints(20, 200.0);
    const double t = orbit::transfer_tof(Vec3(200, 0, 0), Vec3(-200, 0, 0), vps, p);
    return {std::abs(t - 6117.99 / 2) <= 0.01, fmt("antipodal TOF %.4f s, half period %.4f s", t, 6117.99 / 2)};
}

Outcome attitude_conservation() {
    const attitude::InertiaDiag I{100, 50, 70};
    const orbit::OrbitParams p;
    const int steps = static_cast<int>(std::ceil(p.period()));
    double worst_e = 0.0, worst_h = 0.0;
    for (auto mode : attitude::kAllModes) {
        attitude::AttitudeState s;
        s.omega_bf = attitude::preset_omega(mode, p.mean_motion);
        const double e0 = attitude::kinetic_energy(s.omega_bf, I);
        const double h0 = attitude::momentum_magnitude(s.omega_bf, I);
        for (int k = 0; k < steps; ++k) s = attitude::step_attitude(s, 1.0, I);
        if (e0 > 0) worst_e = std::max(worst_e, std::abs(attitude::kinetic_energy(s.omega_bf, I) - e0) / e0);
        if (h0 > 0) worst_h = std::max(worst_h, std::abs(attitude::momentum_magnitude(s.omega_bf, I) - h0) / h0);
    }
    return {worst_e <= 1e-8 && worst_h <= 1e-8,
            fmt("5 presets x %.0f s, max relative energy drift %.2e, momentum drift %.2e", steps, worst_e, worst_h)};
}

Outcome static_modes() {
    const attitude::InertiaDiag I;
    const orbit::OrbitParams p;
    attitude::AttitudeState hill, eci;
    hill.omega_bf = attitude::preset_omega(attitude::DynamicMode::StaticHill, p.mean_motion);
    eci.omega_bf = attitude::preset_omega(attitude::DynamicMode::StaticEci, p.mean_motion);
    const int steps = static_cast<int>(std::ceil(p.period()));
    double drift = 0.0, rate_err = 0.0, angle_err = 0.0;
    for (int k = 1; k <= steps; ++k) {
        hill = attitude::step_attitude(hill, 1.0, I);
        eci = attitude::step_attitude(eci, 1.0, I);
        const auto h = attitude::attitude_in_hill(hill, k, p);
        drift = std::max(drift, h.q_bf_hill.angularDistance(attitude::Quaternion::Identity()));
        const auto e = attitude::attitude_in_hill(eci, k, p);
        rate_err = std::max(rate_err, (e.omega_hill - Vec3(0, 0, -p.mean_motion)).norm());
        // rotation about Hill z by -n t
        const attitude::Quaternion expect(Eigen::AngleAxisd(-p.mean_motion * k, Vec3::UnitZ()));
        angle_err = std::max(angle_err, e.q_bf_hill.angularDistance(expect));
    }
    return {drift < 1e-6 && rate_err < 1e-12 && angle_err < 1e-6,
            fmt("static-hill drift %.2e rad; static-eci rate error %.2e rad/s, angle error %.2e rad", drift, rate_err,
                angle_err)};
}

Outcome visibility_oracle() {
    const auto cloud = geometry::synthetic_cloud(geometry::SyntheticShape::Sphere, 1000, 1.0);
    const auto vps = geometry::fibonacci_viewpoints(20, 200.0);
    const geometry::CameraModel cam;
    const auto oracle = testsupport::SurfelOracle::for_sphere(1000, 1.0);
    const double cos_half = std::cos(cam.fov_half_angle_deg * std::numbers::pi / 180.0);
    double worst = 1.0;
    for (std::size_t v = 0; v < vps.size(); ++v) {
        const auto mask = geometry::visible_points(cloud, attitude::Quaternion::Identity(), vps[v], cam);
        const auto ray = oracle.visible(cloud.points, vps[v]);
        const Vec3 bore = -vps[v].normalized();
        std::size_t agree = 0;
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            const bool in_cone = (cloud.points[i] - vps[v]).normalized().dot(bore) >= cos_half;
            agree += mask.test(i) == (ray[i] && in_cone);
        }
        worst = std::min(worst, double(agree) / double(cloud.size()));
    }
    return {worst >= 0.99, fmt("20 viewpoints, worst agreement %.4f", worst)};
}

Outcome lattice() {
    const auto vps = geometry::fibonacci_viewpoints(20, 200.0);
    double worst_r = 0.0, lo = 10.0, hi = 0.0;
    for (std::size_t i = 0; i < vps.size(); ++i) {
        worst_r = std::max(worst_r, std::abs(vps[i].norm() - 200.0));
        lo = std::min(lo, vps.nearest_neighbor_angles()[i]);
        hi = std::max(hi, vps.nearest_neighbor_angles()[i]);
    }
    return {vps.size() == 20 && worst_r <= 1e-12 && hi / lo < 2.0,
            fmt("radius error %.1e m, nearest-neighbour ratio %.3f", worst_r, hi / lo)};
}

Outcome mpc_fidelity() {
    const orbit::OrbitParams p;
    const nav::ControllerConfig cfg;
    const auto vps = geometry::fibonacci_viewpoints(20, 200.0);
    int ok = 0, total = 0;
    double worst_fuel = 0.0, worst_err = 0.0, worst_late = 0.0;
    for (std::size_t i = 0; i < vps.size(); ++i)
        for (std::size_t j = 0; j < vps.size(); ++j) {
            const double tof = orbit::transfer_tof(i, j, vps, p);
            const nav::TransferCommand cmd{vps[j], 0.0, tof};
            const nav::NavigationResult r = nav::navigate({vps[i], Vec3::Zero()}, cmd, cfg, p);
            const double dv = orbit::transfer_delta_v(vps[i], vps[j], Vec3::Zero(), vps, p);
            const double fuel_err = std::abs(r.fuel_used - dv) / dv;
            const double late = std::abs(r.arrival_time - tof);
            worst_fuel = std::max(worst_fuel, fuel_err);
            worst_err = std::max(worst_err, r.final_error);
            worst_late = std::max(worst_late, late);
            ++total;
            if (r.arrival_success && r.final_error <= 0.35 && late <= 50.0 && fuel_err <= 0.10) ++ok;
        }
    return {ok == total && total == 400,
            std::to_string(ok) + "/" + std::to_string(total) +
                fmt(" transfers; max arrival error %.3f m, max timing offset %.0f s, max fuel error %.2f%%",
                    worst_err, worst_late, 100.0 * worst_fuel)};
}

Outcome env_invariants() {
    env::EnvConfig base;
    const auto cloud = geometry::synthetic_cloud(geometry::SyntheticShape::PanelSatellite, 200, 1.0);
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<std::size_t> pick(0, 19);
    int steps = 0, episodes = 0, episodes_085 = 0, violations = 0;
    double info_lo = 1e9, info_hi = -1e9;
    std::string first_violation;
    auto violate = [&](const std::string& what) {
        if (violations++ == 0) first_violation = what;
    };
    while (steps < 10000) {
        for (auto mode : attitude::kAllModes) {
            for (double threshold : {0.85, 0.95, 1.0}) {
                env::EnvConfig c = base;
                c.dynamic_mode = mode;
                c.coverage_threshold = threshold;
                const env::InspectionEnv e(c, cloud);
                for (int ep = 0; ep < 4 && steps < 10000; ++ep, ++episodes) {
                    env::JointState s = e.reset(rng()).state;
                    while (!s.done && steps < 10000) {
                        const env::StepResult r = e.step_joint(s, {pick(rng), pick(rng), pick(rng)});
                        ++steps;
                        if (!s.ledger.seen().is_subset_of(r.state.ledger.seen())) violate("ledger shrank");
                        if (r.state.time < s.time) violate("time decreased");
                        for (const auto& ai : r.info.arrivals) {
                            if (!(ai.arrival_time > s.time || ai.tof == 0.0) || ai.arrival_time > r.state.time)
                                violate("arrival outside (t_k, t_k+1]");
                            if (!std::isfinite(ai.reward)) violate("non-finite reward");
                            if (ai.info_term < 0.0 || ai.info_term > 2.0) violate("info term out of [0, 2]");
                            info_lo = std::min(info_lo, ai.info_term);
                            info_hi = std::max(info_hi, ai.info_term);
                            if (ai.delta_v < 0.0) violate("negative delta-v");
                        }
                        const double cov = env::coverage_ratio(r.state.ledger);
                        const bool should_end = cov >= threshold || r.state.step_count >= c.max_joint_steps;
                        if (r.done != should_end) violate("done flag disagrees with coverage/step limit");
                        s = r.state;
                    }
                    if (threshold == 0.85) ++episodes_085;
                }
            }
        }
    }
    return {violations == 0, std::to_string(steps) + " joint steps over " + std::to_string(episodes) +
                                 " episodes (" + std::to_string(episodes_085) + " at threshold 0.85), " +
                                 std::to_string(violations) + " violations" +
                                 (violations ? " (first: " + first_violation + ")" : "") +
                                 fmt(", info term range [%.3f, %.3f]", info_lo, info_hi)};
}

Outcome end_to_end() {
    config::ExperimentConfig cfg;
    cfg.target.shape = geometry::SyntheticShape::Sphere;
    cfg.target.point_count = 1000;
    cfg.policy.kind = policy::PolicyKind::Greedy;
    cfg.rollout.coverage_threshold = 0.85;
    cfg.rollout.max_decisions = 100;
    std::vector<std::uint64_t> seeds(20);
    for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = 1000 + i;
    const harness::BatchReport report =
        harness::run_batch(cfg, {attitude::DynamicMode::StaticHill, attitude::DynamicMode::SingleAxis}, seeds);
    std::size_t reached = 0, runs = 0;
    for (const auto& m : report.modes) {
        reached += m.reached;
        runs += m.runs;
    }

    // series export in the coverage / cumulative delta-v schema
    const harness::EpisodeRun one = harness::run_episode(cfg, seeds[0]);
    std::ostringstream csv;
    io::write_series_csv(one.record, csv);
    std::istringstream in(csv.str());
    std::string l0, l1;
    std::getline(in, l0);
    std::getline(in, l1);
    const bool schema = l0 == "# orbinspect series csv v1" &&
                        l1 == "t,coverage_pct,delta_v_0,delta_v_1,delta_v_2,total_delta_v,viewpoint_0,viewpoint_1,"
                              "viewpoint_2" &&
                        !one.record.series.empty();
    std::string detail = std::to_string(reached) + "/" + std::to_string(runs) + " runs reached 85%";
    for (const auto& m : report.modes)
        detail += fmt("; %s", 0) .substr(0, 2) + std::string(attitude::to_string(m.mode)) +
                  fmt(" mean %.1f%% in %.0f s, dV %.3f m/s", m.inspection_pct.mean, m.sim_time.mean,
                      m.total_delta_v.mean);
    detail += schema ? "; series schema ok" : "; series schema mismatch";
    return {reached == runs && runs == 40 && schema, detail};
}

Outcome table2_substitute() {
    // Trained means need the external training run and the original asset; check the harness
    // computes the same metric set from a supplied weight file instead.
    config::ExperimentConfig cfg;
    cfg.target.point_count = 300;
    const auto path = std::filesystem::temp_directory_path() / "orbinspect_acceptance_weights.maiq";
    const std::size_t obs = env::ObservationLayout::size(cfg.target.point_count);
    policy::save_weights(policy::RecurrentQWeights::random({static_cast<std::uint32_t>(obs)}, 1), path);
    cfg.policy.kind = policy::PolicyKind::RecurrentQ;
    cfg.policy.weight_files = {path.string()};
    cfg.rollout.max_decisions = 10;
    const harness::BatchReport r = harness::run_batch(cfg, {attitude::DynamicMode::StaticHill}, {1, 2});
    std::filesystem::remove(path);
    const auto& m = r.modes.at(0);
    const bool ok = m.runs == 2 && m.failures.empty() && std::isfinite(m.inspection_pct.mean) &&
                    std::isfinite(m.total_delta_v.mean);
    return {ok, "trained-policy means NOT REPRODUCIBLE at desk scale (substituted); harness computed "
                "inspection/time/actions/dV from a supplied weight file" +
                    fmt(" (%.1f%%, %.0f s, %.3f m/s)", m.inspection_pct.mean, m.sim_time.mean,
                        m.total_delta_v.mean)};
}

}  // namespace

int main() {
    criterion("nmt-round-trip", 5.0, nmt_round_trip);
    criterion("tof-heuristic", 1.0, tof_heuristic);
    criterion("attitude-conservation", 10.0, attitude_conservation);
    criterion("static-mode-semantics", 10.0, static_modes);
    criterion("visibility-oracle", 30.0, visibility_oracle);
    criterion("viewpoint-lattice", 1.0, lattice);
    criterion("mpc-fidelity", 300.0, mpc_fidelity);
    criterion("environment-invariants", 60.0, env_invariants);
    criterion("end-to-end-baseline", 600.0, end_to_end);
    criterion("table2-substitute", 60.0, table2_substitute);
    std::printf("%s: %d failing criteria\n", failures ? "FAILED" : "ALL PASSED", failures);
    return failures ? 1 : 0;
}
