#include "orbinspect/config.hpp"

#include "orbinspect/errors.hpp"
#include "orbinspect/ply.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace orbinspect::config {
namespace {

using nlohmann::json;

// Reads optional keys from one JSON object and rejects anything it was not asked about.
class Section {
public:
    Section(const json& root, const std::string& name) : name_(name) {
        if (root.contains(name)) {
            node_ = &root.at(name);
            if (!node_->is_object()) throw ConfigError("config section '" + name + "' must be an object");
        }
    }

    template <class T>
    void read(const char* key, T& out) {
        known_.insert(key);
        if (!node_ || !node_->contains(key)) return;
        try {
            out = node_->at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError("config " + name_ + "." + key + ": " + e.what());
        }
    }

    // null encodes an unbounded value
    void read_unbounded(const char* key, double& out) {
        known_.insert(key);
        if (!node_ || !node_->contains(key)) return;
        const json& v = node_->at(key);
        if (v.is_null()) {
            out = std::numeric_limits<double>::infinity();
            return;
        }
        if (!v.is_number()) throw ConfigError("config " + name_ + "." + key + " must be a number or null");
        out = v.get<double>();
    }

    template <class Enum, class Parse>
    void read_enum(const char* key, Enum& out, Parse parse) {
        std::string text;
        bool present = node_ && node_->contains(key);
        read(key, text);
        if (!present) return;
        const auto parsed = parse(text);
        if (!parsed) throw ConfigError("config " + name_ + "." + key + ": unknown value '" + text + "'");
        out = *parsed;
    }

    void finish() const {
        if (!node_) return;
        for (const auto& [key, value] : node_->items())
            if (!known_.count(key)) throw ConfigError("config " + name_ + ": unknown key '" + key + "'");
    }

private:
    std::string name_;
    const json* node_ = nullptr;
    std::set<std::string> known_;
};

json unbounded(double v) { return std::isinf(v) ? json(nullptr) : json(v); }

}  // namespace

geometry::PointCloud TargetConfig::build() const {
    geometry::PointCloud cloud =
        ply_path.empty() ? geometry::synthetic_cloud(shape, point_count, scale, seed) : geometry::load_ply(ply_path);
    cloud.validate();
    return cloud;
}

void ExperimentConfig::validate() const {
    env.validate();
    controller.validate();
    rollout.validate();
    if (target.ply_path.empty() && target.point_count < 4) throw ConfigError("target: point_count must be at least 4");
    if (target.ply_path.empty() && !(target.scale > 0.0)) throw ConfigError("target: scale must be positive");
    if (!(policy.epsilon >= 0.0 && policy.epsilon <= 1.0)) throw ConfigError("policy: epsilon must lie in [0, 1]");
}

ExperimentConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be an object");
    static const std::set<std::string> sections{"env", "orbit", "inertia", "camera", "controller",
                                                "rollout", "target", "policy"};
    for (const auto& [key, value] : root.items())
        if (!sections.count(key)) throw ConfigError("config: unknown section '" + key + "'");

    ExperimentConfig c;
    {
        Section s(root, "env");
        s.read("alpha", c.env.alpha);
        s.read("beta", c.env.beta);
        s.read("r0", c.env.r0);
        s.read("coverage_threshold", c.env.coverage_threshold);
        s.read("gamma", c.env.gamma);
        s.read("fuel_sign", c.env.fuel_sign);
        s.read("viewpoint_count", c.env.viewpoint_count);
        s.read("viewpoint_radius", c.env.viewpoint_radius);
        s.read("max_joint_steps", c.env.max_joint_steps);
        s.read_enum("dynamic_mode", c.env.dynamic_mode, attitude::parse_mode);
        s.read("seed", c.env.seed);
        s.finish();
    }
    {
        Section s(root, "orbit");
        s.read("mean_motion", c.env.orbit.mean_motion);
        s.read("orbital_radius_km", c.env.orbit.orbital_radius_km);
        s.read("agent_mass", c.env.orbit.agent_mass);
        s.finish();
    }
    {
        Section s(root, "inertia");
        s.read("xx", c.env.inertia.xx);
        s.read("yy", c.env.inertia.yy);
        s.read("zz", c.env.inertia.zz);
        s.finish();
    }
    {
        Section s(root, "camera");
        s.read("fov_half_angle_deg", c.env.camera.fov_half_angle_deg);
        s.read("hpr_diameter", c.env.camera.hpr_diameter);
        s.finish();
    }
    {
        Section s(root, "controller");
        s.read("arrival_radius", c.controller.arrival_radius);
        s.read("arrival_window", c.controller.arrival_window);
        s.read("control_dt", c.controller.control_dt);
        s.read("velocity_match_tolerance", c.controller.velocity_match_tolerance);
        s.read("thrust_tolerance", c.controller.thrust_tolerance);
        s.read("max_iterations", c.controller.max_iterations);
        s.read("terminal_coast_steps", c.controller.terminal_coast_steps);
        s.read_unbounded("max_thrust", c.controller.max_thrust);
        s.finish();
    }
    {
        Section s(root, "rollout");
        s.read("coverage_threshold", c.rollout.coverage_threshold);
        s.read("max_decisions", c.rollout.max_decisions);
        s.read("calendar_timeout", c.rollout.calendar_timeout);
        s.read("synchronous", c.rollout.synchronous);
        s.read("record_trajectory", c.rollout.record_trajectory);
        s.read("series_interval", c.rollout.series_interval);
        s.finish();
    }
    {
        Section s(root, "target");
        s.read("ply_path", c.target.ply_path);
        s.read_enum("shape", c.target.shape, geometry::parse_shape);
        s.read("point_count", c.target.point_count);
        s.read("scale", c.target.scale);
        s.read("seed", c.target.seed);
        s.finish();
    }
    {
        Section s(root, "policy");
        s.read_enum("kind", c.policy.kind, policy::parse_policy_kind);
        s.read("weight_files", c.policy.weight_files);
        s.read("epsilon", c.policy.epsilon);
        s.read("scripts", c.policy.scripts);
        s.finish();
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_json(const ExperimentConfig& c, int indent) {
    json root;
    root["env"] = {{"alpha", c.env.alpha},
                   {"beta", c.env.beta},
                   {"r0", c.env.r0},
                   {"coverage_threshold", c.env.coverage_threshold},
                   {"gamma", c.env.gamma},
                   {"fuel_sign", c.env.fuel_sign},
                   {"viewpoint_count", c.env.viewpoint_count},
                   {"viewpoint_radius", c.env.viewpoint_radius},
                   {"max_joint_steps", c.env.max_joint_steps},
                   {"dynamic_mode", attitude::to_string(c.env.dynamic_mode)},
                   {"seed", c.env.seed}};
    root["orbit"] = {{"mean_motion", c.env.orbit.mean_motion},
                     {"orbital_radius_km", c.env.orbit.orbital_radius_km},
                     {"agent_mass", c.env.orbit.agent_mass}};
    root["inertia"] = {{"xx", c.env.inertia.xx}, {"yy", c.env.inertia.yy}, {"zz", c.env.inertia.zz}};
    root["camera"] = {{"fov_half_angle_deg", c.env.camera.fov_half_angle_deg},
                      {"hpr_diameter", c.env.camera.hpr_diameter}};
    root["controller"] = {{"arrival_radius", c.controller.arrival_radius},
                          {"arrival_window", c.controller.arrival_window},
                          {"control_dt", c.controller.control_dt},
                          {"velocity_match_tolerance", c.controller.velocity_match_tolerance},
                          {"thrust_tolerance", c.controller.thrust_tolerance},
                          {"max_iterations", c.controller.max_iterations},
                          {"terminal_coast_steps", c.controller.terminal_coast_steps},
                          {"max_thrust", unbounded(c.controller.max_thrust)}};
    root["rollout"] = {{"coverage_threshold", c.rollout.coverage_threshold},
                       {"max_decisions", c.rollout.max_decisions},
                       {"calendar_timeout", c.rollout.calendar_timeout},
                       {"synchronous", c.rollout.synchronous},
                       {"record_trajectory", c.rollout.record_trajectory},
                       {"series_interval", c.rollout.series_interval}};
    root["target"] = {{"ply_path", c.target.ply_path},
                      {"shape", geometry::to_string(c.target.shape)},
                      {"point_count", c.target.point_count},
                      {"scale", c.target.scale},
                      {"seed", c.target.seed}};
    root["policy"] = {{"kind", policy::to_string(c.policy.kind)},
                      {"weight_files", c.policy.weight_files},
                      {"epsilon", c.policy.epsilon},
                      {"scripts", c.policy.scripts}};
    return root.dump(indent);
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string fingerprint(const ExperimentConfig& config) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_json(config))));
    return buf;
}

}  // namespace orbinspect::config
