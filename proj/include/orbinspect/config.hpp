#pragma once

// Experiment configuration and its JSON form.
//
// Every key is optional; absent keys keep their defaults and unknown keys are
// rejected. Sections: "env", "orbit", "inertia", "camera", "controller",
// "rollout", "target", "policy".

#include "orbinspect/inspection_env.hpp"
#include "orbinspect/navigation.hpp"
#include "orbinspect/point_cloud.hpp"
#include "orbinspect/policy.hpp"
#include "orbinspect/rollout.hpp"

#include <filesystem>
#include <string>

namespace orbinspect::config {

struct TargetConfig {
    std::string ply_path;  ///< when set, overrides the synthetic shape
    geometry::SyntheticShape shape = geometry::SyntheticShape::Sphere;
    std::size_t point_count = 1000;
    double scale = 1.0;
    std::uint64_t seed = 7;

    geometry::PointCloud build() const;
};

struct ExperimentConfig {
    env::EnvConfig env;
    nav::ControllerConfig controller;
    rollout::RolloutConfig rollout;
    TargetConfig target;
    policy::PolicySpec policy;

    void validate() const;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical JSON with every field spelled out.
std::string to_json(const ExperimentConfig& config, int indent = -1);

/// FNV-1a 64 of the canonical JSON, as 16 hex digits.
std::string fingerprint(const ExperimentConfig& config);
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace orbinspect::config
