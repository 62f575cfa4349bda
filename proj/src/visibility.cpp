#include "orbinspect/visibility.hpp"

#include "orbinspect/errors.hpp"
#include "orbinspect/quickhull.hpp"

#include <cmath>
#include <numbers>

namespace orbinspect::geometry {

void CameraModel::validate() const {
    if (!(fov_half_angle_deg > 0.0 && fov_half_angle_deg <= 180.0))
        throw ConfigError("camera: fov_half_angle_deg must lie in (0, 180]");
    if (!(hpr_diameter > 0.0)) throw ConfigError("camera: hpr_diameter must be positive");
}

std::vector<Vec3> transform_cloud(const PointCloud& cloud, const Eigen::Quaterniond& q_bf_hill) {
    const Mat3 r = q_bf_hill.toRotationMatrix();
    std::vector<Vec3> out;
    out.reserve(cloud.size());
    for (const Vec3& p : cloud.points) out.push_back(r * p);
    return out;
}

PointMask fov_filter(std::span<const Vec3> points, const Vec3& camera_pos, const CameraModel& camera) {
    if (camera_pos.norm() < 1e-6) throw DegenerateCamera("camera position coincides with the target origin");
    const Vec3 boresight = (-camera_pos).normalized();
    const double cos_limit = std::cos(camera.fov_half_angle_deg * std::numbers::pi / 180.0);
    PointMask mask(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Vec3 ray = points[i] - camera_pos;
        const double len = ray.norm();
        if (len == 0.0) continue;
        if (ray.dot(boresight) >= cos_limit * len) mask.set(i);
    }
    return mask;
}

PointMask hidden_point_removal(std::span<const Vec3> points, const Vec3& camera_pos,
                               const CameraModel& camera) {
    if (camera_pos.norm() < 1e-6) throw DegenerateCamera("camera position coincides with the target origin");
    PointMask mask(points.size());
    if (points.empty()) return mask;

    const double radius = camera.hpr_radius();
    std::vector<Vec3> flipped;
    std::vector<std::size_t> source;
    flipped.reserve(points.size() + 1);
    source.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Vec3 rel = points[i] - camera_pos;
        const double len = rel.norm();
        if (len == 0.0) continue;
        flipped.push_back(rel + 2.0 * (radius - len) * rel / len);
        source.push_back(i);
    }
    const std::size_t camera_index = flipped.size();
    flipped.push_back(Vec3::Zero());

    for (std::size_t v : hull_vertex_indices(flipped)) {
        if (v != camera_index) mask.set(source[v]);
    }
    return mask;
}

PointMask visible_points(const PointCloud& cloud, const Eigen::Quaterniond& q_bf_hill,
                         const Vec3& camera_pos, const CameraModel& camera) {
    const std::vector<Vec3> pts = transform_cloud(cloud, q_bf_hill);
    PointMask mask = fov_filter(pts, camera_pos, camera);
    mask &= hidden_point_removal(pts, camera_pos, camera);
    return mask;
}

}  // namespace orbinspect::geometry
