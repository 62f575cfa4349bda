#pragma once

#include "orbinspect/common.hpp"
#include "orbinspect/point_cloud.hpp"

#include <span>

namespace orbinspect::geometry {

struct CameraModel {
    double fov_half_angle_deg = 7.5;     ///< half of the full 15 degree cone
    double hpr_diameter = 208874.855;    ///< spherical-flip projection diameter [m]

    void validate() const;
    double hpr_radius() const { return 0.5 * hpr_diameter; }
};

/// Rotates body-frame points into Hill's frame (target centred at the origin).
std::vector<Vec3> transform_cloud(const PointCloud& cloud, const Eigen::Quaterniond& q_bf_hill);

/// Cone test about the boresight from `camera_pos` toward the Hill origin.
/// Throws DegenerateCamera when the camera sits on the origin.
PointMask fov_filter(std::span<const Vec3> points, const Vec3& camera_pos, const CameraModel& camera);

/// Spherical-flip hidden point removal: a point is visible when its flipped
/// image is a vertex of the convex hull of all images plus the camera.
/// Throws DegenerateCamera when the camera sits on the origin.
PointMask hidden_point_removal(std::span<const Vec3> points, const Vec3& camera_pos,
                               const CameraModel& camera);

/// transform_cloud, then hidden_point_removal AND fov_filter.
PointMask visible_points(const PointCloud& cloud, const Eigen::Quaterniond& q_bf_hill,
                         const Vec3& camera_pos, const CameraModel& camera);

}  // namespace orbinspect::geometry
