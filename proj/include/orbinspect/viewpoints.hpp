#pragma once

#include "orbinspect/common.hpp"

#include <optional>
#include <span>

namespace orbinspect::geometry {

/// Static camera stations in Hill's frame; the high-level action space.
class ViewpointSet {
public:
    ViewpointSet() = default;
    ViewpointSet(std::vector<Vec3> positions, double radius);

    std::size_t size() const noexcept { return positions_.size(); }
    const Vec3& operator[](std::size_t i) const { return positions_[i]; }
    const Vec3& at(std::size_t i) const { return positions_.at(i); }
    std::span<const Vec3> positions() const noexcept { return positions_; }
    double radius() const noexcept { return radius_; }

    /// Smallest angle (rad) between any two distinct stations.
    double min_pairwise_angle() const noexcept { return min_pairwise_angle_; }
    /// Per-station angle to its nearest neighbour (rad).
    std::span<const double> nearest_neighbor_angles() const noexcept { return nearest_angles_; }

    /// Index of the station exactly equal to `p`, if any.
    std::optional<std::size_t> index_of(const Vec3& p) const;
    /// Index of the station closest to `p`.
    std::size_t nearest(const Vec3& p) const;

private:
    std::vector<Vec3> positions_;
    std::vector<double> nearest_angles_;
    double radius_ = 0.0;
    double min_pairwise_angle_ = 0.0;
};

/// Angle between two vectors, robust near 0 and pi.
double angle_between(const Vec3& a, const Vec3& b);

/// Fibonacci lattice projected onto a sphere:
/// z_i = 1 - 2(i + 0.5)/count, azimuth_i = 2*pi*i*(1 - 1/golden_ratio).
ViewpointSet fibonacci_viewpoints(std::size_t count, double radius);

}  // namespace orbinspect::geometry
