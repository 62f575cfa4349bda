#include "orbinspect/viewpoints.hpp"

#include "orbinspect/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace orbinspect::geometry {

double angle_between(const Vec3& a, const Vec3& b) {
    // atan2 form stays accurate where acos loses digits.
    return std::atan2(a.cross(b).norm(), a.dot(b));
}

ViewpointSet::ViewpointSet(std::vector<Vec3> positions, double radius)
    : positions_(std::move(positions)), radius_(radius) {
    const std::size_t m = positions_.size();
    nearest_angles_.assign(m, std::numeric_limits<double>::infinity());
    min_pairwise_angle_ = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const double a = angle_between(positions_[i], positions_[j]);
            nearest_angles_[i] = std::min(nearest_angles_[i], a);
            nearest_angles_[j] = std::min(nearest_angles_[j], a);
            min_pairwise_angle_ = std::min(min_pairwise_angle_, a);
        }
    }
}

std::optional<std::size_t> ViewpointSet::index_of(const Vec3& p) const {
    for (std::size_t i = 0; i < positions_.size(); ++i) {
        if (positions_[i] == p) return i;
    }
    return std::nullopt;
}

std::size_t ViewpointSet::nearest(const Vec3& p) const {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < positions_.size(); ++i) {
        const double d = (positions_[i] - p).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

ViewpointSet fibonacci_viewpoints(std::size_t count, double radius) {
    if (count < 2) throw ConfigError("fibonacci_viewpoints: count must be >= 2");
    if (!(radius > 0.0)) throw ConfigError("fibonacci_viewpoints: radius must be positive");

    const double golden = std::numbers::phi;
    const double step = 2.0 * std::numbers::pi * (1.0 - 1.0 / golden);
    std::vector<Vec3> pts;
    pts.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(count);
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = step * static_cast<double>(i);
        pts.emplace_back(radius * rho * std::cos(phi), radius * rho * std::sin(phi), radius * z);
    }
    return ViewpointSet(std::move(pts), radius);
}

}  // namespace orbinspect::geometry
