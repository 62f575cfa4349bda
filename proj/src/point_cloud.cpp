#include "orbinspect/point_cloud.hpp"

#include "orbinspect/errors.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>

namespace orbinspect::geometry {

void PointCloud::validate() const {
    if (points.empty()) throw ConfigError("point cloud is empty");
    for (const Vec3& p : points) {
        if (!p.allFinite()) throw ConfigError("point cloud has non-finite coordinates");
    }
}

double PointCloud::bounding_radius() const {
    double r = 0.0;
    for (const Vec3& p : points) r = std::max(r, p.norm());
    return r;
}

std::size_t PointMask::count() const noexcept {
    std::size_t c = 0;
    for (std::uint64_t w : bits_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
}

void PointMask::require_same_size(const PointMask& other) const {
    if (other.size_ != size_) throw LengthMismatch("point mask length mismatch");
}

PointMask& PointMask::operator&=(const PointMask& other) {
    require_same_size(other);
    for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] &= other.bits_[i];
    return *this;
}

PointMask& PointMask::operator|=(const PointMask& other) {
    require_same_size(other);
    for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] |= other.bits_[i];
    return *this;
}

std::size_t PointMask::count_and_not(const PointMask& other) const {
    require_same_size(other);
    std::size_t c = 0;
    for (std::size_t i = 0; i < bits_.size(); ++i)
        c += static_cast<std::size_t>(std::popcount(bits_[i] & ~other.bits_[i]));
    return c;
}

bool PointMask::is_subset_of(const PointMask& other) const { return count_and_not(other) == 0; }

std::optional<SyntheticShape> parse_shape(std::string_view name) {
    if (name == "sphere") return SyntheticShape::Sphere;
    if (name == "box") return SyntheticShape::Box;
    if (name == "panel-satellite") return SyntheticShape::PanelSatellite;
    return std::nullopt;
}

std::string_view to_string(SyntheticShape shape) {
    switch (shape) {
        case SyntheticShape::Sphere: return "sphere";
        case SyntheticShape::Box: return "box";
        case SyntheticShape::PanelSatellite: return "panel-satellite";
    }
    return "unknown";
}

namespace {

struct Box {
    Vec3 center;
    Vec3 half;
};

double box_area(const Box& b) {
    const Vec3& h = b.half;
    return 8.0 * (h.x() * h.y() + h.y() * h.z() + h.x() * h.z());
}

// Uniform sample on the surface of an axis-aligned box.
Vec3 sample_box_surface(const Box& b, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const Vec3& h = b.half;
    const std::array<double, 3> face_area{h.y() * h.z(), h.x() * h.z(), h.x() * h.y()};
    std::discrete_distribution<int> pick_axis(face_area.begin(), face_area.end());
    const int axis = pick_axis(rng);
    Vec3 p(unit(rng), unit(rng), unit(rng));
    p[axis] = (rng() & 1u) ? 1.0 : -1.0;
    return b.center + p.cwiseProduct(h);
}

}  // namespace

PointCloud synthetic_cloud(SyntheticShape shape, std::size_t point_count, double scale,
                           std::uint64_t seed) {
    if (point_count < 4) throw ConfigError("synthetic_cloud: point_count must be >= 4");
    if (!(scale > 0.0)) throw ConfigError("synthetic_cloud: scale must be positive");

    PointCloud cloud;
    cloud.points.reserve(point_count);
    std::mt19937_64 rng(seed);

    switch (shape) {
        case SyntheticShape::Sphere: {
            // Fibonacci sphere; the seed rotates the lattice about z.
            const double offset = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
            const double step = 2.0 * std::numbers::pi * (1.0 - 1.0 / std::numbers::phi);
            const auto n = static_cast<double>(point_count);
            for (std::size_t i = 0; i < point_count; ++i) {
                const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / n;
                const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
                const double phi = offset + step * static_cast<double>(i);
                Vec3 p(rho * std::cos(phi), rho * std::sin(phi), z);
                cloud.points.push_back(scale * p.normalized());
            }
            break;
        }
        case SyntheticShape::Box: {
            const Box body{Vec3::Zero(), Vec3::Constant(scale)};
            for (std::size_t i = 0; i < point_count; ++i) cloud.points.push_back(sample_box_surface(body, rng));
            break;
        }
        case SyntheticShape::PanelSatellite: {
            // Box bus with two thin solar panels sticking out along +/- y.
            const std::array<Box, 3> parts{
                Box{Vec3::Zero(), Vec3(0.6, 0.6, 0.6) * scale},
                Box{Vec3(0.0, 1.6, 0.0) * scale, Vec3(0.5, 1.0, 0.03) * scale},
                Box{Vec3(0.0, -1.6, 0.0) * scale, Vec3(0.5, 1.0, 0.03) * scale},
            };
            std::array<double, 3> areas{};
            for (std::size_t k = 0; k < parts.size(); ++k) areas[k] = box_area(parts[k]);
            std::discrete_distribution<std::size_t> pick(areas.begin(), areas.end());
            for (std::size_t i = 0; i < point_count; ++i) cloud.points.push_back(sample_box_surface(parts[pick(rng)], rng));
            break;
        }
    }
    return cloud;
}

}  // namespace orbinspect::geometry
