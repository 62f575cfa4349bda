#pragma once

#include "orbinspect/common.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace orbinspect::geometry {

/// Target points of interest in the target body frame [m].
struct PointCloud {
    std::vector<Vec3> points;

    std::size_t size() const noexcept { return points.size(); }
    void validate() const;
    /// Largest distance of any point from the body origin.
    double bounding_radius() const;
};

/// Fixed-length bit vector over cloud indices.
class PointMask {
public:
    PointMask() = default;
    explicit PointMask(std::size_t size) : bits_((size + 63) / 64, 0), size_(size) {}

    std::size_t size() const noexcept { return size_; }
    bool test(std::size_t i) const { return (bits_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i, bool value = true) {
        const std::uint64_t bit = std::uint64_t{1} << (i & 63);
        if (value) bits_[i >> 6] |= bit;
        else bits_[i >> 6] &= ~bit;
    }
    std::size_t count() const noexcept;

    PointMask& operator&=(const PointMask& other);
    PointMask& operator|=(const PointMask& other);
    /// popcount(this & ~other)
    std::size_t count_and_not(const PointMask& other) const;
    bool is_subset_of(const PointMask& other) const;

    friend bool operator==(const PointMask&, const PointMask&) = default;

private:
    void require_same_size(const PointMask& other) const;

    std::vector<std::uint64_t> bits_;
    std::size_t size_ = 0;
};

inline PointMask operator&(PointMask a, const PointMask& b) { return a &= b; }
inline PointMask operator|(PointMask a, const PointMask& b) { return a |= b; }

enum class SyntheticShape { Sphere, Box, PanelSatellite };

std::optional<SyntheticShape> parse_shape(std::string_view name);
std::string_view to_string(SyntheticShape shape);

/// Seeded surface sampling of simple stand-in targets. `scale` is the sphere
/// radius, or the half-extent of the box body.
PointCloud synthetic_cloud(SyntheticShape shape, std::size_t point_count, double scale,
                           std::uint64_t seed = 7);

}  // namespace orbinspect::geometry
