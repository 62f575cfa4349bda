#pragma once

#include "orbinspect/point_cloud.hpp"

#include <filesystem>
#include <istream>

namespace orbinspect::geometry {

/// Reads the x/y/z vertex properties of an ASCII PLY file. Other vertex
/// properties and all non-vertex elements are skipped. Binary encodings throw
/// UnsupportedFormat; malformed content throws ParseError with a line number.
PointCloud load_ply(const std::filesystem::path& path);
PointCloud parse_ply(std::istream& in);

}  // namespace orbinspect::geometry
