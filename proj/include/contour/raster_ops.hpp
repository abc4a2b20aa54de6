#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>

#include "contour/grid.hpp"

namespace contour {

/// On iff value > t (strict, so t = 0 excludes exact zeros).
BinaryMap threshold(const SoftMap& m, double t);

/// Zhang-Suen two-subcycle thinning iterated to convergence.
BinaryMap thin(const BinaryMap& m);

/// Non-maximum suppression along the Sobel gradient, quantized to 4
/// orientations. A value survives iff it is >= both neighbours across the
/// edge; everything else becomes 0.
SoftMap nms(const SoftMap& m);

inline constexpr std::int64_t kNoFeatureSquaredDistance = std::numeric_limits<std::int64_t>::max();

/// Exact squared Euclidean distance to the nearest on-pixel
/// (Felzenszwalb-Huttenlocher). Every cell is kNoFeatureSquaredDistance
/// when the map has no on-pixel.
Grid<std::int64_t> squared_distance_transform(const BinaryMap& m);

/// Euclidean distance to the nearest on-pixel; +infinity for an empty map.
RealGrid distance_transform(const BinaryMap& m);

// 8-bit grayscale PNG. Soft maps store round(255*v); binary maps store {0,255}
// and load any nonzero sample as on.
SoftMap load_soft_map_png(const std::filesystem::path& path);
void save_soft_map_png(const SoftMap& m, const std::filesystem::path& path);
BinaryMap load_binary_map_png(const std::filesystem::path& path);
void save_binary_map_png(const BinaryMap& m, const std::filesystem::path& path);

}  // namespace contour
