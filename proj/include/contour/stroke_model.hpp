#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "contour/grid.hpp"

namespace contour {

/// Image-space coordinate in pixels, origin at the top-left corner.
struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

struct Stroke {
    std::vector<Point> points;
    int order_index = 0;

    friend bool operator==(const Stroke&, const Stroke&) = default;
};

/// One annotator's vector drawing of one image. Strokes are kept sorted by
/// order_index and every point lies inside [0,width]x[0,height].
struct Drawing {
    std::string image_id;
    int width = 0;
    int height = 0;
    std::optional<std::string> annotator_id;
    std::vector<Stroke> strokes;

    friend bool operator==(const Drawing&, const Drawing&) = default;
};

struct DrawingStats {
    std::size_t n_drawings = 0;
    double mean_strokes = 0.0;
    double mean_control_points = 0.0;
};

inline constexpr double kDefaultFlattenTolerance = 0.25;

/// Enforces the Drawing invariants in place: clamps points into the image,
/// drops consecutive duplicates, and sorts strokes by order_index.
/// Throws ParseError on non-finite points, strokes with fewer than two
/// distinct points, duplicate order indices or non-positive dimensions.
void normalize_drawing(Drawing& d);

Drawing parse_drawing(std::string_view text);

/// Canonical JSON with fixed key order and shortest round-trip numbers.
std::string serialize_drawing(const Drawing& d);

/// Reads `path` elements (M/L/C, absolute or relative) and `polyline`
/// elements in document order; each path or polyline becomes one stroke.
Drawing import_svg(std::string_view text, std::string image_id, double flatten_tol = kDefaultFlattenTolerance);

/// Subdivides every segment into equal pieces no longer than `spacing`,
/// keeping the original vertices. A stroke no longer than `spacing`
/// collapses to its endpoints.
Stroke resample_stroke(const Stroke& s, double spacing);

double stroke_length(const Stroke& s);

/// Renders every segment as an 8-connected one-pixel-wide digital line.
/// Output is round(width*scale) x round(height*scale).
BinaryMap rasterize_drawing(const Drawing& d, double scale = 1.0);

/// Pixels of the integer line from a to b (midpoint/Bresenham), inclusive.
std::vector<Pixel> digital_line(Pixel a, Pixel b);

DrawingStats drawing_stats(const std::vector<Drawing>& drawings);

Drawing load_drawing(const std::filesystem::path& path);
void save_drawing(const Drawing& d, const std::filesystem::path& path);

/// Dataset layout: drawings/<image_id>/<k>.json and images/<image_id>.{jpg,png}.
class Dataset {
public:
    explicit Dataset(std::filesystem::path root);

    const std::filesystem::path& root() const noexcept { return root_; }

    /// Image ids that have a drawings/<id>/ directory, sorted.
    std::vector<std::string> image_ids() const;

    /// All drawings of one image ordered by file name.
    std::vector<Drawing> drawings(const std::string& image_id) const;

    std::optional<std::filesystem::path> image_path(const std::string& image_id) const;

private:
    std::filesystem::path root_;
};

}  // namespace contour
