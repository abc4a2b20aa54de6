#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "contour/stroke_model.hpp"

namespace contour::fixtures {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "contour");
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    std::filesystem::path path_;
};

using Polyline = std::vector<Point>;

/// Drawing with strokes numbered 0..n-1, normalized.
Drawing make_drawing(const std::string& image_id, int width, int height, const std::vector<Polyline>& strokes,
                     std::string annotator = {});

/// Writes drawings/<id>/<k>.json for each drawing, plus fields_src/<id>.png
/// (the rasterized first drawing) and a placeholder images/<id>.png.
void write_dataset_image(const std::filesystem::path& root, const std::vector<Drawing>& drawings);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& text);

}  // namespace contour::fixtures
