#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "contour/raster_ops.hpp"

namespace contour::fixtures {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" + std::to_string(rd()));
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

Drawing make_drawing(const std::string& image_id, int width, int height, const std::vector<Polyline>& strokes,
                     std::string annotator) {
    Drawing d;
    d.image_id = image_id;
    d.width = width;
    d.height = height;
    if (!annotator.empty()) {
        d.annotator_id = std::move(annotator);
    }
    int k = 0;
    for (const auto& pts : strokes) {
        d.strokes.push_back({pts, k++});
    }
    normalize_drawing(d);
    return d;
}

void write_dataset_image(const fs::path& root, const std::vector<Drawing>& drawings) {
    const std::string& id = drawings.front().image_id;
    fs::create_directories(root / "drawings" / id);
    fs::create_directories(root / "fields_src");
    fs::create_directories(root / "images");
    for (std::size_t k = 0; k < drawings.size(); ++k) {
        save_drawing(drawings[k], root / "drawings" / id / (std::to_string(k) + ".json"));
    }
    const BinaryMap raster = rasterize_drawing(drawings.front());
    save_binary_map_png(raster, root / "fields_src" / (id + ".png"));
    save_binary_map_png(raster, root / "images" / (id + ".png"));
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const fs::path& p, const std::string& text) {
    if (p.has_parent_path()) {
        fs::create_directories(p.parent_path());
    }
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace contour::fixtures
