#include "contour/stroke_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace contour {

namespace {

using ordered_json = nlohmann::ordered_json;

void normalize_stroke(Stroke& s, int width, int height) {
    std::vector<Point> cleaned;
    cleaned.reserve(s.points.size());
    for (Point p : s.points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw ParseError("stroke " + std::to_string(s.order_index) + " has a non-finite point");
        }
        p.x = std::clamp(p.x, 0.0, static_cast<double>(width));
        p.y = std::clamp(p.y, 0.0, static_cast<double>(height));
        if (cleaned.empty() || !(cleaned.back() == p)) {
            cleaned.push_back(p);
        }
    }
    if (cleaned.size() < 2) {
        throw ParseError("stroke " + std::to_string(s.order_index) + " has fewer than 2 distinct points");
    }
    s.points = std::move(cleaned);
}

template <typename T>
T require_field(const nlohmann::json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw ParseError(std::string("missing required field '") + key + "'");
    }
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("field '") + key + "' has the wrong type: " + e.what());
    }
}

int require_int(const nlohmann::json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw ParseError(std::string("missing required field '") + key + "'");
    }
    if (!it->is_number_integer()) {
        throw ParseError(std::string("field '") + key + "' must be an integer");
    }
    return it->get<int>();
}

}  // namespace

void normalize_drawing(Drawing& d) {
    if (d.width <= 0 || d.height <= 0) {
        throw ParseError("drawing dimensions must be positive");
    }
    std::set<int> seen;
    for (Stroke& s : d.strokes) {
        if (s.order_index < 0) {
            throw ParseError("order_index must be non-negative");
        }
        if (!seen.insert(s.order_index).second) {
            throw ParseError("duplicate order_index " + std::to_string(s.order_index));
        }
        normalize_stroke(s, d.width, d.height);
    }
    std::stable_sort(d.strokes.begin(), d.strokes.end(),
                     [](const Stroke& a, const Stroke& b) { return a.order_index < b.order_index; });
}

Drawing parse_drawing(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed drawing JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ParseError("drawing document must be a JSON object");
    }

    Drawing d;
    d.image_id = require_field<std::string>(doc, "image_id");
    d.width = require_int(doc, "width");
    d.height = require_int(doc, "height");
    if (auto it = doc.find("annotator_id"); it != doc.end() && !it->is_null()) {
        if (!it->is_string()) {
            throw ParseError("field 'annotator_id' must be a string or null");
        }
        d.annotator_id = it->get<std::string>();
    }

    auto strokes = doc.find("strokes");
    if (strokes == doc.end()) {
        throw ParseError("missing required field 'strokes'");
    }
    if (!strokes->is_array()) {
        throw ParseError("field 'strokes' must be an array");
    }
    for (const auto& js : *strokes) {
        if (!js.is_object()) {
            throw ParseError("each stroke must be a JSON object");
        }
        Stroke s;
        s.order_index = require_int(js, "order_index");
        auto pts = js.find("points");
        if (pts == js.end() || !pts->is_array()) {
            throw ParseError("stroke is missing its 'points' array");
        }
        for (const auto& jp : *pts) {
            if (!jp.is_array() || jp.size() != 2 || !jp[0].is_number() || !jp[1].is_number()) {
                throw ParseError("each point must be an [x, y] number pair");
            }
            s.points.push_back({jp[0].get<double>(), jp[1].get<double>()});
        }
        d.strokes.push_back(std::move(s));
    }
    normalize_drawing(d);
    return d;
}

std::string serialize_drawing(const Drawing& d) {
    ordered_json doc;
    doc["image_id"] = d.image_id;
    doc["width"] = d.width;
    doc["height"] = d.height;
    doc["annotator_id"] = d.annotator_id ? ordered_json(*d.annotator_id) : ordered_json(nullptr);
    ordered_json strokes = ordered_json::array();
    for (const Stroke& s : d.strokes) {
        ordered_json js;
        js["order_index"] = s.order_index;
        ordered_json pts = ordered_json::array();
        for (const Point& p : s.points) {
            pts.push_back(ordered_json::array({p.x, p.y}));
        }
        js["points"] = std::move(pts);
        strokes.push_back(std::move(js));
    }
    doc["strokes"] = std::move(strokes);
    return doc.dump();
}

double stroke_length(const Stroke& s) {
    double total = 0.0;
    for (std::size_t i = 1; i < s.points.size(); ++i) {
        total += std::hypot(s.points[i].x - s.points[i - 1].x, s.points[i].y - s.points[i - 1].y);
    }
    return total;
}

Stroke resample_stroke(const Stroke& s, double spacing) {
    if (!(spacing > 0.0) || !std::isfinite(spacing)) {
        throw std::invalid_argument("resample spacing must be positive");
    }
    Stroke out;
    out.order_index = s.order_index;
    if (s.points.empty()) {
        return out;
    }
    if (s.points.size() == 1 || stroke_length(s) <= spacing) {
        out.points = {s.points.front(), s.points.back()};
        if (s.points.size() == 1) {
            out.points.pop_back();
        }
        return out;
    }

    // Segments that are already short enough must stay untouched so that
    // resampling is idempotent; the slack absorbs rounding in hypot.
    constexpr double kSlack = 1e-9;
    out.points.push_back(s.points.front());
    for (std::size_t i = 1; i < s.points.size(); ++i) {
        const Point a = s.points[i - 1];
        const Point b = s.points[i];
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        const auto pieces = static_cast<int>(std::max(1.0, std::ceil(len / spacing - kSlack)));
        for (int k = 1; k < pieces; ++k) {
            const double t = static_cast<double>(k) / pieces;
            out.points.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
        }
        out.points.push_back(b);
    }
    return out;
}

std::vector<Pixel> digital_line(Pixel a, Pixel b) {
    std::vector<Pixel> out;
    const int dx = std::abs(b.x - a.x);
    const int dy = -std::abs(b.y - a.y);
    const int sx = a.x < b.x ? 1 : -1;
    const int sy = a.y < b.y ? 1 : -1;
    int err = dx + dy;
    int x = a.x;
    int y = a.y;
    out.reserve(static_cast<std::size_t>(std::max(dx, -dy)) + 1);
    for (;;) {
        out.push_back({x, y});
        if (x == b.x && y == b.y) {
            break;
        }
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y += sy;
        }
    }
    return out;
}

BinaryMap rasterize_drawing(const Drawing& d, double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw std::invalid_argument("rasterize scale must be positive");
    }
    const auto w = static_cast<int>(std::lround(d.width * scale));
    const auto h = static_cast<int>(std::lround(d.height * scale));
    if (w <= 0 || h <= 0) {
        throw std::invalid_argument("rasterized output would have zero area");
    }
    BinaryMap map(w, h);
    auto to_pixel = [&](Point p) {
        return Pixel{std::clamp(static_cast<int>(std::lround(p.x * scale)), 0, w - 1),
                     std::clamp(static_cast<int>(std::lround(p.y * scale)), 0, h - 1)};
    };
    for (const Stroke& s : d.strokes) {
        if (s.points.size() == 1) {
            map.set(to_pixel(s.points.front()));
        }
        for (std::size_t i = 1; i < s.points.size(); ++i) {
            for (Pixel px : digital_line(to_pixel(s.points[i - 1]), to_pixel(s.points[i]))) {
                map.set(px);
            }
        }
    }
    return map;
}

DrawingStats drawing_stats(const std::vector<Drawing>& drawings) {
    if (drawings.empty()) {
        throw std::invalid_argument("drawing_stats needs at least one drawing");
    }
    std::size_t strokes = 0;
    std::size_t points = 0;
    for (const Drawing& d : drawings) {
        strokes += d.strokes.size();
        for (const Stroke& s : d.strokes) {
            points += s.points.size();
        }
    }
    const auto n = static_cast<double>(drawings.size());
    return {drawings.size(), static_cast<double>(strokes) / n, static_cast<double>(points) / n};
}

Drawing load_drawing(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open drawing file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_drawing(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void save_drawing(const Drawing& d, const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write drawing file " + path.string());
    }
    out << serialize_drawing(d) << '\n';
}

Dataset::Dataset(std::filesystem::path root) : root_(std::move(root)) {
    if (!std::filesystem::is_directory(root_ / "drawings")) {
        throw Error("dataset root " + root_.string() + " has no drawings/ directory");
    }
}

std::vector<std::string> Dataset::image_ids() const {
    std::vector<std::string> ids;
    for (const auto& entry : std::filesystem::directory_iterator(root_ / "drawings")) {
        if (entry.is_directory()) {
            ids.push_back(entry.path().filename().string());
        }
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<Drawing> Dataset::drawings(const std::string& image_id) const {
    const auto dir = root_ / "drawings" / image_id;
    if (!std::filesystem::is_directory(dir)) {
        throw Error("no drawings for image " + image_id);
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            files.push_back(entry.path());
        }
    }
    // Numeric stems sort numerically so 10.json follows 9.json.
    auto key = [](const std::filesystem::path& p) {
        const std::string stem = p.stem().string();
        const bool numeric = !stem.empty() && std::all_of(stem.begin(), stem.end(), ::isdigit);
        return std::make_tuple(!numeric, numeric ? stem.size() : 0, stem);
    };
    std::sort(files.begin(), files.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });

    std::vector<Drawing> out;
    out.reserve(files.size());
    for (const auto& f : files) {
        out.push_back(load_drawing(f));
    }
    return out;
}

std::optional<std::filesystem::path> Dataset::image_path(const std::string& image_id) const {
    for (const char* ext : {".jpg", ".png"}) {
        auto p = root_ / "images" / (image_id + ext);
        if (std::filesystem::is_regular_file(p)) {
            return p;
        }
    }
    return std::nullopt;
}

}  // namespace contour
