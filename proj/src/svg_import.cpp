#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "contour/stroke_model.hpp"

namespace contour {

namespace {

namespace pt = boost::property_tree;

class NumberScanner {
public:
    explicit NumberScanner(std::string_view text) : text_(text) {}

    void skip_separators() {
        while (pos_ < text_.size() && (std::isspace(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == ',')) {
            ++pos_;
        }
    }

    bool at_end() {
        skip_separators();
        return pos_ >= text_.size();
    }

    bool at_number() {
        skip_separators();
        if (pos_ >= text_.size()) {
            return false;
        }
        const char c = text_[pos_];
        return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.';
    }

    char peek() {
        skip_separators();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    char take_command() {
        skip_separators();
        return text_[pos_++];
    }

    double number() {
        skip_separators();
        if (pos_ < text_.size() && text_[pos_] == '+') {
            ++pos_;
        }
        double value = 0.0;
        const char* begin = text_.data() + pos_;
        const char* end = text_.data() + text_.size();
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc{} || ptr == begin || !std::isfinite(value)) {
            throw ParseError("expected a number in SVG data near offset " + std::to_string(pos_));
        }
        pos_ += static_cast<std::size_t>(ptr - begin);
        return value;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

double distance_to_segment(Point p, Point a, Point b) {
    const double vx = b.x - a.x;
    const double vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    double t = 0.0;
    if (len2 > 0.0) {
        t = std::clamp(((p.x - a.x) * vx + (p.y - a.y) * vy) / len2, 0.0, 1.0);
    }
    return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

Point midpoint(Point a, Point b) { return {(a.x + b.x) * 0.5, (a.y + b.y) * 0.5}; }

// The curve lies in the convex hull of its control points, so once both inner
// control points are within tol of the chord the whole arc is too.
void flatten_cubic(Point p0, Point p1, Point p2, Point p3, double tol, int depth, std::vector<Point>& out) {
    constexpr int kMaxDepth = 32;
    if (depth >= kMaxDepth ||
        (distance_to_segment(p1, p0, p3) <= tol && distance_to_segment(p2, p0, p3) <= tol)) {
        out.push_back(p3);
        return;
    }
    const Point p01 = midpoint(p0, p1);
    const Point p12 = midpoint(p1, p2);
    const Point p23 = midpoint(p2, p3);
    const Point p012 = midpoint(p01, p12);
    const Point p123 = midpoint(p12, p23);
    const Point mid = midpoint(p012, p123);
    flatten_cubic(p0, p01, p012, mid, tol, depth + 1, out);
    flatten_cubic(mid, p123, p23, p3, tol, depth + 1, out);
}

// Each moveto starts a new stroke.
std::vector<std::vector<Point>> parse_path_data(std::string_view d, double tol) {
    std::vector<std::vector<Point>> subpaths;
    NumberScanner scan(d);
    Point current;
    char command = '\0';

    while (!scan.at_end()) {
        if (!scan.at_number()) {
            command = scan.take_command();
        } else if (command == '\0') {
            throw ParseError("SVG path data must start with a command");
        }
        const bool relative = std::islower(static_cast<unsigned char>(command)) != 0;
        auto read_point = [&] {
            Point p{scan.number(), scan.number()};
            if (relative) {
                p.x += current.x;
                p.y += current.y;
            }
            return p;
        };

        switch (std::toupper(static_cast<unsigned char>(command))) {
            case 'M': {
                current = read_point();
                subpaths.push_back({current});
                // Coordinate pairs following a moveto are implicit linetos.
                command = relative ? 'l' : 'L';
                break;
            }
            case 'L': {
                if (subpaths.empty()) {
                    throw ParseError("SVG path draws before any moveto");
                }
                current = read_point();
                subpaths.back().push_back(current);
                break;
            }
            case 'C': {
                if (subpaths.empty()) {
                    throw ParseError("SVG path draws before any moveto");
                }
                const Point start = current;
                const Point c1 = read_point();
                const Point c2 = read_point();
                const Point end = read_point();
                flatten_cubic(start, c1, c2, end, tol, 0, subpaths.back());
                current = end;
                break;
            }
            default:
                throw ParseError(std::string("unsupported SVG path command '") + command + "'");
        }
    }
    std::erase_if(subpaths, [](const auto& sp) { return sp.size() < 2; });
    return subpaths;
}

std::vector<Point> parse_polyline_points(std::string_view text) {
    NumberScanner scan(text);
    std::vector<Point> pts;
    while (!scan.at_end()) {
        const double x = scan.number();
        if (scan.at_end()) {
            throw ParseError("polyline has an odd number of coordinates");
        }
        pts.push_back({x, scan.number()});
    }
    return pts;
}

int parse_dimension(const pt::ptree& svg, const char* name) {
    auto attr = svg.get_optional<std::string>(std::string("<xmlattr>.") + name);
    if (!attr) {
        throw ParseError(std::string("SVG is missing the '") + name + "' attribute");
    }
    double value = 0.0;
    const char* begin = attr->data();
    auto [ptr, ec] = std::from_chars(begin, begin + attr->size(), value);
    if (ec != std::errc{} || ptr == begin || !(value > 0.0)) {
        throw ParseError(std::string("SVG '") + name + "' attribute is not a positive length");
    }
    return static_cast<int>(std::lround(value));
}

void collect_strokes(const pt::ptree& node, double tol, std::vector<Stroke>& strokes) {
    for (const auto& [tag, child] : node) {
        if (tag == "<xmlattr>" || tag == "<xmlcomment>") {
            continue;
        }
        if (tag == "path") {
            const auto d = child.get<std::string>("<xmlattr>.d", "");
            for (auto& sp : parse_path_data(d, tol)) {
                strokes.push_back({std::move(sp), static_cast<int>(strokes.size())});
            }
        } else if (tag == "polyline") {
            auto pts = parse_polyline_points(child.get<std::string>("<xmlattr>.points", ""));
            strokes.push_back({std::move(pts), static_cast<int>(strokes.size())});
        } else if (tag == "g" || tag == "svg") {
            collect_strokes(child, tol, strokes);
        } else if (tag == "title" || tag == "desc" || tag == "metadata" || tag == "defs") {
            continue;
        } else {
            throw ParseError("unsupported SVG element <" + tag + ">");
        }
    }
}

}  // namespace

Drawing import_svg(std::string_view text, std::string image_id, double flatten_tol) {
    if (!(flatten_tol > 0.0)) {
        throw std::invalid_argument("flatten tolerance must be positive");
    }
    pt::ptree tree;
    try {
        std::istringstream in{std::string(text)};
        pt::read_xml(in, tree);
    } catch (const pt::xml_parser_error& e) {
        throw ParseError(std::string("malformed SVG: ") + e.what());
    }
    auto root = tree.get_child_optional("svg");
    if (!root) {
        throw ParseError("document has no <svg> root element");
    }

    Drawing d;
    d.image_id = std::move(image_id);
    d.width = parse_dimension(*root, "width");
    d.height = parse_dimension(*root, "height");
    collect_strokes(*root, flatten_tol, d.strokes);
    normalize_drawing(d);
    return d;
}

}  // namespace contour
