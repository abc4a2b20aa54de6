#include "agents.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace contour::agents {

namespace {

Point clamp_to(Point p, int w, int h) {
    return {std::clamp(p.x, 0.0, static_cast<double>(w)), std::clamp(p.y, 0.0, static_cast<double>(h))};
}

}  // namespace

Drawing random_scene(std::uint64_t seed, int width, int height) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Drawing d;
    d.image_id = "scene" + std::to_string(seed);
    d.width = width;
    d.height = height;
    const int n_strokes = 5 + static_cast<int>(rng() % 3);
    const double margin = 24.0;
    for (int s = 0; s < n_strokes; ++s) {
        Point p{margin + unit(rng) * (width - 2 * margin), margin + unit(rng) * (height - 2 * margin)};
        double heading = unit(rng) * 2 * std::numbers::pi;
        Stroke stroke;
        stroke.order_index = s;
        stroke.points.push_back(p);
        const int n_steps = 40 + static_cast<int>(rng() % 20);
        for (int k = 0; k < n_steps; ++k) {
            heading += (unit(rng) - 0.5) * 0.5;
            Point next{p.x + 4.0 * std::cos(heading), p.y + 4.0 * std::sin(heading)};
            // Turn back toward the centre instead of leaving the margin.
            if (next.x < margin || next.x > width - margin || next.y < margin || next.y > height - margin) {
                heading = std::atan2(height / 2.0 - p.y, width / 2.0 - p.x);
                next = {p.x + 4.0 * std::cos(heading), p.y + 4.0 * std::sin(heading)};
            }
            p = next;
            stroke.points.push_back(p);
        }
        d.strokes.push_back(std::move(stroke));
    }
    normalize_drawing(d);
    return d;
}

Drawing tracer(const Drawing& scene, std::uint64_t seed, double jitter) {
    std::mt19937_64 rng(seed ^ 0x7472616365ULL);
    std::uniform_real_distribution<double> noise(-jitter / std::numbers::sqrt2, jitter / std::numbers::sqrt2);
    Drawing d;
    d.image_id = scene.image_id;
    d.width = scene.width;
    d.height = scene.height;
    d.annotator_id = "tracer";
    for (const Stroke& s : scene.strokes) {
        Stroke copy;
        copy.order_index = s.order_index;
        for (const Point& p : resample_stroke(s, 2.0).points) {
            copy.points.push_back(clamp_to({p.x + noise(rng), p.y + noise(rng)}, d.width, d.height));
        }
        d.strokes.push_back(std::move(copy));
    }
    normalize_drawing(d);
    return d;
}

Drawing scribbler(int width, int height, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x736372696262ULL);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Drawing d;
    d.image_id = "scribble";
    d.width = width;
    d.height = height;
    d.annotator_id = "scribbler";
    const int n_strokes = 4 + static_cast<int>(rng() % 4);
    for (int s = 0; s < n_strokes; ++s) {
        Stroke stroke;
        stroke.order_index = s;
        Point p{unit(rng) * width, unit(rng) * height};
        stroke.points.push_back(p);
        const int n_steps = 8 + static_cast<int>(rng() % 8);
        for (int k = 0; k < n_steps; ++k) {
            const double a = unit(rng) * 2 * std::numbers::pi;
            p = clamp_to({p.x + 15.0 * std::cos(a), p.y + 15.0 * std::sin(a)}, width, height);
            stroke.points.push_back(p);
        }
        d.strokes.push_back(std::move(stroke));
    }
    // Random walks clamped at a corner can collapse; normalize drops
    // duplicates and a degenerate stroke would throw, so filter first.
    std::erase_if(d.strokes, [](const Stroke& s) {
        return std::none_of(s.points.begin(), s.points.end(), [&](const Point& p) { return !(p == s.points.front()); });
    });
    normalize_drawing(d);
    return d;
}

}  // namespace contour::agents
