#include "contour/raster_ops.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace contour {

std::size_t BinaryMap::count() const {
    return static_cast<std::size_t>(std::count_if(values().begin(), values().end(), [](auto v) { return v != 0; }));
}

std::vector<Pixel> BinaryMap::pixels() const {
    std::vector<Pixel> out;
    for (int y = 0; y < height(); ++y) {
        for (int x = 0; x < width(); ++x) {
            if (on(x, y)) {
                out.push_back({x, y});
            }
        }
    }
    return out;
}

namespace {

void check_unit_interval(std::span<const double> values) {
    for (double v : values) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument("soft map values must lie in [0,1]");
        }
    }
}

}  // namespace

SoftMap::SoftMap(int width, int height, double fill) : Grid(width, height, fill) { check_unit_interval(values()); }

SoftMap::SoftMap(int width, int height, std::vector<double> values) : Grid(width, height, std::move(values)) {
    check_unit_interval(this->values());
}

SoftMap SoftMap::from_binary(const BinaryMap& m) {
    SoftMap out(m.width(), m.height());
    for (std::size_t i = 0; i < m.size(); ++i) {
        out[i] = m[i] != 0 ? 1.0 : 0.0;
    }
    return out;
}

BinaryMap threshold(const SoftMap& m, double t) {
    if (!(t >= 0.0 && t < 1.0)) {
        throw std::invalid_argument("threshold must lie in [0,1)");
    }
    BinaryMap out(m.width(), m.height());
    for (std::size_t i = 0; i < m.size(); ++i) {
        out[i] = m[i] > t ? 1 : 0;
    }
    return out;
}

BinaryMap thin(const BinaryMap& m) {
    BinaryMap img = m;
    const int w = img.width();
    const int h = img.height();
    auto px = [&](int x, int y) -> int { return img.contains(x, y) && img.on(x, y) ? 1 : 0; };

    std::vector<std::size_t> marked;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int pass = 0; pass < 2; ++pass) {
            marked.clear();
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    if (!img.on(x, y)) {
                        continue;
                    }
                    // Clockwise from north: P2..P9.
                    const std::array<int, 8> n = {px(x, y - 1), px(x + 1, y - 1), px(x + 1, y),     px(x + 1, y + 1),
                                                  px(x, y + 1), px(x - 1, y + 1), px(x - 1, y), px(x - 1, y - 1)};
                    int b = 0;
                    int a = 0;
                    for (int k = 0; k < 8; ++k) {
                        b += n[k];
                        a += (n[k] == 0 && n[(k + 1) % 8] == 1) ? 1 : 0;
                    }
                    if (b < 2 || b > 6 || a != 1) {
                        continue;
                    }
                    const int p2 = n[0], p4 = n[2], p6 = n[4], p8 = n[6];
                    const bool ok = pass == 0 ? (p2 * p4 * p6 == 0 && p4 * p6 * p8 == 0)
                                              : (p2 * p4 * p8 == 0 && p2 * p6 * p8 == 0);
                    if (ok) {
                        marked.push_back(static_cast<std::size_t>(y) * w + x);
                    }
                }
            }
            for (std::size_t i : marked) {
                img[i] = 0;
            }
            changed = changed || !marked.empty();
        }
    }
    return img;
}

SoftMap nms(const SoftMap& m) {
    const int w = m.width();
    const int h = m.height();
    auto clamped = [&](int x, int y) { return m.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1)); };
    auto neighbour = [&](int x, int y) { return m.contains(x, y) ? m.at(x, y) : 0.0; };

    SoftMap out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double v = m.at(x, y);
            if (v <= 0.0) {
                continue;
            }
            const double gx = (clamped(x + 1, y - 1) + 2 * clamped(x + 1, y) + clamped(x + 1, y + 1)) -
                              (clamped(x - 1, y - 1) + 2 * clamped(x - 1, y) + clamped(x - 1, y + 1));
            const double gy = (clamped(x - 1, y + 1) + 2 * clamped(x, y + 1) + clamped(x + 1, y + 1)) -
                              (clamped(x - 1, y - 1) + 2 * clamped(x, y - 1) + clamped(x + 1, y - 1));
            double angle = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
            if (angle < 0.0) {
                angle += 180.0;
            }
            int dx = 1;
            int dy = 0;
            if (angle >= 22.5 && angle < 67.5) {
                dx = 1;
                dy = 1;
            } else if (angle >= 67.5 && angle < 112.5) {
                dx = 0;
                dy = 1;
            } else if (angle >= 112.5 && angle < 157.5) {
                dx = -1;
                dy = 1;
            }
            if (v >= neighbour(x + dx, y + dy) && v >= neighbour(x - dx, y - dy)) {
                out.at(x, y) = v;
            }
        }
    }
    return out;
}

namespace {

constexpr std::int64_t kInf = kNoFeatureSquaredDistance;

// One-dimensional lower envelope of parabolas; f[i] may be kInf.
void edt_1d(std::span<const std::int64_t> f, std::span<std::int64_t> d, std::vector<int>& v,
            std::vector<double>& z) {
    const int n = static_cast<int>(f.size());
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[q] == kInf) {
            continue;
        }
        auto intersect = [&](int p) {
            return (static_cast<double>(f[q] + static_cast<std::int64_t>(q) * q) -
                    static_cast<double>(f[p] + static_cast<std::int64_t>(p) * p)) /
                   (2.0 * (q - p));
        };
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -std::numeric_limits<double>::infinity();
            z[1] = std::numeric_limits<double>::infinity();
            continue;
        }
        double s = intersect(v[k]);
        while (s <= z[k]) {
            --k;
            if (k < 0) {
                break;
            }
            s = intersect(v[k]);
        }
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -std::numeric_limits<double>::infinity();
        } else {
            ++k;
            v[k] = q;
            z[k] = s;
        }
        z[k + 1] = std::numeric_limits<double>::infinity();
    }
    if (k < 0) {
        std::fill(d.begin(), d.end(), kInf);
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (z[j + 1] < q) {
            ++j;
        }
        const std::int64_t dq = q - v[j];
        d[q] = dq * dq + f[v[j]];
    }
}

}  // namespace

Grid<std::int64_t> squared_distance_transform(const BinaryMap& m) {
    const int w = m.width();
    const int h = m.height();
    Grid<std::int64_t> out(w, h, kInf);
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i] != 0) {
            out[i] = 0;
        }
    }

    const int n = std::max(w, h);
    std::vector<std::int64_t> f(n);
    std::vector<std::int64_t> d(n);
    std::vector<int> v(n);
    std::vector<double> z(n + 1);

    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) {
            f[y] = out.at(x, y);
        }
        edt_1d(std::span(f).first(h), std::span(d).first(h), v, z);
        for (int y = 0; y < h; ++y) {
            out.at(x, y) = d[y];
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            f[x] = out.at(x, y);
        }
        edt_1d(std::span(f).first(w), std::span(d).first(w), v, z);
        for (int x = 0; x < w; ++x) {
            out.at(x, y) = d[x];
        }
    }
    return out;
}

RealGrid distance_transform(const BinaryMap& m) {
    const auto sq = squared_distance_transform(m);
    RealGrid out(m.width(), m.height());
    for (std::size_t i = 0; i < sq.size(); ++i) {
        out[i] = sq[i] == kInf ? std::numeric_limits<double>::infinity() : std::sqrt(static_cast<double>(sq[i]));
    }
    return out;
}

}  // namespace contour
