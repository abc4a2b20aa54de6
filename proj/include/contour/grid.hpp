#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "contour/error.hpp"

namespace contour {

struct Pixel {
    int x = 0;
    int y = 0;

    friend bool operator==(const Pixel&, const Pixel&) = default;
    friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

/// Row-major 2-D array with value semantics.
template <typename T>
class Grid {
public:
    Grid() = default;

    Grid(int width, int height, T fill = T{}) : width_(width), height_(height) {
        if (width <= 0 || height <= 0) {
            throw std::invalid_argument("grid dimensions must be positive");
        }
        data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }

    Grid(int width, int height, std::vector<T> values) : width_(width), height_(height), data_(std::move(values)) {
        if (width <= 0 || height <= 0) {
            throw std::invalid_argument("grid dimensions must be positive");
        }
        if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
            throw std::invalid_argument("grid value count does not match width*height");
        }
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    T& at(int x, int y) { return data_[index(x, y)]; }
    const T& at(int x, int y) const { return data_[index(x, y)]; }
    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }

    bool same_shape(const Grid& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

using RealGrid = Grid<double>;

/// Boundary pixels: nonzero means on.
class BinaryMap : public Grid<std::uint8_t> {
public:
    BinaryMap() = default;
    BinaryMap(int width, int height) : Grid(width, height, 0) {}

    bool on(int x, int y) const { return at(x, y) != 0; }
    void set(int x, int y, bool value = true) { at(x, y) = value ? 1 : 0; }
    void set(Pixel p, bool value = true) { set(p.x, p.y, value); }

    std::size_t count() const;
    std::vector<Pixel> pixels() const;
};

/// Confidence map with every value in [0,1].
class SoftMap : public Grid<double> {
public:
    SoftMap() = default;
    SoftMap(int width, int height, double fill = 0.0);
    SoftMap(int width, int height, std::vector<double> values);

    static SoftMap from_binary(const BinaryMap& m);
};

template <typename A, typename B>
void require_same_shape(const Grid<A>& a, const Grid<B>& b, const char* what) {
    if (a.width() != b.width() || a.height() != b.height()) {
        throw DimensionMismatch(std::string(what) + ": dimensions differ (" + std::to_string(a.width()) + "x" +
                                std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                                std::to_string(b.height()) + ")");
    }
}

}  // namespace contour
