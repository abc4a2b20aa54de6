#include <cmath>
#include <cstring>

#include <png.h>

#include "contour/raster_ops.hpp"

namespace contour {

namespace {

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<png_byte> bytes;
};

GrayImage read_gray_png(const std::filesystem::path& path) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (png_image_begin_read_from_file(&image, path.c_str()) == 0) {
        throw ParseError("cannot read PNG " + path.string() + ": " + image.message);
    }
    image.format = PNG_FORMAT_GRAY;
    GrayImage out;
    out.width = static_cast<int>(image.width);
    out.height = static_cast<int>(image.height);
    out.bytes.resize(PNG_IMAGE_SIZE(image));
    if (png_image_finish_read(&image, nullptr, out.bytes.data(), 0, nullptr) == 0) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw ParseError("cannot decode PNG " + path.string() + ": " + msg);
    }
    return out;
}

void write_gray_png(int width, int height, const std::vector<png_byte>& bytes, const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(width);
    image.height = static_cast<png_uint_32>(height);
    image.format = PNG_FORMAT_GRAY;
    if (png_image_write_to_file(&image, path.c_str(), 0, bytes.data(), 0, nullptr) == 0) {
        throw Error("cannot write PNG " + path.string() + ": " + image.message);
    }
}

}  // namespace

SoftMap load_soft_map_png(const std::filesystem::path& path) {
    auto img = read_gray_png(path);
    std::vector<double> values(img.bytes.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = img.bytes[i] / 255.0;
    }
    return SoftMap(img.width, img.height, std::move(values));
}

void save_soft_map_png(const SoftMap& m, const std::filesystem::path& path) {
    std::vector<png_byte> bytes(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        bytes[i] = static_cast<png_byte>(std::lround(255.0 * m[i]));
    }
    write_gray_png(m.width(), m.height(), bytes, path);
}

BinaryMap load_binary_map_png(const std::filesystem::path& path) {
    auto img = read_gray_png(path);
    BinaryMap out(img.width, img.height);
    for (std::size_t i = 0; i < img.bytes.size(); ++i) {
        out[i] = img.bytes[i] != 0 ? 1 : 0;
    }
    return out;
}

void save_binary_map_png(const BinaryMap& m, const std::filesystem::path& path) {
    std::vector<png_byte> bytes(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        bytes[i] = m[i] != 0 ? 255 : 0;
    }
    write_gray_png(m.width(), m.height(), bytes, path);
}

}  // namespace contour
