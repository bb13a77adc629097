#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gaitlab {

// 8-bit grayscale raster, row-major, origin at the top-left corner.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // size == width * height

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
};

// Binary mask, same layout, values restricted to {0, 1}.
struct BinaryImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    BinaryImage() = default;
    BinaryImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }

    std::size_t count() const;

    bool operator==(const BinaryImage& o) const {
        return width == o.width && height == o.height && pixels == o.pixels;
    }
};

// Axis-aligned bounding box, half-open on neither side: [x0,x1] x [y0,y1].
struct Box {
    int x0 = 0, y0 = 0, x1 = -1, y1 = -1;

    bool empty() const { return x1 < x0 || y1 < y0; }
    long long area() const {
        return empty() ? 0 : static_cast<long long>(x1 - x0 + 1) * (y1 - y0 + 1);
    }
};

// Bounding box of set pixels; empty Box when there are none.
Box foreground_box(const BinaryImage& img);

double box_iou(const Box& a, const Box& b);

// Canonical silhouette frame edge length used throughout the pipeline.
inline constexpr int kFrameSize = 240;

// PNG I/O. Images are written as 8-bit grayscale. Reads accept any PNG and
// collapse it to 8-bit gray. Failures raise IoError.
GrayImage read_png(const std::string& path);
void write_png(const std::string& path, const GrayImage& img);

// A pixel is foreground when its gray value is >= 128.
BinaryImage binarize(const GrayImage& img);
GrayImage to_gray(const BinaryImage& img);  // 0 -> 0, 1 -> 255

}  // namespace gaitlab
