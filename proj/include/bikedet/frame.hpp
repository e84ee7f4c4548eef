#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "bikedet/errors.hpp"

namespace bikedet {

// Single grayscale (luma) frame, row-major, 8 bits per pixel.
struct Frame {
    int width = 0;
    int height = 0;
    int index = 0;
    std::vector<std::uint8_t> pixels;

    Frame() = default;
    Frame(int w, int h, int idx = 0, std::uint8_t fill = 0)
        : width(w), height(h), index(idx), pixels(static_cast<std::size_t>(w) * h, fill) {
        if (w <= 0 || h <= 0) throw DimensionError("frame dimensions must be positive");
    }

    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }

    bool operator==(const Frame& other) const {
        return width == other.width && height == other.height && pixels == other.pixels;
    }
};

struct StreamMeta {
    int width = 0;
    int height = 0;
    int fps_num = 25;
    int fps_den = 1;
};

// Per-pixel binary foreground labeling for one frame.
struct ForegroundMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;  // 1 = foreground

    ForegroundMask() = default;
    ForegroundMask(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), bits(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return bits[static_cast<std::size_t>(y) * width + x]; }

    bool operator==(const ForegroundMask& other) const {
        return width == other.width && height == other.height && bits == other.bits;
    }
};

// Axis-aligned box, top-left origin, integer pixel units.
struct Box {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;

    long long area() const { return static_cast<long long>(width) * height; }
    int right() const { return x + width; }    // exclusive
    int bottom() const { return y + height; }  // exclusive

    bool operator==(const Box& other) const {
        return x == other.x && y == other.y && width == other.width && height == other.height;
    }
};

struct PointD {
    double x = 0.0;
    double y = 0.0;
};

inline double box_iou(const Box& a, const Box& b) {
    const int ix = std::max(a.x, b.x);
    const int iy = std::max(a.y, b.y);
    const int ix2 = std::min(a.right(), b.right());
    const int iy2 = std::min(a.bottom(), b.bottom());
    if (ix2 <= ix || iy2 <= iy) return 0.0;
    const double inter = static_cast<double>(ix2 - ix) * (iy2 - iy);
    const double uni = static_cast<double>(a.area()) + static_cast<double>(b.area()) - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

}  // namespace bikedet
