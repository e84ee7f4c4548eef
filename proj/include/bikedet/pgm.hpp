#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "bikedet/errors.hpp"
#include "bikedet/frame.hpp"

namespace bikedet {
namespace detail {

// Skips PGM header whitespace and "#" comment lines, advancing pos.
inline void pgm_skip_space(const std::string& data, std::size_t& pos) {
    while (pos < data.size()) {
        const char c = data[pos];
        if (c == '#') {
            while (pos < data.size() && data[pos] != '\n') ++pos;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++pos;
        } else {
            break;
        }
    }
}

inline long pgm_read_int(const std::string& data, std::size_t& pos, const char* what) {
    pgm_skip_space(data, pos);
    if (pos >= data.size() || !std::isdigit(static_cast<unsigned char>(data[pos])))
        throw ParseError(std::string("expected ") + what, pos);
    long value = 0;
    while (pos < data.size() && std::isdigit(static_cast<unsigned char>(data[pos]))) {
        value = value * 10 + (data[pos] - '0');
        if (value > 1L << 30) throw ParseError(std::string(what) + " out of range", pos);
        ++pos;
    }
    return value;
}

}  // namespace detail

// Parses one binary PGM ("P5") image. maxval must be <= 255.
inline Frame parse_pgm(const std::string& data) {
    std::size_t pos = 0;
    if (data.size() < 2 || data[0] != 'P' || data[1] != '5')
        throw ParseError("missing P5 magic", 0);
    pos = 2;
    const long w = detail::pgm_read_int(data, pos, "width");
    const long h = detail::pgm_read_int(data, pos, "height");
    const long maxval = detail::pgm_read_int(data, pos, "maxval");
    if (w <= 0 || h <= 0) throw ParseError("non-positive dimensions", pos);
    if (maxval > 255) throw UnsupportedDepth("PGM maxval " + std::to_string(maxval) + " exceeds 255");
    if (maxval <= 0) throw ParseError("non-positive maxval", pos);
    if (pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[pos])))
        throw ParseError("expected single whitespace after maxval", pos);
    ++pos;  // exactly one whitespace byte, then raw payload
    const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    if (data.size() - pos < need) throw ParseError("payload shorter than width*height", data.size());
    Frame frame(static_cast<int>(w), static_cast<int>(h));
    std::copy_n(reinterpret_cast<const std::uint8_t*>(data.data()) + pos, need, frame.pixels.begin());
    return frame;
}

inline std::string read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return data;
}

inline Frame load_pgm(const std::filesystem::path& path) {
    try {
        return parse_pgm(read_file_bytes(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.byte_offset);
    }
}

inline void write_pgm(const Frame& frame, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << "P5\n" << frame.width << ' ' << frame.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.pixels.data()),
              static_cast<std::streamsize>(frame.pixels.size()));
    if (!out) throw Error("short write to " + path.string());
}

// Foreground pixels are written as 255, background as 0.
inline void write_mask_pgm(const ForegroundMask& mask, const std::filesystem::path& path) {
    Frame img(mask.width, mask.height);
    for (std::size_t i = 0; i < mask.bits.size(); ++i) img.pixels[i] = mask.bits[i] ? 255 : 0;
    write_pgm(img, path);
}

// Directory of zero-padded numeric .pgm files, e.g. 000042.pgm. Frame
// rate comes from an optional "rate.txt" sidecar ("num/den" or "num"),
// default 25/1.
inline std::pair<std::vector<Frame>, StreamMeta> load_pgm_sequence(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw Error("not a directory: " + dir.string());

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".pgm") continue;
        const std::string stem = entry.path().stem().string();
        const bool numeric = !stem.empty() &&
            std::all_of(stem.begin(), stem.end(),
                        [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
        if (numeric) files.push_back(entry.path());
    }
    if (files.empty()) throw NoFrames("no numeric .pgm frames in " + dir.string());
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

    std::vector<Frame> frames;
    frames.reserve(files.size());
    for (const auto& path : files) {
        Frame f = load_pgm(path);
        if (!frames.empty() && (f.width != frames[0].width || f.height != frames[0].height))
            throw InconsistentDimensions(path.string() + ": dimensions differ from first frame");
        f.index = static_cast<int>(frames.size());
        frames.push_back(std::move(f));
    }

    StreamMeta meta;
    meta.width = frames[0].width;
    meta.height = frames[0].height;
    const fs::path rate_file = dir / "rate.txt";
    if (fs::exists(rate_file)) {
        std::ifstream in(rate_file);
        long num = 0, den = 1;
        char sep = 0;
        if (in >> num) {
            if (in >> sep >> den && sep != '/') throw ConfigError("bad rate.txt in " + dir.string());
            if (num <= 0 || den <= 0) throw ConfigError("non-positive frame rate in " + dir.string());
            meta.fps_num = static_cast<int>(num);
            meta.fps_den = static_cast<int>(den);
        }
    }
    return {std::move(frames), meta};
}

}  // namespace bikedet
