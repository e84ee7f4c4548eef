#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "bikedet/errors.hpp"
#include "bikedet/frame.hpp"

namespace bikedet {

// YUV4MPEG2 reader restricted to what the pipeline consumes: the luma
// plane. 4:2:0 chroma planes are parsed past and discarded; Cmono
// streams carry luma only.
inline std::pair<std::vector<Frame>, StreamMeta> parse_y4m(const std::string& data) {
    static const std::string magic = "YUV4MPEG2";
    if (data.compare(0, magic.size(), magic) != 0)
        throw ParseError("missing YUV4MPEG2 signature", 0);

    const std::size_t header_end = data.find('\n', magic.size());
    if (header_end == std::string::npos) throw ParseError("unterminated stream header", data.size());

    StreamMeta meta;
    meta.width = meta.height = 0;
    std::string chroma = "420";  // de-facto default when no C tag is present
    std::size_t pos = magic.size();
    while (pos < header_end) {
        if (data[pos] == ' ') { ++pos; continue; }
        std::size_t end = data.find_first_of(" \n", pos);
        if (end == std::string::npos || end > header_end) end = header_end;
        const std::string token = data.substr(pos, end - pos);
        try {
            switch (token[0]) {
                case 'W': meta.width = std::stoi(token.substr(1)); break;
                case 'H': meta.height = std::stoi(token.substr(1)); break;
                case 'F': {
                    const std::size_t colon = token.find(':');
                    if (colon == std::string::npos) throw ParseError("malformed F token", pos);
                    meta.fps_num = std::stoi(token.substr(1, colon - 1));
                    meta.fps_den = std::stoi(token.substr(colon + 1));
                    break;
                }
                case 'C': chroma = token.substr(1); break;
                default: break;  // I, A, X... tags are irrelevant here
            }
        } catch (const std::invalid_argument&) {
            throw ParseError("malformed header token " + token, pos);
        } catch (const std::out_of_range&) {
            throw ParseError("header token out of range " + token, pos);
        }
        pos = end;
    }
    if (meta.width <= 0 || meta.height <= 0) throw ParseError("missing or invalid W/H", header_end);
    if (meta.fps_num <= 0 || meta.fps_den <= 0) throw ParseError("invalid frame rate", header_end);

    std::size_t chroma_bytes = 0;
    if (chroma == "mono") {
        chroma_bytes = 0;
    } else if (chroma.rfind("420", 0) == 0) {  // C420, C420jpeg, C420paldv, C420mpeg2
        if (meta.width % 2 != 0 || meta.height % 2 != 0)
            throw UnsupportedFormat("4:2:0 stream with odd dimensions");
        chroma_bytes = 2 * static_cast<std::size_t>(meta.width / 2) * (meta.height / 2);
    } else {
        throw UnsupportedFormat("unsupported chroma tag C" + chroma);
    }
    const std::size_t luma_bytes = static_cast<std::size_t>(meta.width) * meta.height;

    std::vector<Frame> frames;
    pos = header_end + 1;
    while (pos < data.size()) {
        if (data.compare(pos, 5, "FRAME") != 0)
            throw TruncatedStream("expected FRAME delimiter at byte " + std::to_string(pos));
        const std::size_t line_end = data.find('\n', pos);
        if (line_end == std::string::npos)
            throw TruncatedStream("unterminated FRAME header at byte " + std::to_string(pos));
        pos = line_end + 1;
        if (data.size() - pos < luma_bytes + chroma_bytes)
            throw TruncatedStream("stream ends mid-frame at byte " + std::to_string(pos));
        Frame f(meta.width, meta.height, static_cast<int>(frames.size()));
        std::copy_n(reinterpret_cast<const std::uint8_t*>(data.data()) + pos, luma_bytes,
                    f.pixels.begin());
        pos += luma_bytes + chroma_bytes;
        frames.push_back(std::move(f));
    }
    return {std::move(frames), meta};
}

inline std::pair<std::vector<Frame>, StreamMeta> load_y4m(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_y4m(data);
}

// Emits a Cmono stream (luma only), the exact inverse of parse_y4m.
inline std::string format_y4m(const std::vector<Frame>& frames, const StreamMeta& meta) {
    std::string out = "YUV4MPEG2 W" + std::to_string(meta.width) + " H" + std::to_string(meta.height) +
                      " F" + std::to_string(meta.fps_num) + ":" + std::to_string(meta.fps_den) +
                      " Ip A1:1 Cmono\n";
    for (const Frame& f : frames) {
        out += "FRAME\n";
        out.append(reinterpret_cast<const char*>(f.pixels.data()), f.pixels.size());
    }
    return out;
}

inline void write_y4m(const std::vector<Frame>& frames, const StreamMeta& meta,
                      const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    const std::string data = format_y4m(frames, meta);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error("short write to " + path.string());
}

}  // namespace bikedet
