#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "bikedet/errors.hpp"
#include "bikedet/frame.hpp"
#include "bikedet/rng.hpp"

namespace bikedet {

enum class ActorClass { vehicle, pedestrian, bicycle };

inline const char* to_string(ActorClass c) {
    switch (c) {
        case ActorClass::vehicle: return "vehicle";
        case ActorClass::pedestrian: return "pedestrian";
        default: return "bicycle";
    }
}

inline ActorClass actor_class_from_string(const std::string& s) {
    if (s == "vehicle") return ActorClass::vehicle;
    if (s == "pedestrian") return ActorClass::pedestrian;
    if (s == "bicycle") return ActorClass::bicycle;
    throw ParseError("unknown actor class " + s, 0);
}

// A moving shape. Shape parameters are integers (pixel units) so the
// rasterized archetype is identical on every platform; position is
// continuous and rounded per frame.
struct ActorSpec {
    ActorClass cls = ActorClass::bicycle;
    int entry_frame = 0;
    double start_x = 0.0, start_y = 0.0;  // top-left of the body grid at entry
    double vel_x = 0.0, vel_y = 0.0;      // pixels/frame
    std::uint8_t intensity = 64;

    // vehicle / pedestrian
    int body_w = 0, body_h = 0;
    // bicycle: two wheels below, rider torso and head above
    int wheel_r = 0, torso_w = 0, torso_h = 0, head_r = 0;
};

struct SceneConfig {
    std::string name;
    int width = 352, height = 288;
    int length = 260;
    double noise_sigma = 0.0;  // per-pixel Gaussian, applied last
    bool shadow = false;       // half-intensity sheared silhouette below each actor
    double fog = 0.0;          // 0..1 blend toward a flat gray, contrast reduction
    std::uint64_t seed = 0;
    std::vector<ActorSpec> actors;
};

struct TruthTrack {
    int actor_id = 0;
    ActorClass cls = ActorClass::bicycle;
    std::vector<std::pair<int, Box>> boxes;  // (frame, tight silhouette box), frame-ordered
};

struct GroundTruth {
    int length = 0;
    std::vector<TruthTrack> tracks;  // one per actor, in actor-id order
};

// --- archetype rasterization -------------------------------------------

struct Silhouette {
    int width = 0, height = 0;
    std::vector<std::uint8_t> grid;  // 1 = body pixel
    std::uint8_t at(int x, int y) const { return grid[static_cast<std::size_t>(y) * width + x]; }
};

inline void silhouette_dims(const ActorSpec& a, int& w, int& h) {
    if (a.cls == ActorClass::bicycle) {
        const int gap = std::max(2, a.wheel_r / 2);
        w = 4 * a.wheel_r + gap;
        h = 2 * a.wheel_r + a.torso_h + 2 * a.head_r;
    } else {
        w = a.body_w;
        h = a.body_h;
    }
}

// Bicycle: two filled wheel disks, a horizontal frame bar through the
// wheel centers, a seat post, and a rider torso + head on top. The
// upper half of the box ends up much sparser than the lower half;
// vehicles and pedestrians are vertically symmetric shapes.
inline Silhouette rasterize_silhouette(const ActorSpec& a) {
    int w = 0, h = 0;
    silhouette_dims(a, w, h);
    if (w <= 0 || h <= 0) throw ConfigError("actor has empty body");
    Silhouette s;
    s.width = w;
    s.height = h;
    s.grid.assign(static_cast<std::size_t>(w) * h, 0);
    auto set = [&](int x, int y) {
        if (x >= 0 && x < w && y >= 0 && y < h) s.grid[static_cast<std::size_t>(y) * w + x] = 1;
    };

    if (a.cls == ActorClass::vehicle) {
        // power-4 superellipse: solid slab with rounded corners
        const double cx = (w - 1) * 0.5, cy = (h - 1) * 0.5;
        const double ax = w * 0.5, by = h * 0.5;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const double u = ((x - cx) * (x - cx)) / (ax * ax);
                const double v = ((y - cy) * (y - cy)) / (by * by);
                if (u * u + v * v <= 1.0) set(x, y);
            }
    } else if (a.cls == ActorClass::pedestrian) {
        // vertical ellipse, symmetric about the box midline
        const double cx = (w - 1) * 0.5, cy = (h - 1) * 0.5;
        const double ax = w * 0.5, by = h * 0.5;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const double u = ((x - cx) * (x - cx)) / (ax * ax);
                const double v = ((y - cy) * (y - cy)) / (by * by);
                if (u + v <= 1.0) set(x, y);
            }
    } else {
        const int r = a.wheel_r;
        const int cy_wheel = h - r;  // wheel centers one radius above the bottom
        const int c1x = r, c2x = w - 1 - r;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const int d1x = x - c1x, d1y = y - cy_wheel;
                const int d2x = x - c2x, d2y = y - cy_wheel;
                if (d1x * d1x + d1y * d1y <= r * r || d2x * d2x + d2y * d2y <= r * r) set(x, y);
            }
        // frame bar between the wheel centers
        for (int y = cy_wheel - 1; y <= cy_wheel + 1; ++y)
            for (int x = c1x; x <= c2x; ++x) set(x, y);
        // head, torso, seat post stacked from the top
        const int mid = w / 2;
        const int head_cy = a.head_r;
        for (int y = 0; y < 2 * a.head_r; ++y)
            for (int x = mid - a.head_r; x <= mid + a.head_r; ++x) {
                const int dx = x - mid, dy = y - head_cy;
                if (dx * dx + dy * dy <= a.head_r * a.head_r) set(x, y);
            }
        const int torso_top = 2 * a.head_r;
        for (int y = torso_top; y < torso_top + a.torso_h; ++y)
            for (int x = mid - a.torso_w / 2; x <= mid + a.torso_w / 2; ++x) set(x, y);
        for (int y = torso_top + a.torso_h; y < cy_wheel; ++y)
            for (int x = mid - 1; x <= mid + 1; ++x) set(x, y);
    }
    return s;
}

// --- scene rendering ----------------------------------------------------

namespace detail {

constexpr std::uint64_t kStreamPlate = 1;
constexpr std::uint64_t kStreamNoise = 2;
constexpr std::uint64_t kStreamActor = 3;

inline std::vector<std::uint8_t> render_plate(const SceneConfig& cfg) {
    std::vector<std::uint8_t> plate(static_cast<std::size_t>(cfg.width) * cfg.height);
    for (int y = 0; y < cfg.height; ++y) {
        for (int x = 0; x < cfg.width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * cfg.width + x;
            const double gx = cfg.width > 1 ? static_cast<double>(x) / (cfg.width - 1) : 0.0;
            const double gy = cfg.height > 1 ? static_cast<double>(y) / (cfg.height - 1) : 0.0;
            double v = 112.0 + 14.0 * gx + 10.0 * gy;
            v += 2.5 * rng::gaussian(rng::key(cfg.seed, kStreamPlate, i));
            plate[i] = static_cast<std::uint8_t>(std::clamp<long>(std::llround(v), 0, 255));
        }
    }
    return plate;
}

}  // namespace detail

// Renders the frame stream and the exact per-frame silhouette boxes.
// Output is a pure function of the config; the seed is the only
// entropy source.
inline std::pair<std::vector<Frame>, GroundTruth> generate_scene(const SceneConfig& cfg) {
    if (cfg.width <= 0 || cfg.height <= 0 || cfg.length <= 0)
        throw ConfigError("scene dimensions and length must be positive");

    struct Placed {
        Silhouette sil;
        const ActorSpec* spec;
    };
    std::vector<Placed> actors;
    actors.reserve(cfg.actors.size());
    for (const ActorSpec& a : cfg.actors) {
        Placed p{rasterize_silhouette(a), &a};
        const long x0 = std::llround(a.start_x), y0 = std::llround(a.start_y);
        if (x0 < 0 || y0 < 0 || x0 + p.sil.width > cfg.width || y0 + p.sil.height > cfg.height)
            throw ConfigError("actor does not fit within the frame at entry");
        if (a.entry_frame < 0 || a.entry_frame >= cfg.length)
            throw ConfigError("actor entry frame outside the scene");
        actors.push_back(std::move(p));
    }

    const std::vector<std::uint8_t> plate = detail::render_plate(cfg);
    const std::size_t npx = plate.size();

    GroundTruth truth;
    truth.length = cfg.length;
    truth.tracks.resize(cfg.actors.size());
    for (std::size_t i = 0; i < cfg.actors.size(); ++i) {
        truth.tracks[i].actor_id = static_cast<int>(i);
        truth.tracks[i].cls = cfg.actors[i].cls;
    }

    std::vector<Frame> frames;
    frames.reserve(cfg.length);
    std::vector<double> buf(npx);
    std::vector<std::uint8_t> shadow_mask(npx);

    for (int t = 0; t < cfg.length; ++t) {
        for (std::size_t i = 0; i < npx; ++i) buf[i] = plate[i];

        if (cfg.shadow) {
            std::fill(shadow_mask.begin(), shadow_mask.end(), 0);
            for (const Placed& p : actors) {
                const ActorSpec& a = *p.spec;
                if (t < a.entry_frame) continue;
                const int dt = t - a.entry_frame;
                const long x0 = std::llround(a.start_x + a.vel_x * dt);
                const long y0 = std::llround(a.start_y + a.vel_y * dt);
                const int h = p.sil.height;
                for (int ly = 0; ly < h; ++ly)
                    for (int lx = 0; lx < p.sil.width; ++lx) {
                        if (!p.sil.at(lx, ly)) continue;
                        const long sx = x0 + lx + (h - 1 - ly) / 3;
                        const long sy = y0 + h - 1 + (h - 1 - ly) / 4;
                        if (sx >= 0 && sx < cfg.width && sy >= 0 && sy < cfg.height)
                            shadow_mask[static_cast<std::size_t>(sy) * cfg.width + sx] = 1;
                    }
            }
            for (std::size_t i = 0; i < npx; ++i)
                if (shadow_mask[i]) buf[i] *= 0.55;
        }

        for (std::size_t ai = 0; ai < actors.size(); ++ai) {
            const Placed& p = actors[ai];
            const ActorSpec& a = *p.spec;
            if (t < a.entry_frame) continue;
            const int dt = t - a.entry_frame;
            const long x0 = std::llround(a.start_x + a.vel_x * dt);
            const long y0 = std::llround(a.start_y + a.vel_y * dt);
            long min_x = cfg.width, min_y = cfg.height, max_x = -1, max_y = -1;
            for (int ly = 0; ly < p.sil.height; ++ly)
                for (int lx = 0; lx < p.sil.width; ++lx) {
                    if (!p.sil.at(lx, ly)) continue;
                    const long gx = x0 + lx, gy = y0 + ly;
                    if (gx < 0 || gx >= cfg.width || gy < 0 || gy >= cfg.height) continue;
                    buf[static_cast<std::size_t>(gy) * cfg.width + gx] = a.intensity;
                    min_x = std::min(min_x, gx);
                    max_x = std::max(max_x, gx);
                    min_y = std::min(min_y, gy);
                    max_y = std::max(max_y, gy);
                }
            if (max_x >= 0)
                truth.tracks[ai].boxes.emplace_back(
                    t, Box{static_cast<int>(min_x), static_cast<int>(min_y),
                           static_cast<int>(max_x - min_x + 1), static_cast<int>(max_y - min_y + 1)});
        }

        if (cfg.fog > 0.0)
            for (std::size_t i = 0; i < npx; ++i) buf[i] += cfg.fog * (160.0 - buf[i]);

        if (cfg.noise_sigma > 0.0) {
            const std::uint64_t base = static_cast<std::uint64_t>(t) * npx;
            for (std::size_t i = 0; i < npx; ++i)
                buf[i] += cfg.noise_sigma *
                          rng::gaussian(rng::key(cfg.seed, detail::kStreamNoise, base + i));
        }

        Frame frame(cfg.width, cfg.height, t);
        for (std::size_t i = 0; i < npx; ++i)
            frame.pixels[i] = static_cast<std::uint8_t>(std::clamp<long>(std::llround(buf[i]), 0, 255));
        frames.push_back(std::move(frame));
    }
    return {std::move(frames), truth};
}

// --- ground-truth CSV ----------------------------------------------------

inline void write_truth_csv(const GroundTruth& truth, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << "frame,actor_id,class,x,y,w,h\n";
    // one row per visible actor per frame, frame-major
    std::vector<std::size_t> cursor(truth.tracks.size(), 0);
    for (int t = 0; t < truth.length; ++t)
        for (std::size_t i = 0; i < truth.tracks.size(); ++i) {
            const TruthTrack& track = truth.tracks[i];
            std::size_t& c = cursor[i];
            if (c < track.boxes.size() && track.boxes[c].first == t) {
                const Box& box = track.boxes[c].second;
                out << t << ',' << track.actor_id << ',' << to_string(track.cls) << ',' << box.x
                    << ',' << box.y << ',' << box.width << ',' << box.height << '\n';
                ++c;
            }
        }
    if (!out) throw Error("short write to " + path.string());
}

inline GroundTruth load_truth_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    GroundTruth truth;
    std::string line;
    std::getline(in, line);  // header
    std::vector<TruthTrack>& tracks = truth.tracks;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        int frame = 0, id = 0;
        Box box;
        char cls_buf[32] = {0};
        if (std::sscanf(line.c_str(), "%d,%d,%31[^,],%d,%d,%d,%d", &frame, &id, cls_buf, &box.x,
                        &box.y, &box.width, &box.height) != 7)
            throw ParseError("bad truth row: " + line, 0);
        while (static_cast<int>(tracks.size()) <= id) {
            TruthTrack t;
            t.actor_id = static_cast<int>(tracks.size());
            tracks.push_back(t);
        }
        tracks[id].cls = actor_class_from_string(cls_buf);
        tracks[id].boxes.emplace_back(frame, box);
        truth.length = std::max(truth.length, frame + 1);
    }
    return truth;
}

}  // namespace bikedet
