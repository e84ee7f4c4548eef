#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bikedet/errors.hpp"
#include "bikedet/rng.hpp"
#include "bikedet/scene.hpp"

namespace bikedet {

enum class Profile { sunny, foggy, rainy, training };

inline const char* to_string(Profile p) {
    switch (p) {
        case Profile::sunny: return "sunny";
        case Profile::foggy: return "foggy";
        case Profile::rainy: return "rainy";
        default: return "training";
    }
}

inline Profile profile_from_string(const std::string& s) {
    if (s == "sunny") return Profile::sunny;
    if (s == "foggy") return Profile::foggy;
    if (s == "rainy") return Profile::rainy;
    if (s == "training") return Profile::training;
    throw ConfigError("unknown profile " + s);
}

namespace suite_detail {

// Class parameter ranges. Speeds keep the paper's ordering
// pedestrian < bicycle < vehicle; bicycle geometry keeps the sparse
// upper half / dense lower half signature.
inline ActorSpec sample_actor(ActorClass cls, std::uint64_t seed, int actor_idx, int lane_y,
                              bool rightward, int entry, int frame_w) {
    auto draw = [&](int slot) {
        return rng::key(seed, detail::kStreamActor,
                        static_cast<std::uint64_t>(actor_idx) * 64 + slot);
    };
    ActorSpec a;
    a.cls = cls;
    a.entry_frame = entry;
    double speed = 0.0;
    switch (cls) {
        case ActorClass::bicycle:
            a.wheel_r = 6 + static_cast<int>(rng::below(draw(0), 3));   // 6..8
            a.torso_w = 3 + static_cast<int>(rng::below(draw(1), 3));   // 3..5
            a.torso_h = 7 + static_cast<int>(rng::below(draw(2), 4));   // 7..10
            a.head_r = 2 + static_cast<int>(rng::below(draw(3), 2));    // 2..3
            a.intensity = static_cast<std::uint8_t>(45 + rng::below(draw(4), 31));
            speed = rng::uniform(draw(5), 1.2, 2.1);
            break;
        case ActorClass::vehicle:
            a.body_w = 44 + static_cast<int>(rng::below(draw(0), 21));  // 44..64
            a.body_h = 20 + static_cast<int>(rng::below(draw(1), 9));   // 20..28
            a.intensity = (draw(2) & 1)
                              ? static_cast<std::uint8_t>(200 + rng::below(draw(3), 36))
                              : static_cast<std::uint8_t>(30 + rng::below(draw(3), 31));
            speed = rng::uniform(draw(5), 2.6, 4.0);
            break;
        case ActorClass::pedestrian:
            a.body_w = 8 + static_cast<int>(rng::below(draw(0), 5));    // 8..12
            a.body_h = 24 + static_cast<int>(rng::below(draw(1), 11));  // 24..34
            a.intensity = static_cast<std::uint8_t>(55 + rng::below(draw(3), 31));
            speed = rng::uniform(draw(5), 0.35, 0.85);
            break;
    }
    int w = 0, h = 0;
    silhouette_dims(a, w, h);
    a.start_x = rightward ? 2.0 : static_cast<double>(frame_w - w - 2);
    a.start_y = lane_y;
    a.vel_x = rightward ? speed : -speed;
    a.vel_y = 0.0;
    return a;
}

// One actor per lane; even lanes move right, odd lanes move left, so
// blobs never merge across actors and every scene segments cleanly.
constexpr int kLaneY[4] = {64, 114, 164, 214};

inline SceneConfig build_scene(Profile profile, int index, std::uint64_t seed,
                               const std::vector<ActorClass>& classes, int length) {
    SceneConfig cfg;
    char name[32];
    std::snprintf(name, sizeof name, "%s_%02d", to_string(profile), index);
    cfg.name = name;
    cfg.length = length;
    cfg.seed = seed;
    switch (profile) {
        case Profile::sunny:
        case Profile::training:
            cfg.noise_sigma = 1.5;
            break;
        case Profile::foggy:
            cfg.noise_sigma = 3.0;
            cfg.fog = 0.35;
            break;
        case Profile::rainy:
            cfg.noise_sigma = 2.0;
            cfg.shadow = true;
            break;
    }
    for (std::size_t lane = 0; lane < classes.size(); ++lane) {
        const bool rightward = lane % 2 == 0;
        const int entry =
            55 + 14 * static_cast<int>(lane) +
            static_cast<int>(rng::below(rng::key(seed, detail::kStreamActor, 7000 + lane), 10));
        cfg.actors.push_back(sample_actor(classes[lane], seed, static_cast<int>(lane),
                                          kLaneY[lane % 4], rightward, entry, cfg.width));
    }
    return cfg;
}

}  // namespace suite_detail

// The frozen 20-scene acceptance suite. Seeds and actor mixes are
// fixed here; scene 0 is the deliberately simple single-bicycle scene.
inline std::vector<SceneConfig> standard_suite(Profile profile) {
    using suite_detail::build_scene;
    const std::vector<ActorClass> mix_a = {ActorClass::bicycle, ActorClass::vehicle,
                                           ActorClass::bicycle, ActorClass::pedestrian};
    const std::vector<ActorClass> mix_b = {ActorClass::bicycle, ActorClass::bicycle,
                                           ActorClass::vehicle, ActorClass::bicycle};
    std::vector<SceneConfig> scenes;
    switch (profile) {
        case Profile::sunny: {
            scenes.push_back(build_scene(Profile::sunny, 0, 9001, {ActorClass::bicycle}, 200));
            const std::uint64_t seeds[7] = {9102, 9203, 9304, 9405, 9506, 9607, 9708};
            for (int i = 0; i < 7; ++i)
                scenes.push_back(build_scene(Profile::sunny, i + 1, seeds[i], mix_a, 260));
            break;
        }
        case Profile::foggy: {
            const std::uint64_t seeds[6] = {7101, 7202, 7303, 7404, 7505, 7606};
            for (int i = 0; i < 6; ++i)
                scenes.push_back(build_scene(Profile::foggy, i, seeds[i], mix_a, 260));
            break;
        }
        case Profile::rainy: {
            const std::uint64_t seeds[6] = {5101, 5202, 5303, 5404, 5505, 5606};
            for (int i = 0; i < 6; ++i)
                scenes.push_back(build_scene(Profile::rainy, i, seeds[i], mix_b, 260));
            break;
        }
        case Profile::training:
            return {};
    }
    return scenes;
}

inline std::vector<SceneConfig> full_standard_suite() {
    std::vector<SceneConfig> all;
    for (Profile p : {Profile::sunny, Profile::foggy, Profile::rainy}) {
        std::vector<SceneConfig> part = standard_suite(p);
        all.insert(all.end(), part.begin(), part.end());
    }
    return all;
}

namespace suite_detail {

// The bicycle body grid has 3*3*4*2 = 72 shape combinations. Training
// walks all of them so calibrated intervals span the whole family the
// acceptance scenes draw from.
inline void bicycle_combo(int index, ActorSpec& a) {
    const int i = index % 72;
    a.wheel_r = 6 + i % 3;
    a.torso_w = 3 + (i / 3) % 3;
    a.torso_h = 7 + (i / 9) % 4;
    a.head_r = 2 + (i / 36) % 2;
}

}  // namespace suite_detail

// Separate corpus for classifier training. Seeds are disjoint from the
// acceptance suite. The first 36 scenes carry two bicycles each and
// enumerate the full shape grid; 24 negative-only scenes follow so the
// corpus ends up with roughly twice as many non-bicycle rows.
inline std::vector<SceneConfig> training_suite() {
    using suite_detail::build_scene;
    std::vector<SceneConfig> scenes;
    const Profile profiles[3] = {Profile::sunny, Profile::foggy, Profile::rainy};
    for (int i = 0; i < 36; ++i) {
        const std::uint64_t seed = 20000 + 131 * static_cast<std::uint64_t>(i);
        const std::vector<ActorClass> mix =
            i % 2 == 0 ? std::vector<ActorClass>{ActorClass::bicycle, ActorClass::vehicle,
                                                 ActorClass::bicycle, ActorClass::pedestrian}
                       : std::vector<ActorClass>{ActorClass::bicycle, ActorClass::pedestrian,
                                                 ActorClass::bicycle, ActorClass::vehicle};
        SceneConfig cfg = build_scene(profiles[i % 3], i, seed, mix, 260);
        suite_detail::bicycle_combo(2 * i, cfg.actors[0]);
        suite_detail::bicycle_combo(2 * i + 1, cfg.actors[2]);
        char name[32];
        std::snprintf(name, sizeof name, "training_%02d", i);
        cfg.name = name;
        scenes.push_back(cfg);
    }
    for (int i = 0; i < 24; ++i) {
        const std::uint64_t seed = 30000 + 173 * static_cast<std::uint64_t>(i);
        const std::vector<ActorClass> mix =
            i % 2 == 0 ? std::vector<ActorClass>{ActorClass::pedestrian, ActorClass::vehicle,
                                                 ActorClass::pedestrian, ActorClass::vehicle}
                       : std::vector<ActorClass>{ActorClass::vehicle, ActorClass::pedestrian,
                                                 ActorClass::vehicle, ActorClass::pedestrian};
        SceneConfig cfg = build_scene(profiles[i % 3], 36 + i, seed, mix, 260);
        char name[32];
        std::snprintf(name, sizeof name, "training_%02d", 36 + i);
        cfg.name = name;
        scenes.push_back(cfg);
    }
    return scenes;
}

// Single-bicycle probe scene used by the track life-cycle tests: long
// enough to settle the tracker before any foreground blanking window.
inline SceneConfig lifecycle_probe_scene() {
    SceneConfig cfg = suite_detail::build_scene(Profile::sunny, 99, 4242, {ActorClass::bicycle}, 220);
    cfg.name = "lifecycle_probe";
    return cfg;
}

}  // namespace bikedet
