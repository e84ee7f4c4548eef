#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "bikedet/scene.hpp"
#include "bikedet/suite.hpp"

using namespace bikedet;

namespace {

SceneConfig simple_scene() {
    SceneConfig cfg;
    cfg.name = "test";
    cfg.width = 120;
    cfg.height = 90;
    cfg.length = 30;
    cfg.seed = 42;
    ActorSpec bike;
    bike.cls = ActorClass::bicycle;
    bike.entry_frame = 0;
    bike.start_x = 5;
    bike.start_y = 40;
    bike.vel_x = 1.5;
    bike.wheel_r = 7;
    bike.torso_w = 4;
    bike.torso_h = 9;
    bike.head_r = 3;
    bike.intensity = 60;
    cfg.actors.push_back(bike);
    return cfg;
}

// upper/lower duty cycles of a raw silhouette, upper = ceil(h/2) rows
std::pair<double, double> half_duty(const Silhouette& s) {
    const int upper_rows = (s.height + 1) / 2;
    long long upper = 0, lower = 0;
    for (int y = 0; y < s.height; ++y)
        for (int x = 0; x < s.width; ++x)
            if (s.at(x, y)) (y < upper_rows ? upper : lower) += 1;
    const double ua = static_cast<double>(upper_rows) * s.width;
    const double la = static_cast<double>(s.height - upper_rows) * s.width;
    return {upper / ua, lower / la};
}

}  // namespace

TEST_CASE("equal config and seed give byte-identical streams") {
    SceneConfig cfg = simple_scene();
    cfg.noise_sigma = 2.0;
    auto [frames1, truth1] = generate_scene(cfg);
    auto [frames2, truth2] = generate_scene(cfg);
    REQUIRE(frames1.size() == frames2.size());
    for (std::size_t i = 0; i < frames1.size(); ++i) CHECK(frames1[i] == frames2[i]);
    REQUIRE(truth1.tracks.size() == truth2.tracks.size());
    for (std::size_t i = 0; i < truth1.tracks.size(); ++i)
        CHECK(truth1.tracks[i].boxes == truth2.tracks[i].boxes);
}

TEST_CASE("zero actors and zero noise reproduce the background plate") {
    SceneConfig cfg = simple_scene();
    cfg.actors.clear();
    cfg.noise_sigma = 0.0;
    auto [frames, truth] = generate_scene(cfg);
    REQUIRE(frames.size() == 30);
    for (const Frame& f : frames) CHECK(f == frames[0]);
    // plate is textured, not flat
    const auto [mn, mx] = std::minmax_element(frames[0].pixels.begin(), frames[0].pixels.end());
    CHECK(*mx > *mn);
}

TEST_CASE("bicycle archetype is sparse on top and dense below") {
    const Silhouette s = rasterize_silhouette(simple_scene().actors[0]);
    const int upper_rows = (s.height + 1) / 2;
    long long upper = 0, lower = 0;
    for (int y = 0; y < s.height; ++y)
        for (int x = 0; x < s.width; ++x)
            if (s.at(x, y)) (y < upper_rows ? upper : lower) += 1;
    CHECK(upper > 0);
    CHECK(upper < lower);
}

TEST_CASE("truth boxes exactly bound rendered silhouettes before noise") {
    SceneConfig cfg = simple_scene();
    cfg.noise_sigma = 0.0;
    SceneConfig empty = cfg;
    empty.actors.clear();
    auto [frames, truth] = generate_scene(cfg);
    auto [plates, unused] = generate_scene(empty);
    REQUIRE(truth.tracks.size() == 1);
    for (const auto& [frame, box] : truth.tracks[0].boxes) {
        int min_x = cfg.width, min_y = cfg.height, max_x = -1, max_y = -1;
        for (int y = 0; y < cfg.height; ++y)
            for (int x = 0; x < cfg.width; ++x)
                if (frames[frame].at(x, y) != plates[frame].at(x, y)) {
                    min_x = std::min(min_x, x);
                    max_x = std::max(max_x, x);
                    min_y = std::min(min_y, y);
                    max_y = std::max(max_y, y);
                }
        REQUIRE(max_x >= 0);
        const Box tight{min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
        CHECK(box_iou(tight, box) == 1.0);
    }
}

TEST_CASE("actor out of bounds at entry is a config error") {
    SceneConfig cfg = simple_scene();
    cfg.actors[0].start_x = 100;  // silhouette is ~31 wide on a 120 frame
    CHECK_THROWS_AS(generate_scene(cfg), ConfigError);
    cfg.actors[0].start_x = -3;
    CHECK_THROWS_AS(generate_scene(cfg), ConfigError);
}

TEST_CASE("class archetypes separate by the lower-upper duty margin") {
    double bike_sum = 0, veh_sum = 0, ped_sum = 0;
    const int n = 100;
    for (int i = 0; i < n; ++i) {
        const std::uint64_t seed = 1000 + i;
        const ActorSpec bike =
            suite_detail::sample_actor(ActorClass::bicycle, seed, 0, 10, true, 0, 352);
        const ActorSpec veh =
            suite_detail::sample_actor(ActorClass::vehicle, seed, 1, 10, true, 0, 352);
        const ActorSpec ped =
            suite_detail::sample_actor(ActorClass::pedestrian, seed, 2, 10, true, 0, 352);
        const auto [bu, bl] = half_duty(rasterize_silhouette(bike));
        const auto [vu, vl] = half_duty(rasterize_silhouette(veh));
        const auto [pu, pl] = half_duty(rasterize_silhouette(ped));
        bike_sum += bl - bu;
        veh_sum += vl - vu;
        ped_sum += pl - pu;
    }
    const double bike_mean = bike_sum / n, veh_mean = veh_sum / n, ped_mean = ped_sum / n;
    // frozen regression bound measured from the archetypes
    CHECK(bike_mean >= veh_mean + 0.15);
    CHECK(bike_mean >= ped_mean + 0.15);
    // vehicles and pedestrians are roughly symmetric
    CHECK(std::abs(veh_mean) < 0.1);
    CHECK(std::abs(ped_mean) < 0.1);
}

TEST_CASE("class speed ordering pedestrian < bicycle < vehicle") {
    double ped_max = 0, bike_min = 1e9, bike_max = 0, veh_min = 1e9;
    for (int i = 0; i < 200; ++i) {
        const std::uint64_t seed = 5000 + i;
        const auto spd = [&](ActorClass c, int idx) {
            const ActorSpec a = suite_detail::sample_actor(c, seed, idx, 10, true, 0, 352);
            return std::abs(a.vel_x);
        };
        ped_max = std::max(ped_max, spd(ActorClass::pedestrian, 0));
        bike_min = std::min(bike_min, spd(ActorClass::bicycle, 1));
        bike_max = std::max(bike_max, spd(ActorClass::bicycle, 1));
        veh_min = std::min(veh_min, spd(ActorClass::vehicle, 2));
    }
    CHECK(ped_max < bike_min);
    CHECK(bike_max < veh_min);
}

TEST_CASE("standard suite manifest is frozen and well formed") {
    const std::vector<SceneConfig> all = full_standard_suite();
    REQUIRE(all.size() == 20);

    std::set<std::uint64_t> seeds;
    int bicycles = 0;
    for (const SceneConfig& cfg : all) {
        seeds.insert(cfg.seed);
        for (const ActorSpec& a : cfg.actors)
            if (a.cls == ActorClass::bicycle) ++bicycles;
    }
    CHECK(seeds.size() == 20);
    CHECK(bicycles >= 40);

    // at least one sunny scene carries all three classes
    bool sunny_full_mix = false;
    for (const SceneConfig& cfg : standard_suite(Profile::sunny)) {
        std::set<ActorClass> classes;
        for (const ActorSpec& a : cfg.actors) classes.insert(a.cls);
        if (classes.size() == 3) sunny_full_mix = true;
    }
    CHECK(sunny_full_mix);

    // scene 0 is the single-bicycle scene used by pipeline examples
    const SceneConfig& first = all[0];
    REQUIRE(first.actors.size() == 1);
    CHECK(first.actors[0].cls == ActorClass::bicycle);

    // foggy and rainy profiles actually alter the rendering knobs
    CHECK(standard_suite(Profile::foggy)[0].fog > 0.0);
    CHECK(standard_suite(Profile::rainy)[0].shadow);
}

TEST_CASE("truth csv round trips") {
    SceneConfig cfg = simple_scene();
    auto [frames, truth] = generate_scene(cfg);
    const auto path = std::filesystem::temp_directory_path() / "bikedet_truth_rt.csv";
    write_truth_csv(truth, path);
    const GroundTruth back = load_truth_csv(path);
    REQUIRE(back.tracks.size() == truth.tracks.size());
    CHECK(back.length == truth.length);
    for (std::size_t i = 0; i < truth.tracks.size(); ++i) {
        CHECK(back.tracks[i].cls == truth.tracks[i].cls);
        CHECK(back.tracks[i].boxes == truth.tracks[i].boxes);
    }
    std::filesystem::remove(path);
}
