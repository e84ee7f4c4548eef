#pragma once

#include <chrono>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "bikedet/config.hpp"
#include "bikedet/features.hpp"
#include "bikedet/gmm.hpp"
#include "bikedet/model_file.hpp"
#include "bikedet/segmentation.hpp"
#include "bikedet/tracking.hpp"

namespace bikedet {

// Terminal record of one track: the multi-frame fused decision, its
// confidence, and the observed bbox trail for evaluation.
struct DetectionRecord {
    int track_id = 0;
    int first_frame = 0;
    int last_frame = 0;
    int m = 0;
    int m_b = 0;
    Decision decision = Decision::not_bicycle;
    double cof = 0.0;
    std::vector<std::pair<int, Box>> trail;
};

struct PipelineResult {
    std::vector<DetectionRecord> records;   // in track-termination order
    std::vector<double> frame_ms;           // processing time per frame, I/O excluded
};

// Optional taps into the per-frame loop: every recorded observation,
// and every cleaned post-warmup mask.
struct PipelineHooks {
    std::function<void(int frame, int track_id, const ObjectRegion&, const FeatureVector&, Decision)>
        on_observation;
    std::function<void(int frame, const ForegroundMask&)> on_mask;
};

namespace detail {

inline DetectionRecord finish_track(Track&& t, const FusionConfig& cfg) {
    DetectionRecord r;
    r.track_id = t.id;
    r.first_frame = t.first_frame;
    r.last_frame = t.last_frame;
    r.m = t.m;
    r.m_b = t.m_b;
    r.decision = fuse_decision(t);
    r.cof = confidence(t, cfg);
    r.trail = std::move(t.trail);
    return r;
}

inline void check_fuser(const Fuser& fuser) {
    if (fuser.kind == Fuser::Kind::svm) {
        if (fuser.svm_full.layout.empty() || fuser.svm_first.layout.empty())
            throw ConfigError("svm model has an empty layout");
        for (FeatureId id : fuser.svm_first.layout)
            if (id == FeatureId::speed)
                throw ConfigError("first-frame svm layout must not contain speed");
    } else {
        validate_cascade(fuser.cascade);
    }
}

}  // namespace detail

// Runs the whole per-frame chain: background update and subtraction,
// morphological cleaning, component extraction and fusion, feature
// extraction, the single-frame fuser, then track matching and the
// multi-frame fusion bookkeeping. Frames before cfg.warmup only feed
// the background model.
inline PipelineResult run_pipeline(std::span<const Frame> frames, const Fuser& fuser,
                                   const PipelineConfig& cfg, const PipelineHooks& hooks = {}) {
    cfg.validate();
    detail::check_fuser(fuser);
    PipelineResult result;
    if (frames.empty()) return result;

    GmmBackground background(frames[0], cfg.background);
    std::vector<Track> tracks;
    int next_id = 0;
    std::vector<PointD> centers_scratch;

    for (std::size_t fi = 0; fi < frames.size(); ++fi) {
        const auto t_start = std::chrono::steady_clock::now();
        const Frame& frame = frames[fi];

        ForegroundMask raw = background.update_and_subtract(frame);
        if (static_cast<int>(fi) >= cfg.warmup) {
            const ForegroundMask clean = morphological_clean(raw, cfg.morph);
            std::vector<ObjectRegion> regions =
                fuse_regions(connected_components(clean, cfg.min_area), cfg.max_gap);
            if (hooks.on_mask) hooks.on_mask(static_cast<int>(fi), clean);

            for (Track& t : tracks) predict(t, cfg.tracking);
            const MatchResult matches = match(tracks, regions, cfg.tracking);

            for (const auto& [ti, ri] : matches.pairs) {
                Track& track = tracks[ti];
                const ObjectRegion& region = regions[ri];
                FeatureVector fv = extract_static(region);
                centers_scratch = track.center_history;
                centers_scratch.push_back(region_center(region.bbox));
                if (centers_scratch.size() >= 2) fv.speed = estimate_speed(centers_scratch);
                const Decision d = fuser.preliminary(fv);
                observe(track, region, d, static_cast<int>(fi), cfg.tracking);
                if (hooks.on_observation)
                    hooks.on_observation(static_cast<int>(fi), track.id, region, fv, d);
            }
            for (std::size_t ri : matches.unmatched_regions) {
                const FeatureVector fv = extract_static(regions[ri]);  // no speed yet
                const Decision d = fuser.preliminary(fv);
                tracks.push_back(
                    make_track(next_id++, regions[ri], static_cast<int>(fi), d, cfg.tracking));
                if (hooks.on_observation)
                    hooks.on_observation(static_cast<int>(fi), tracks.back().id, regions[ri], fv, d);
            }
            for (Track& t : age_and_evict(tracks, cfg.tracking))
                result.records.push_back(detail::finish_track(std::move(t), cfg.tracking));
        }

        const auto t_end = std::chrono::steady_clock::now();
        result.frame_ms.push_back(
            std::chrono::duration<double, std::milli>(t_end - t_start).count());
    }

    for (Track& t : tracks)
        result.records.push_back(detail::finish_track(std::move(t), cfg.tracking));
    return result;
}

}  // namespace bikedet
