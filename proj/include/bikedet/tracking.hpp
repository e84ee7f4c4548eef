#pragma once

#include <algorithm>
#include <cmath>
#include <tuple>
#include <utility>
#include <vector>

#include "bikedet/errors.hpp"
#include "bikedet/features.hpp"
#include "bikedet/frame.hpp"
#include "bikedet/segmentation.hpp"
#include "bikedet/svm.hpp"

namespace bikedet {

struct FusionConfig {
    int life_cycle = 15;             // N: unmatched frames a track survives
    double t_cof = 0.2;              // confidence acceptance threshold
    double match_min_overlap = 0.3;  // IoU gate for track-region matching
    double process_noise = 1.0;      // velocity variance added per frame
    double measurement_noise = 4.0;  // center measurement variance

    void validate() const {
        if (life_cycle < 1) throw ConfigError("tracking: life cycle must be >= 1");
        if (!(t_cof >= 0.0 && t_cof <= 1.0)) throw ConfigError("tracking: t_cof must be in [0,1]");
        if (!(match_min_overlap > 0.0 && match_min_overlap <= 1.0))
            throw ConfigError("tracking: match_min_overlap must be in (0,1]");
        if (process_noise < 0.0 || measurement_noise <= 0.0)
            throw ConfigError("tracking: bad noise parameters");
    }
};

// Constant-velocity Kalman filter for one axis; the two axes are
// independent so a 2-state filter per axis is the whole model.
struct KalmanAxis {
    double pos = 0.0, vel = 0.0;
    double p00 = 0.0, p01 = 0.0, p11 = 0.0;  // covariance

    void init(double z, double meas_var) {
        pos = z;
        vel = 0.0;
        p00 = meas_var;
        p01 = 0.0;
        p11 = 100.0;  // velocity unknown at birth
    }
    void predict(double q) {
        pos += vel;
        p00 += 2.0 * p01 + p11;
        p01 += p11;
        p11 += q;
    }
    void update(double z, double r) {
        const double s = p00 + r;
        const double k0 = p00 / s, k1 = p01 / s;
        const double innov = z - pos;
        pos += k0 * innov;
        vel += k1 * innov;
        const double p00n = (1.0 - k0) * p00;
        const double p01n = (1.0 - k0) * p01;
        const double p11n = p11 - k1 * p01;
        p00 = p00n;
        p01 = p01n;
        p11 = p11n;
    }
};

struct Track {
    int id = 0;
    KalmanAxis kx, ky;
    Box last_bbox;
    Box predicted_bbox;
    std::vector<PointD> center_history;
    int life = 0;   // consecutive unmatched frames
    int m = 0;      // frames with a recorded preliminary decision
    int m_b = 0;    // of those, frames deciding bicycle
    int first_frame = -1;
    int last_frame = -1;
    bool matched_now = false;
    std::vector<std::pair<int, Box>> trail;  // (frame, observed bbox)
};

inline PointD region_center(const Box& b) {
    return {b.x + (b.width - 1) * 0.5, b.y + (b.height - 1) * 0.5};
}

inline Track make_track(int id, const ObjectRegion& region, int frame, Decision preliminary,
                        const FusionConfig& cfg) {
    Track t;
    t.id = id;
    const PointD c = region_center(region.bbox);
    t.kx.init(c.x, cfg.measurement_noise);
    t.ky.init(c.y, cfg.measurement_noise);
    t.last_bbox = region.bbox;
    t.predicted_bbox = region.bbox;
    t.center_history.push_back(c);
    t.m = 1;
    t.m_b = preliminary == Decision::bicycle ? 1 : 0;
    t.first_frame = t.last_frame = frame;
    t.matched_now = true;
    t.trail.emplace_back(frame, region.bbox);
    return t;
}

// Kalman time update; the predicted box is the last observed box
// carried to the predicted center.
inline Box predict(Track& t, const FusionConfig& cfg) {
    t.kx.predict(cfg.process_noise);
    t.ky.predict(cfg.process_noise);
    t.matched_now = false;
    const double cx = t.kx.pos, cy = t.ky.pos;
    Box b = t.last_bbox;
    b.x = static_cast<int>(std::llround(cx - (b.width - 1) * 0.5));
    b.y = static_cast<int>(std::llround(cy - (b.height - 1) * 0.5));
    t.predicted_bbox = b;
    return b;
}

struct MatchResult {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (track idx, region idx)
    std::vector<std::size_t> unmatched_tracks;
    std::vector<std::size_t> unmatched_regions;
};

// Greedy assignment in descending IoU over predicted boxes; ties break
// on (track id, region order) so results are deterministic.
inline MatchResult match(const std::vector<Track>& tracks, const std::vector<ObjectRegion>& regions,
                         const FusionConfig& cfg) {
    struct Cand {
        double iou;
        int track_id;
        std::size_t ti, ri;
    };
    std::vector<Cand> cands;
    for (std::size_t ti = 0; ti < tracks.size(); ++ti)
        for (std::size_t ri = 0; ri < regions.size(); ++ri) {
            const double iou = box_iou(tracks[ti].predicted_bbox, regions[ri].bbox);
            if (iou >= cfg.match_min_overlap) cands.push_back({iou, tracks[ti].id, ti, ri});
        }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        return std::tie(b.iou, a.track_id, a.ri) < std::tie(a.iou, b.track_id, b.ri);
    });

    MatchResult out;
    std::vector<char> track_used(tracks.size(), 0), region_used(regions.size(), 0);
    for (const Cand& c : cands) {
        if (track_used[c.ti] || region_used[c.ri]) continue;
        track_used[c.ti] = region_used[c.ri] = 1;
        out.pairs.emplace_back(c.ti, c.ri);
    }
    for (std::size_t ti = 0; ti < tracks.size(); ++ti)
        if (!track_used[ti]) out.unmatched_tracks.push_back(ti);
    for (std::size_t ri = 0; ri < regions.size(); ++ri)
        if (!region_used[ri]) out.unmatched_regions.push_back(ri);
    return out;
}

// Measurement update plus decision bookkeeping for a matched pair.
inline void observe(Track& t, const ObjectRegion& region, Decision preliminary, int frame,
                    const FusionConfig& cfg) {
    const PointD c = region_center(region.bbox);
    t.kx.update(c.x, cfg.measurement_noise);
    t.ky.update(c.y, cfg.measurement_noise);
    t.center_history.push_back(c);
    t.last_bbox = region.bbox;
    t.life = 0;
    t.m += 1;
    if (preliminary == Decision::bicycle) t.m_b += 1;
    t.last_frame = frame;
    t.matched_now = true;
    t.trail.emplace_back(frame, region.bbox);
}

// Ages unmatched tracks and removes the ones past the life cycle;
// removed tracks are returned so their terminal records can be emitted.
inline std::vector<Track> age_and_evict(std::vector<Track>& tracks, const FusionConfig& cfg) {
    std::vector<Track> evicted;
    for (Track& t : tracks)
        if (!t.matched_now) t.life += 1;
    auto it = std::stable_partition(tracks.begin(), tracks.end(),
                                    [&](const Track& t) { return t.life <= cfg.life_cycle; });
    evicted.assign(std::make_move_iterator(it), std::make_move_iterator(tracks.end()));
    tracks.erase(it, tracks.end());
    return evicted;
}

// Majority rule over all recorded preliminary decisions; the tie
// M_b = M/2 is not a bicycle.
inline Decision fuse_decision(const Track& t) {
    if (t.m == 0) throw NoObservations("track has no recorded decisions");
    return 2 * t.m_b > t.m ? Decision::bicycle : Decision::not_bicycle;
}

// COF = min(M/N, 1): full confidence once the track has been detected
// in at least N frames.
inline double confidence(const Track& t, const FusionConfig& cfg) {
    if (t.m >= cfg.life_cycle) return 1.0;
    return static_cast<double>(t.m) / static_cast<double>(cfg.life_cycle);
}

enum class Acceptance : std::uint8_t { not_acceptable = 0, acceptable = 1 };

inline Acceptance accept(double cof, const FusionConfig& cfg) {
    return cof >= cfg.t_cof ? Acceptance::acceptable : Acceptance::not_acceptable;
}

}  // namespace bikedet
