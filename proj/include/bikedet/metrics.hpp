#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "bikedet/errors.hpp"
#include "bikedet/pipeline.hpp"
#include "bikedet/scene.hpp"
#include "bikedet/tracking.hpp"

namespace bikedet {

struct EvalParams {
    double overlap_min = 0.3;  // mean IoU over the overlapping frames
    int min_temporal = 3;      // required frames of temporal overlap
};

// Integer tallies behind the rates; additive across scenes.
struct EvalCounts {
    long long truth_bicycles = 0;
    long long covered_bicycles = 0;   // truth bicycles covered by >=1 accepted bicycle record
    long long fp_records = 0;         // accepted bicycle records covering no truth bicycle
    long long covering_records = 0;   // accepted bicycle records covering >=1 truth bicycle

    EvalCounts& operator+=(const EvalCounts& o) {
        truth_bicycles += o.truth_bicycles;
        covered_bicycles += o.covered_bicycles;
        fp_records += o.fp_records;
        covering_records += o.covering_records;
        return *this;
    }
};

struct MetricsReport {
    double r_det = 0.0;
    double r_fp = 0.0;
    double r_rep = 0.0;
    double missing_rate = 1.0;
    double median_ms = 0.0;  // per-frame processing time, when the caller
    double p95_ms = 0.0;     // has timing samples (bench, acceptance)
    EvalCounts counts;
};

inline MetricsReport make_report(const EvalCounts& c) {
    MetricsReport r;
    r.counts = c;
    if (c.truth_bicycles > 0) {
        const double total = static_cast<double>(c.truth_bicycles);
        r.r_det = static_cast<double>(c.covered_bicycles) / total;
        r.r_fp = static_cast<double>(c.fp_records) / total;
        r.r_rep = std::max(0.0, static_cast<double>(c.covering_records) / total - 1.0);
    }
    r.missing_rate = 1.0 - r.r_det;
    return r;
}

// Which truth bicycles each record covers: temporal overlap of at
// least min_temporal frames and mean IoU over those frames >=
// overlap_min. Independent of any acceptance threshold.
inline std::vector<std::vector<std::size_t>> coverage_map(
    const std::vector<DetectionRecord>& records, const GroundTruth& truth, const EvalParams& p) {
    std::vector<std::size_t> bicycle_tracks;
    for (std::size_t i = 0; i < truth.tracks.size(); ++i)
        if (truth.tracks[i].cls == ActorClass::bicycle) bicycle_tracks.push_back(i);

    std::vector<std::vector<std::size_t>> covers(records.size());
    for (std::size_t ri = 0; ri < records.size(); ++ri) {
        const DetectionRecord& rec = records[ri];
        for (const auto& [frame, box] : rec.trail)
            if (frame >= truth.length)
                throw EvalError("record trail extends past the ground-truth scene length");
        for (std::size_t bi = 0; bi < bicycle_tracks.size(); ++bi) {
            const TruthTrack& tt = truth.tracks[bicycle_tracks[bi]];
            // truth boxes are frame-ordered; walk both lists in lockstep
            std::size_t a = 0, b = 0;
            int overlap = 0;
            double iou_sum = 0.0;
            while (a < rec.trail.size() && b < tt.boxes.size()) {
                const int fa = rec.trail[a].first, fb = tt.boxes[b].first;
                if (fa < fb) ++a;
                else if (fb < fa) ++b;
                else {
                    ++overlap;
                    iou_sum += box_iou(rec.trail[a].second, tt.boxes[b].second);
                    ++a;
                    ++b;
                }
            }
            if (overlap >= p.min_temporal && iou_sum / overlap >= p.overlap_min)
                covers[ri].push_back(bicycle_tracks[bi]);
        }
    }
    return covers;
}

// Tallies at one acceptance threshold. COF is computed for every
// track; the acceptance test is applied to bicycle-decided records
// when counting detections and false positives.
inline EvalCounts tally(const std::vector<DetectionRecord>& records, const GroundTruth& truth,
                        const EvalParams& p, double t_cof) {
    const std::vector<std::vector<std::size_t>> covers = coverage_map(records, truth, p);
    EvalCounts c;
    std::vector<char> truth_covered(truth.tracks.size(), 0);
    for (const TruthTrack& t : truth.tracks)
        if (t.cls == ActorClass::bicycle) ++c.truth_bicycles;
    for (std::size_t ri = 0; ri < records.size(); ++ri) {
        const DetectionRecord& rec = records[ri];
        if (rec.decision != Decision::bicycle || rec.cof < t_cof) continue;
        if (covers[ri].empty()) {
            ++c.fp_records;
        } else {
            ++c.covering_records;
            for (std::size_t ti : covers[ri]) truth_covered[ti] = 1;
        }
    }
    for (std::size_t i = 0; i < truth.tracks.size(); ++i)
        if (truth_covered[i]) ++c.covered_bicycles;
    return c;
}

// Re-applies the acceptance threshold over the same record set, one
// row per threshold; the pipeline is not re-run.
inline std::vector<std::pair<double, MetricsReport>> sweep_tcof(
    const std::vector<DetectionRecord>& records, const GroundTruth& truth, const EvalParams& p,
    const std::vector<double>& thresholds) {
    std::vector<std::pair<double, MetricsReport>> rows;
    for (double t : thresholds) {
        if (t < 0.0 || t > 1.0) throw ConfigError("sweep threshold outside [0,1]");
        rows.emplace_back(t, make_report(tally(records, truth, p, t)));
    }
    return rows;
}

// Timing statistics for the bench report.
inline double percentile(std::vector<double> samples, double q) {
    if (samples.empty()) return 0.0;
    std::sort(samples.begin(), samples.end());
    const double idx = q * static_cast<double>(samples.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(idx);
    const std::size_t hi = std::min(lo + 1, samples.size() - 1);
    const double frac = idx - static_cast<double>(lo);
    return samples[lo] + (samples[hi] - samples[lo]) * frac;
}

inline double median(const std::vector<double>& samples) { return percentile(samples, 0.5); }

inline MetricsReport& attach_timing(MetricsReport& report, const std::vector<double>& frame_ms) {
    report.median_ms = median(frame_ms);
    report.p95_ms = percentile(frame_ms, 0.95);
    return report;
}

}  // namespace bikedet
