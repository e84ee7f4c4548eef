#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bikedet/cascade.hpp"
#include "bikedet/model_file.hpp"
#include "bikedet/pipeline.hpp"
#include "bikedet/records_io.hpp"
#include "bikedet/scene.hpp"
#include "bikedet/svm.hpp"

namespace bikedet {

// Runs the tracking front end over a scene and labels every recorded
// observation against the ground-truth boxes of its frame. Regions
// matching no truth box keep the "background" label.
inline std::vector<FeatureRow> dump_labeled_features(std::span<const Frame> frames,
                                                     const GroundTruth& truth,
                                                     const PipelineConfig& cfg,
                                                     double min_label_iou = 0.4) {
    std::map<int, std::vector<std::pair<ActorClass, Box>>> truth_by_frame;
    for (const TruthTrack& t : truth.tracks)
        for (const auto& [frame, box] : t.boxes) truth_by_frame[frame].emplace_back(t.cls, box);

    std::vector<FeatureRow> rows;
    PipelineHooks hooks;
    hooks.on_observation = [&](int frame, int track_id, const ObjectRegion& region,
                               const FeatureVector& fv, Decision) {
        FeatureRow row;
        row.track_id = track_id;
        row.frame = frame;
        row.fv = fv;
        row.label = "background";
        double best = min_label_iou;
        const auto it = truth_by_frame.find(frame);
        if (it != truth_by_frame.end())
            for (const auto& [cls, box] : it->second) {
                const double iou = box_iou(region.bbox, box);
                if (iou >= best) {
                    best = iou;
                    row.label = to_string(cls);
                }
            }
        rows.push_back(std::move(row));
    };

    Fuser dummy;  // empty cascade, decisions are not recorded here
    run_pipeline(frames, dummy, cfg, hooks);
    return rows;
}

// Default cascade stage order: cheap shape tests first, speed last.
inline std::vector<FeatureId> default_stage_order() {
    return {FeatureId::width,     FeatureId::height,    FeatureId::aspect_ratio,
            FeatureId::fg_count,  FeatureId::r_f,       FeatureId::r_f_upper,
            FeatureId::r_f_lower, FeatureId::speed};
}

inline Fuser train_fuser(const std::vector<FeatureRow>& rows, const std::string& method,
                         const PipelineConfig& cfg) {
    Fuser fuser;
    if (method == "svm") {
        fuser.kind = Fuser::Kind::svm;
        fuser.svm_full =
            train_svm(training_set_from_rows(rows, default_layout()), cfg.svm_regularization,
                      cfg.svm_budget);
        fuser.svm_first =
            train_svm(training_set_from_rows(rows, speedless_layout()), cfg.svm_regularization,
                      cfg.svm_budget);
    } else if (method == "cascade") {
        fuser.kind = Fuser::Kind::cascade;
        fuser.cascade = calibrate_cascade(training_set_from_rows(rows, default_layout()),
                                          cfg.per_stage_tpr, default_stage_order());
    } else {
        throw ConfigError("train: method must be svm or cascade");
    }
    return fuser;
}

}  // namespace bikedet
