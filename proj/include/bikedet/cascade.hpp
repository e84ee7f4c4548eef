#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "bikedet/errors.hpp"
#include "bikedet/features.hpp"
#include "bikedet/svm.hpp"

namespace bikedet {

// One weak classifier: a single feature tested against an interval.
struct CascadeStage {
    FeatureId feature = FeatureId::width;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
};

struct Cascade {
    std::vector<CascadeStage> stages;  // evaluated in order, early reject
};

inline bool is_shape_feature(FeatureId id) {
    return id == FeatureId::width || id == FeatureId::height || id == FeatureId::aspect_ratio;
}

// Cheap shape tests must come before the speed test.
inline void validate_stage_order(const std::vector<FeatureId>& order) {
    bool seen_speed = false;
    for (FeatureId id : order) {
        if (id == FeatureId::speed) seen_speed = true;
        else if (seen_speed && is_shape_feature(id))
            throw ConfigError("cascade: shape stages must precede the speed stage");
    }
}

inline void validate_cascade(const Cascade& c) {
    std::vector<FeatureId> order;
    for (const CascadeStage& s : c.stages) {
        if (s.lo > s.hi) throw ConfigError("cascade: stage interval has lo > hi");
        order.push_back(s.feature);
    }
    validate_stage_order(order);
}

// Builds each stage as the tightest interval keeping per_stage_tpr of
// the positives that survived earlier stages; stages that reject under
// 1% of the surviving negatives carry no power and are dropped. Rows
// with an unset (NaN) feature pass that stage, mirroring inference.
inline Cascade calibrate_cascade(const TrainingSet& data, double per_stage_tpr,
                                 const std::vector<FeatureId>& stage_order) {
    if (data.positives.empty()) throw EmptyClass("training set has no positives");
    if (data.negatives.empty()) throw EmptyClass("training set has no negatives");
    if (!(per_stage_tpr > 0.5 && per_stage_tpr <= 1.0))
        throw ConfigError("cascade: per_stage_tpr must be in (0.5, 1]");
    validate_stage_order(stage_order);

    auto column = [&](FeatureId id) {
        for (std::size_t j = 0; j < data.layout.size(); ++j)
            if (data.layout[j] == id) return j;
        throw LayoutError(std::string("stage feature missing from layout: ") + feature_name(id));
    };

    std::vector<const std::vector<double>*> pos, neg;
    for (const auto& r : data.positives) pos.push_back(&r);
    for (const auto& r : data.negatives) neg.push_back(&r);

    Cascade cascade;
    for (FeatureId id : stage_order) {
        const std::size_t col = column(id);
        std::vector<double> vals;
        for (const auto* r : pos)
            if (std::isfinite((*r)[col])) vals.push_back((*r)[col]);
        if (vals.empty()) throw CalibrationError("no surviving positives with feature " +
                                                 std::string(feature_name(id)));
        std::sort(vals.begin(), vals.end());
        const std::size_t m = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(per_stage_tpr * static_cast<double>(vals.size()))));
        std::size_t best_i = 0;
        double best_width = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + m <= vals.size(); ++i) {
            const double width = vals[i + m - 1] - vals[i];
            if (width < best_width) {
                best_width = width;
                best_i = i;
            }
        }
        CascadeStage stage{id, vals[best_i], vals[best_i + m - 1]};

        auto passes = [&](const std::vector<double>* r) {
            const double v = (*r)[col];
            if (!std::isfinite(v)) return true;
            return v >= stage.lo && v <= stage.hi;
        };
        std::size_t rejected = 0;
        for (const auto* r : neg)
            if (!passes(r)) ++rejected;
        if (neg.empty() || rejected < static_cast<std::size_t>(
                               std::ceil(0.01 * static_cast<double>(neg.size()))))
            continue;  // no rejection power, drop the stage

        cascade.stages.push_back(stage);
        std::erase_if(pos, [&](const std::vector<double>* r) { return !passes(r); });
        std::erase_if(neg, [&](const std::vector<double>* r) { return !passes(r); });
        if (pos.empty()) throw CalibrationError("no positives survive the cascade");
    }
    return cascade;
}

// Evaluates stages in order; the first out-of-interval feature rejects
// the object and stops. A speed stage auto-passes while the track has
// no speed yet (first observation).
inline std::pair<Decision, int> cascade_decide(const Cascade& cascade, const FeatureVector& fv) {
    int evaluated = 0;
    for (const CascadeStage& stage : cascade.stages) {
        ++evaluated;
        if (stage.feature == FeatureId::speed && !fv.speed) continue;
        const double v = feature_value(fv, stage.feature);
        if (v < stage.lo || v > stage.hi) return {Decision::not_bicycle, evaluated};
    }
    return {Decision::bicycle, evaluated};
}

}  // namespace bikedet
