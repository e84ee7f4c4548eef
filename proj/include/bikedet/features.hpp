#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bikedet/errors.hpp"
#include "bikedet/frame.hpp"
#include "bikedet/segmentation.hpp"

namespace bikedet {

enum class FeatureId { fg_count, width, height, aspect_ratio, r_f, r_f_upper, r_f_lower, speed };

using FeatureLayout = std::vector<FeatureId>;

inline const char* feature_name(FeatureId id) {
    switch (id) {
        case FeatureId::fg_count: return "fg_count";
        case FeatureId::width: return "width";
        case FeatureId::height: return "height";
        case FeatureId::aspect_ratio: return "aspect_ratio";
        case FeatureId::r_f: return "r_f";
        case FeatureId::r_f_upper: return "r_f_upper";
        case FeatureId::r_f_lower: return "r_f_lower";
        default: return "speed";
    }
}

inline FeatureId feature_from_name(const std::string& name) {
    for (FeatureId id : {FeatureId::fg_count, FeatureId::width, FeatureId::height,
                         FeatureId::aspect_ratio, FeatureId::r_f, FeatureId::r_f_upper,
                         FeatureId::r_f_lower, FeatureId::speed})
        if (name == feature_name(id)) return id;
    throw LayoutError("unknown feature name " + name);
}

inline FeatureLayout default_layout() {
    return {FeatureId::fg_count, FeatureId::width,     FeatureId::height,
            FeatureId::aspect_ratio, FeatureId::r_f,   FeatureId::r_f_upper,
            FeatureId::r_f_lower,    FeatureId::speed};
}

// Layout for a track's first frame, where no speed exists yet.
inline FeatureLayout speedless_layout() {
    FeatureLayout l = default_layout();
    l.pop_back();
    return l;
}

// The per-object geometric features plus the track-averaged speed.
// speed stays unset for an object's first observation.
struct FeatureVector {
    long long fg_count = 0;
    int width = 0;
    int height = 0;
    double aspect_ratio = 0.0;
    double r_f = 0.0;
    double r_f_upper = 0.0;
    double r_f_lower = 0.0;
    std::optional<double> speed;
};

inline FeatureVector extract_static(const ObjectRegion& region) {
    const Box& b = region.bbox;
    if (b.width <= 0 || b.height <= 0) throw DegenerateRegion("region has zero-area bbox");
    FeatureVector fv;
    fv.fg_count = region.fg_count;
    fv.width = b.width;
    fv.height = b.height;
    fv.aspect_ratio = static_cast<double>(b.width) / b.height;
    fv.r_f = static_cast<double>(region.fg_count) / static_cast<double>(b.area());
    const long long upper_area = static_cast<long long>(region.upper_rows()) * b.width;
    const long long lower_area = static_cast<long long>(region.lower_rows()) * b.width;
    fv.r_f_upper = upper_area > 0
                       ? static_cast<double>(region.fg_count_upper) / static_cast<double>(upper_area)
                       : 0.0;
    fv.r_f_lower = lower_area > 0
                       ? static_cast<double>(region.fg_count_lower) / static_cast<double>(lower_area)
                       : 0.0;
    return fv;
}

// Mean displacement of the bbox center between consecutive observed
// frames; the averaging smooths out segmentation jitter.
inline double estimate_speed(std::span<const PointD> centers) {
    if (centers.size() < 2) throw InsufficientHistory("speed needs at least 2 observations");
    double total = 0.0;
    for (std::size_t j = 1; j < centers.size(); ++j) {
        const double dx = centers[j].x - centers[j - 1].x;
        const double dy = centers[j].y - centers[j - 1].y;
        total += std::sqrt(dx * dx + dy * dy);
    }
    return total / static_cast<double>(centers.size() - 1);
}

inline double feature_value(const FeatureVector& fv, FeatureId id) {
    switch (id) {
        case FeatureId::fg_count: return static_cast<double>(fv.fg_count);
        case FeatureId::width: return fv.width;
        case FeatureId::height: return fv.height;
        case FeatureId::aspect_ratio: return fv.aspect_ratio;
        case FeatureId::r_f: return fv.r_f;
        case FeatureId::r_f_upper: return fv.r_f_upper;
        case FeatureId::r_f_lower: return fv.r_f_lower;
        case FeatureId::speed:
            if (!fv.speed) throw MissingFeature("layout requests speed but it is unset");
            return *fv.speed;
    }
    throw LayoutError("bad feature id");
}

// Ordered numeric vector; the same layout is stored inside trained
// models so training and inference agree on feature order.
inline std::vector<double> to_vector(const FeatureVector& fv, const FeatureLayout& layout) {
    std::vector<double> x;
    x.reserve(layout.size());
    for (FeatureId id : layout) x.push_back(feature_value(fv, id));
    return x;
}

}  // namespace bikedet
