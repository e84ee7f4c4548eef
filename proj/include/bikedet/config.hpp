#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <string>
#include <utility>

#include "bikedet/errors.hpp"
#include "bikedet/gmm.hpp"
#include "bikedet/segmentation.hpp"
#include "bikedet/tracking.hpp"

namespace bikedet {

// Everything tunable about a pipeline run, grouped by config section.
struct PipelineConfig {
    // [background]
    GmmParams background;
    int warmup = 50;  // frames excluded from detection while the model settles

    // [segmentation]
    MorphParams morph;
    long long min_area = 50;
    int max_gap = 5;

    // [classifier]
    double svm_regularization = 0.01;
    int svm_budget = 20000;
    double per_stage_tpr = 0.99;

    // [tracking]
    FusionConfig tracking;

    // [eval]
    double eval_overlap_min = 0.3;
    int eval_min_temporal = 3;

    void validate() const {
        if (warmup < 0) throw ConfigError("background: warmup must be >= 0");
        if (min_area < 0) throw ConfigError("segmentation: min_area must be >= 0");
        if (max_gap < 0) throw ConfigError("segmentation: max_gap must be >= 0");
        if (morph.open_iterations < 0 || morph.close_iterations < 0)
            throw ConfigError("segmentation: iteration counts must be >= 0");
        tracking.validate();
        if (!(eval_overlap_min > 0.0 && eval_overlap_min <= 1.0))
            throw ConfigError("eval: overlap_min must be in (0,1]");
        if (eval_min_temporal < 1) throw ConfigError("eval: min_temporal_overlap must be >= 1");
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline Element element_from_string(const std::string& v, int line) {
    if (v == "cross") return Element::cross;
    if (v == "box") return Element::box;
    throw ConfigError("line " + std::to_string(line) + ": element must be cross or box");
}

}  // namespace detail

// TOML-style sections of key = value pairs; '#' starts a comment.
inline PipelineConfig parse_config(std::istream& in, PipelineConfig cfg = {}) {
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": unterminated section");
            section = detail::trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");

        auto as_double = [&] {
            char* end = nullptr;
            const double v = std::strtod(value.c_str(), &end);
            if (end == value.c_str() || *end != '\0')
                throw ConfigError("line " + std::to_string(lineno) + ": bad number " + value);
            return v;
        };
        auto as_int = [&] {
            char* end = nullptr;
            const long v = std::strtol(value.c_str(), &end, 10);
            if (end == value.c_str() || *end != '\0')
                throw ConfigError("line " + std::to_string(lineno) + ": bad integer " + value);
            return static_cast<int>(v);
        };

        const std::string full = section + "." + key;
        if (full == "background.k") cfg.background.k = as_int();
        else if (full == "background.alpha") cfg.background.alpha = as_double();
        else if (full == "background.t_bg") cfg.background.t_bg = as_double();
        else if (full == "background.match_sigma") cfg.background.match_sigma = as_double();
        else if (full == "background.init_variance") cfg.background.init_variance = as_double();
        else if (full == "background.variance_floor") cfg.background.variance_floor = as_double();
        else if (full == "background.warmup") cfg.warmup = as_int();
        else if (full == "segmentation.open_element")
            cfg.morph.open_element = detail::element_from_string(value, lineno);
        else if (full == "segmentation.open_iterations") cfg.morph.open_iterations = as_int();
        else if (full == "segmentation.close_element")
            cfg.morph.close_element = detail::element_from_string(value, lineno);
        else if (full == "segmentation.close_iterations") cfg.morph.close_iterations = as_int();
        else if (full == "segmentation.min_area") cfg.min_area = as_int();
        else if (full == "segmentation.max_gap") cfg.max_gap = as_int();
        else if (full == "classifier.regularization") cfg.svm_regularization = as_double();
        else if (full == "classifier.budget") cfg.svm_budget = as_int();
        else if (full == "classifier.per_stage_tpr") cfg.per_stage_tpr = as_double();
        else if (full == "tracking.life_cycle") cfg.tracking.life_cycle = as_int();
        else if (full == "tracking.t_cof") cfg.tracking.t_cof = as_double();
        else if (full == "tracking.match_min_overlap") cfg.tracking.match_min_overlap = as_double();
        else if (full == "tracking.process_noise") cfg.tracking.process_noise = as_double();
        else if (full == "tracking.measurement_noise") cfg.tracking.measurement_noise = as_double();
        else if (full == "eval.overlap_min") cfg.eval_overlap_min = as_double();
        else if (full == "eval.min_temporal_overlap") cfg.eval_min_temporal = as_int();
        else throw ConfigError("line " + std::to_string(lineno) + ": unknown key " + full);
    }
    cfg.validate();
    return cfg;
}

inline PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    return parse_config(in, std::move(base));
}

}  // namespace bikedet
