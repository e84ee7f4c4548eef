#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bikedet/errors.hpp"
#include "bikedet/features.hpp"

namespace bikedet {

// Rows are dense vectors aligned to layout. A non-finite value (NaN)
// marks an unset feature, which only ever happens in the speed column
// for first-frame observations.
struct TrainingSet {
    FeatureLayout layout;
    std::vector<std::vector<double>> positives;  // bicycles
    std::vector<std::vector<double>> negatives;
};

struct SvmModel {
    FeatureLayout layout;  // features the model consumes, after constant drops
    std::vector<double> w;
    double b = 0.0;
    std::vector<double> mean;    // z-score stats from training data
    std::vector<double> stddev;  // all > 0
    std::vector<std::string> dropped;  // constant features removed, with a warning
};

enum class Decision : std::uint8_t { not_bicycle = 0, bicycle = 1 };

namespace detail {

inline double svm_objective(const std::vector<std::vector<double>>& xs,
                            const std::vector<int>& ys, const std::vector<double>& w, double b,
                            double lambda) {
    double reg = 0.0;
    for (double v : w) reg += v * v;
    double hinge = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double f = -b;
        for (std::size_t j = 0; j < w.size(); ++j) f += w[j] * xs[i][j];
        hinge += std::max(0.0, 1.0 - ys[i] * f);
    }
    return 0.5 * lambda * reg + hinge / static_cast<double>(xs.size());
}

}  // namespace detail

// L2-regularized hinge loss, full-batch subgradient descent with a
// 1/(lambda*t) schedule, keeping the best iterate seen. Deterministic:
// fixed schedule, fixed data order, no randomness.
inline SvmModel train_svm(const TrainingSet& data, double regularization = 0.01,
                          int budget = 20000) {
    if (data.positives.empty()) throw EmptyClass("training set has no positives");
    if (data.negatives.empty()) throw EmptyClass("training set has no negatives");
    if (regularization <= 0.0) throw ConfigError("svm: regularization must be positive");
    if (budget <= 0) throw ConfigError("svm: budget must be positive");
    const std::size_t dim = data.layout.size();
    for (const auto& row : data.positives)
        if (row.size() != dim) throw LayoutError("positive row size does not match layout");
    for (const auto& row : data.negatives)
        if (row.size() != dim) throw LayoutError("negative row size does not match layout");

    // skip rows with unset features; compute standardization on the rest
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    auto usable = [&](const std::vector<double>& r) {
        return std::all_of(r.begin(), r.end(), [](double v) { return std::isfinite(v); });
    };
    for (const auto& r : data.positives)
        if (usable(r)) { rows.push_back(r); labels.push_back(+1); }
    for (const auto& r : data.negatives)
        if (usable(r)) { rows.push_back(r); labels.push_back(-1); }
    if (rows.empty()) throw EmptyClass("no finite training rows");

    const std::size_t n = rows.size();
    std::vector<double> mean(dim, 0.0), stddev(dim, 0.0);
    for (const auto& r : rows)
        for (std::size_t j = 0; j < dim; ++j) mean[j] += r[j];
    for (std::size_t j = 0; j < dim; ++j) mean[j] /= static_cast<double>(n);
    for (const auto& r : rows)
        for (std::size_t j = 0; j < dim; ++j) stddev[j] += (r[j] - mean[j]) * (r[j] - mean[j]);
    for (std::size_t j = 0; j < dim; ++j) stddev[j] = std::sqrt(stddev[j] / static_cast<double>(n));

    SvmModel model;
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < dim; ++j) {
        if (stddev[j] > 0.0) {
            keep.push_back(j);
            model.layout.push_back(data.layout[j]);
            model.mean.push_back(mean[j]);
            model.stddev.push_back(stddev[j]);
        } else {
            model.dropped.push_back(std::string("constant feature dropped: ") +
                                    feature_name(data.layout[j]));
        }
    }
    const std::size_t d = keep.size();

    std::vector<std::vector<double>> xs(n, std::vector<double>(d));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j)
            xs[i][j] = (rows[i][keep[j]] - model.mean[j]) / model.stddev[j];

    const double lambda = regularization;
    std::vector<double> w(d, 0.0), best_w(d, 0.0), grad(d, 0.0);
    double b = 0.0, best_b = 0.0;
    double best_obj = detail::svm_objective(xs, labels, w, b, lambda);
    double window_best = best_obj;
    int window_iters = 0;

    for (int t = 1; t <= budget; ++t) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_b = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double f = -b;
            for (std::size_t j = 0; j < d; ++j) f += w[j] * xs[i][j];
            if (labels[i] * f < 1.0) {
                for (std::size_t j = 0; j < d; ++j) grad[j] -= labels[i] * xs[i][j];
                grad_b += labels[i];
            }
        }
        const double inv_n = 1.0 / static_cast<double>(n);
        const double eta = 1.0 / (lambda * (static_cast<double>(t) + 10.0));
        for (std::size_t j = 0; j < d; ++j) w[j] -= eta * (lambda * w[j] + grad[j] * inv_n);
        b -= eta * (grad_b * inv_n);

        const double obj = detail::svm_objective(xs, labels, w, b, lambda);
        if (obj < best_obj) {
            best_obj = obj;
            best_w = w;
            best_b = b;
        }
        // stop once a window of iterations fails to improve by 1e-4 relative
        if (++window_iters >= 200) {
            if (window_best - best_obj < 1e-4 * std::max(1e-12, window_best)) break;
            window_best = best_obj;
            window_iters = 0;
        }
    }

    model.w = best_w;
    model.b = best_b;
    return model;
}

// Fusion result F = w . x_standardized - b.
inline double svm_score(const SvmModel& model, const std::vector<double>& x_raw) {
    if (x_raw.size() != model.layout.size())
        throw LayoutError("feature vector size does not match model layout");
    double f = -model.b;
    for (std::size_t j = 0; j < x_raw.size(); ++j)
        f += model.w[j] * ((x_raw[j] - model.mean[j]) / model.stddev[j]);
    return f;
}

inline double svm_score(const SvmModel& model, const FeatureVector& fv) {
    return svm_score(model, to_vector(fv, model.layout));
}

// Boundary inclusive: F = 0 is a bicycle.
inline Decision svm_decide(double f) {
    return f >= 0.0 ? Decision::bicycle : Decision::not_bicycle;
}

}  // namespace bikedet
