#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "bikedet/errors.hpp"
#include "bikedet/frame.hpp"

namespace bikedet {

struct GmmParams {
    int k = 3;                    // Gaussians per pixel
    double alpha = 0.005;         // learning rate, in (0,1)
    double t_bg = 0.7;            // background portion of total weight
    double match_sigma = 2.5;     // match threshold in standard deviations
    double init_variance = 225.0;
    double variance_floor = 4.0;
};

// Per-pixel adaptive Gaussian mixture over luma. Slots are stored
// interleaved (weight, mean, variance) x k per pixel; unused slots have
// weight 0. All arithmetic is float with fixed evaluation order, so the
// masks are reproducible run to run.
class GmmBackground {
public:
    GmmBackground(const Frame& first_frame, const GmmParams& params = {}) : p_(params) {
        if (p_.k < 1 || p_.k > 8) throw ConfigError("gmm: k must be in 1..8");
        if (!(p_.alpha > 0.0 && p_.alpha < 1.0)) throw ConfigError("gmm: alpha must be in (0,1)");
        if (!(p_.t_bg > 0.0 && p_.t_bg <= 1.0)) throw ConfigError("gmm: t_bg must be in (0,1]");
        if (p_.match_sigma <= 0.0) throw ConfigError("gmm: match_sigma must be positive");
        if (p_.init_variance <= 0.0 || p_.variance_floor <= 0.0)
            throw ConfigError("gmm: variances must be positive");
        width_ = first_frame.width;
        height_ = first_frame.height;
        const std::size_t npx = first_frame.pixels.size();
        slots_.assign(npx * static_cast<std::size_t>(p_.k) * 3, 0.0f);
        // one Gaussian per pixel centered at the first-frame value
        for (std::size_t i = 0; i < npx; ++i) {
            float* s = slot(i, 0);
            s[0] = 1.0f;
            s[1] = static_cast<float>(first_frame.pixels[i]);
            s[2] = static_cast<float>(p_.init_variance);
        }
    }

    int width() const { return width_; }
    int height() const { return height_; }
    const GmmParams& params() const { return p_; }

    // weight of slot j for pixel i (test hook)
    float slot_weight(std::size_t i, int j) const { return slots_[(i * p_.k + j) * 3]; }
    float slot_mean(std::size_t i, int j) const { return slots_[(i * p_.k + j) * 3 + 1]; }
    float slot_variance(std::size_t i, int j) const { return slots_[(i * p_.k + j) * 3 + 2]; }

    // One adaptive step: match, update, renormalize, then label the
    // pixel against the weight/sigma-ordered background prefix.
    ForegroundMask update_and_subtract(const Frame& frame) {
        if (frame.width != width_ || frame.height != height_)
            throw DimensionError("gmm: frame dimensions do not match model");
        const int k = p_.k;
        const float alpha = static_cast<float>(p_.alpha);
        const float match2 = static_cast<float>(p_.match_sigma * p_.match_sigma);
        const float floor = static_cast<float>(p_.variance_floor);
        const float t_bg = static_cast<float>(p_.t_bg);
        ForegroundMask mask(width_, height_);
        const std::size_t npx = frame.pixels.size();

        for (std::size_t i = 0; i < npx; ++i) {
            float* s = slot(i, 0);
            const float x = static_cast<float>(frame.pixels[i]);

            // nearest active Gaussian within match_sigma standard deviations
            int matched = -1;
            float best_d2 = 0.0f;
            for (int j = 0; j < k; ++j) {
                const float w = s[j * 3];
                if (w <= 0.0f) continue;
                const float d = x - s[j * 3 + 1];
                const float d2 = d * d;
                if (d2 <= match2 * s[j * 3 + 2] && (matched < 0 || d2 < best_d2)) {
                    matched = j;
                    best_d2 = d2;
                }
            }

            if (matched >= 0) {
                for (int j = 0; j < k; ++j) s[j * 3] *= 1.0f - alpha;
                float* m = s + matched * 3;
                m[0] += alpha;
                const float mean_new = m[1] + alpha * (x - m[1]);
                const float dn = x - mean_new;
                float var_new = (1.0f - alpha) * m[2] + alpha * dn * dn;
                if (var_new < floor) var_new = floor;
                m[1] = mean_new;
                m[2] = var_new;
            } else {
                // replace the weakest (or an empty) slot
                int victim = 0;
                for (int j = 1; j < k; ++j)
                    if (s[j * 3] < s[victim * 3]) victim = j;
                for (int j = 0; j < k; ++j) s[j * 3] *= 1.0f - alpha;
                float* m = s + victim * 3;
                m[0] = alpha;
                m[1] = x;
                m[2] = static_cast<float>(p_.init_variance);
            }

            float total = 0.0f;
            for (int j = 0; j < k; ++j) total += s[j * 3];
            if (total > 0.0f)
                for (int j = 0; j < k; ++j) s[j * 3] /= total;

            bool foreground = true;
            if (matched >= 0) {
                // rank slots by weight/sigma; compare w_a^2*var_b > w_b^2*var_a
                int order[8];
                int active = 0;
                for (int j = 0; j < k; ++j)
                    if (s[j * 3] > 0.0f) order[active++] = j;
                for (int a = 1; a < active; ++a) {
                    const int oj = order[a];
                    int b = a - 1;
                    while (b >= 0 &&
                           s[oj * 3] * s[oj * 3] * s[order[b] * 3 + 2] >
                               s[order[b] * 3] * s[order[b] * 3] * s[oj * 3 + 2]) {
                        order[b + 1] = order[b];
                        --b;
                    }
                    order[b + 1] = oj;
                }
                float prefix = 0.0f;
                for (int a = 0; a < active; ++a) {
                    const bool in_prefix = prefix < t_bg;  // slot needed to reach t_bg
                    if (order[a] == matched) {
                        foreground = !in_prefix;
                        break;
                    }
                    prefix += s[order[a] * 3];
                }
            }
            mask.bits[i] = foreground ? 1 : 0;
        }
        return mask;
    }

private:
    float* slot(std::size_t pixel, int j) { return &slots_[(pixel * p_.k + j) * 3]; }

    GmmParams p_;
    int width_ = 0;
    int height_ = 0;
    std::vector<float> slots_;
};

}  // namespace bikedet
