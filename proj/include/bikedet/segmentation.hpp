#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <tuple>
#include <utility>
#include <vector>

#include "bikedet/errors.hpp"
#include "bikedet/frame.hpp"

namespace bikedet {

enum class Element { cross, box };  // 3x3 structuring elements

struct MorphParams {
    Element open_element = Element::cross;
    int open_iterations = 1;
    Element close_element = Element::box;
    int close_iterations = 1;
};

namespace detail {

// Offsets of the 3x3 element. Out-of-bounds neighbors read as background.
inline const std::vector<std::pair<int, int>>& element_offsets(Element e) {
    static const std::vector<std::pair<int, int>> cross = {
        {0, 0}, {-1, 0}, {1, 0}, {0, -1}, {0, 1}};
    static const std::vector<std::pair<int, int>> box = {
        {0, 0}, {-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}};
    return e == Element::cross ? cross : box;
}

inline ForegroundMask morph_pass(const ForegroundMask& in, Element e, bool erode) {
    const auto& offs = element_offsets(e);
    ForegroundMask out(in.width, in.height);
    for (int y = 0; y < in.height; ++y)
        for (int x = 0; x < in.width; ++x) {
            bool value = erode;
            for (const auto& [dx, dy] : offs) {
                const int nx = x + dx, ny = y + dy;
                const bool fg =
                    nx >= 0 && nx < in.width && ny >= 0 && ny < in.height && in.at(nx, ny) != 0;
                if (erode) {
                    if (!fg) { value = false; break; }
                } else {
                    if (fg) { value = true; break; }
                }
            }
            out.at(x, y) = value ? 1 : 0;
        }
    return out;
}

}  // namespace detail

inline ForegroundMask erode(const ForegroundMask& mask, Element e) {
    return detail::morph_pass(mask, e, true);
}

inline ForegroundMask dilate(const ForegroundMask& mask, Element e) {
    return detail::morph_pass(mask, e, false);
}

// Opening (erode, dilate) to drop speckle, then closing (dilate, erode)
// to fill holes.
inline ForegroundMask morphological_clean(const ForegroundMask& mask, const MorphParams& p = {}) {
    ForegroundMask m = mask;
    for (int i = 0; i < p.open_iterations; ++i) m = erode(m, p.open_element);
    for (int i = 0; i < p.open_iterations; ++i) m = dilate(m, p.open_element);
    for (int i = 0; i < p.close_iterations; ++i) m = dilate(m, p.close_element);
    for (int i = 0; i < p.close_iterations; ++i) m = erode(m, p.close_element);
    return m;
}

// One segmented blob. row_counts keeps the per-row foreground histogram
// (relative to bbox.y) so upper/lower splits survive region fusion.
struct ObjectRegion {
    Box bbox;
    long long fg_count = 0;
    long long fg_count_upper = 0;  // first ceil(h/2) rows of bbox
    long long fg_count_lower = 0;
    std::vector<long long> row_counts;

    int upper_rows() const { return (bbox.height + 1) / 2; }
    int lower_rows() const { return bbox.height / 2; }
};

namespace detail {

inline void split_halves(ObjectRegion& r) {
    const int upper = r.upper_rows();
    r.fg_count_upper = 0;
    for (int i = 0; i < upper && i < static_cast<int>(r.row_counts.size()); ++i)
        r.fg_count_upper += r.row_counts[i];
    r.fg_count_lower = r.fg_count - r.fg_count_upper;
}

}  // namespace detail

// 8-connectivity labeling. Components smaller than min_area are
// dropped; output is sorted by bbox (y, x, w, h) for determinism.
inline std::vector<ObjectRegion> connected_components(const ForegroundMask& mask,
                                                      long long min_area = 0) {
    const int w = mask.width, h = mask.height;
    std::vector<std::int32_t> label(static_cast<std::size_t>(w) * h, -1);
    std::vector<ObjectRegion> regions;
    std::vector<std::pair<int, int>> stack;

    for (int sy = 0; sy < h; ++sy)
        for (int sx = 0; sx < w; ++sx) {
            const std::size_t si = static_cast<std::size_t>(sy) * w + sx;
            if (!mask.bits[si] || label[si] >= 0) continue;
            const std::int32_t id = static_cast<std::int32_t>(regions.size());
            label[si] = id;
            stack.clear();
            stack.emplace_back(sx, sy);
            int min_x = sx, max_x = sx, min_y = sy, max_y = sy;
            std::vector<std::pair<int, int>> pixels;
            while (!stack.empty()) {
                const auto [x, y] = stack.back();
                stack.pop_back();
                pixels.emplace_back(x, y);
                min_x = std::min(min_x, x);
                max_x = std::max(max_x, x);
                min_y = std::min(min_y, y);
                max_y = std::max(max_y, y);
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        const int nx = x + dx, ny = y + dy;
                        if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                        const std::size_t ni = static_cast<std::size_t>(ny) * w + nx;
                        if (mask.bits[ni] && label[ni] < 0) {
                            label[ni] = id;
                            stack.emplace_back(nx, ny);
                        }
                    }
            }
            ObjectRegion r;
            r.bbox = Box{min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
            r.fg_count = static_cast<long long>(pixels.size());
            r.row_counts.assign(r.bbox.height, 0);
            for (const auto& [x, y] : pixels) ++r.row_counts[y - min_y];
            detail::split_halves(r);
            regions.push_back(std::move(r));
        }

    std::erase_if(regions, [&](const ObjectRegion& r) { return r.fg_count < min_area; });
    std::stable_sort(regions.begin(), regions.end(), [](const ObjectRegion& a, const ObjectRegion& b) {
        return std::tie(a.bbox.y, a.bbox.x, a.bbox.width, a.bbox.height, a.fg_count) <
               std::tie(b.bbox.y, b.bbox.x, b.bbox.width, b.bbox.height, b.fg_count);
    });
    return regions;
}

namespace detail {

// Chebyshev-style rectangle distance: max of per-axis gaps, 0 when the
// boxes overlap.
inline int box_gap(const Box& a, const Box& b) {
    const int gx = std::max({0, b.x - a.right(), a.x - b.right()});
    const int gy = std::max({0, b.y - a.bottom(), a.y - b.bottom()});
    return std::max(gx, gy);
}

inline ObjectRegion merge_regions(const std::vector<const ObjectRegion*>& parts) {
    ObjectRegion out;
    int min_x = parts[0]->bbox.x, min_y = parts[0]->bbox.y;
    int max_x = parts[0]->bbox.right(), max_y = parts[0]->bbox.bottom();
    for (const ObjectRegion* r : parts) {
        min_x = std::min(min_x, r->bbox.x);
        min_y = std::min(min_y, r->bbox.y);
        max_x = std::max(max_x, r->bbox.right());
        max_y = std::max(max_y, r->bbox.bottom());
    }
    out.bbox = Box{min_x, min_y, max_x - min_x, max_y - min_y};
    out.row_counts.assign(out.bbox.height, 0);
    for (const ObjectRegion* r : parts) {
        out.fg_count += r->fg_count;
        for (std::size_t i = 0; i < r->row_counts.size(); ++i)
            out.row_counts[r->bbox.y - min_y + i] += r->row_counts[i];
    }
    split_halves(out);
    return out;
}

}  // namespace detail

// Transitive merge of regions whose boxes come within max_gap pixels;
// iterated to a fixpoint so the operation is idempotent.
inline std::vector<ObjectRegion> fuse_regions(std::vector<ObjectRegion> regions, int max_gap) {
    bool changed = true;
    while (changed && regions.size() > 1) {
        changed = false;
        const std::size_t n = regions.size();
        std::vector<std::size_t> parent(n);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](std::size_t i) {
            while (parent[i] != i) i = parent[i] = parent[parent[i]];
            return i;
        };
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (detail::box_gap(regions[i].bbox, regions[j].bbox) <= max_gap) {
                    const std::size_t ri = find(i), rj = find(j);
                    if (ri != rj) {
                        parent[std::max(ri, rj)] = std::min(ri, rj);
                        changed = true;
                    }
                }
        if (!changed) break;
        std::vector<std::vector<const ObjectRegion*>> groups(n);
        for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(&regions[i]);
        std::vector<ObjectRegion> merged;
        for (auto& g : groups)
            if (!g.empty()) merged.push_back(detail::merge_regions(g));
        regions = std::move(merged);
    }
    std::stable_sort(regions.begin(), regions.end(), [](const ObjectRegion& a, const ObjectRegion& b) {
        return std::tie(a.bbox.y, a.bbox.x, a.bbox.width, a.bbox.height, a.fg_count) <
               std::tie(b.bbox.y, b.bbox.x, b.bbox.width, b.bbox.height, b.fg_count);
    });
    return regions;
}

}  // namespace bikedet
