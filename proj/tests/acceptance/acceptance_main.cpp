// Acceptance suite: runs every criterion at its stated tolerance and
// prints one pass/fail line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "bikedet/cascade.hpp"
#include "bikedet/config.hpp"
#include "bikedet/corpus.hpp"
#include "bikedet/metrics.hpp"
#include "bikedet/model_file.hpp"
#include "bikedet/pgm.hpp"
#include "bikedet/pipeline.hpp"
#include "bikedet/records_io.hpp"
#include "bikedet/scene.hpp"
#include "bikedet/suite.hpp"
#include "bikedet/svm.hpp"
#include "bikedet/tracking.hpp"

using namespace bikedet;
namespace fs = std::filesystem;

namespace {

int failures = 0;

struct Criterion {
    int id;
    const char* name;
    std::chrono::steady_clock::time_point start;
    std::string detail;
    bool ok = true;

    Criterion(int id_, const char* name_) : id(id_), name(name_) {
        start = std::chrono::steady_clock::now();
    }
    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    void finish(double budget_s = 0.0) {
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (budget_s > 0.0 && elapsed >= budget_s)
            expect(false, "runtime " + std::to_string(elapsed) + "s over budget");
        std::printf("CRITERION %d %-28s %s  (%.2f s)%s%s\n", id, name, ok ? "PASS" : "FAIL",
                    elapsed, detail.empty() ? "" : "  -- ", detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
};

bool close(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

SvmModel identity_svm(std::vector<double> w, double b) {
    SvmModel m;
    for (std::size_t i = 0; i < w.size(); ++i) {
        m.layout.push_back(static_cast<FeatureId>(i));
        m.mean.push_back(0.0);
        m.stddev.push_back(1.0);
    }
    m.w = std::move(w);
    m.b = b;
    return m;
}

// ---------------------------------------------------------------- C1
void criterion_equations() {
    Criterion c(1, "unit-exact equation suite");

    // speed: mean displacement of consecutive centers
    c.expect(estimate_speed(std::vector<PointD>{{0, 0}, {2, 0}, {6, 0}, {12, 0}}) == 4.0,
             "speed of 2,4,6 displacements");
    c.expect(estimate_speed(std::vector<PointD>{{4, 4}, {4, 4}, {4, 4}}) == 0.0, "stationary speed");
    c.expect(estimate_speed(std::vector<PointD>{{0, 0}, {3, 4}}) == 5.0, "3-4-5 speed");

    // fusion result F and the inclusive F >= 0 boundary
    const SvmModel m = identity_svm({1.0, -1.0}, 0.5);
    c.expect(svm_score(m, std::vector<double>{2.0, 1.0}) == 0.5, "F arithmetic");
    c.expect(svm_score(m, std::vector<double>{1.0, 0.5}) == 0.0, "F on hyperplane");
    c.expect(svm_decide(0.5) == Decision::bicycle, "F=0.5 decision");
    c.expect(svm_decide(0.0) == Decision::bicycle, "F=0 inclusive");
    c.expect(svm_decide(-0.01) == Decision::not_bicycle, "F<0 decision");

    // strict majority with the tie rejected
    Track t;
    t.m = 5;
    t.m_b = 3;
    c.expect(fuse_decision(t) == Decision::bicycle, "majority 3/5");
    t.m = 4;
    t.m_b = 2;
    c.expect(fuse_decision(t) == Decision::not_bicycle, "tie 2/4");
    t.m = 1;
    t.m_b = 1;
    c.expect(fuse_decision(t) == Decision::bicycle, "majority 1/1");

    // confidence branches and the inclusive acceptance threshold
    FusionConfig fc;
    fc.life_cycle = 15;
    t.m = 15;
    c.expect(confidence(t, fc) == 1.0, "COF at M=N");
    t.m = 6;
    c.expect(close(confidence(t, fc), 0.4), "COF 6/15");
    t.m = 40;
    c.expect(confidence(t, fc) == 1.0, "COF clamped");
    fc.t_cof = 0.4;
    c.expect(accept(0.4, fc) == Acceptance::acceptable, "COF=T inclusive");
    c.expect(accept(0.39, fc) == Acceptance::not_acceptable, "COF<T rejected");
    fc.t_cof = 0.0;
    c.expect(accept(0.0, fc) == Acceptance::acceptable, "T=0 accepts everything");

    c.finish(1.0);
}

// ---------------------------------------------------------------- C2
void criterion_oracles() {
    Criterion c(2, "oracle equivalence");
    std::mt19937 rng(4242);

    {  // cascade vs full conjunction, exact over 10^4 vectors
        Cascade cascade;
        cascade.stages = {{FeatureId::width, 10, 40},
                          {FeatureId::height, 8, 30},
                          {FeatureId::aspect_ratio, 0.8, 1.6},
                          {FeatureId::r_f_upper, 0.0, 0.4},
                          {FeatureId::r_f_lower, 0.3, 1.0},
                          {FeatureId::speed, 1.0, 2.5}};
        std::uniform_real_distribution<double> u(0.0, 1.0);
        int mismatches = 0;
        for (int i = 0; i < 10000; ++i) {
            FeatureVector fv;
            fv.fg_count = static_cast<long long>(u(rng) * 900);
            fv.width = 1 + static_cast<int>(u(rng) * 63);
            fv.height = 1 + static_cast<int>(u(rng) * 39);
            fv.aspect_ratio = static_cast<double>(fv.width) / fv.height;
            fv.r_f = u(rng);
            fv.r_f_upper = u(rng);
            fv.r_f_lower = u(rng);
            if (u(rng) < 0.8) fv.speed = u(rng) * 4.0;
            bool pass = true;
            for (const CascadeStage& s : cascade.stages) {
                if (s.feature == FeatureId::speed && !fv.speed) continue;
                const double v = feature_value(fv, s.feature);
                if (v < s.lo || v > s.hi) {
                    pass = false;
                    break;
                }
            }
            if ((cascade_decide(cascade, fv).first == Decision::bicycle) != pass) ++mismatches;
        }
        c.expect(mismatches == 0, "cascade/conjunction mismatches: " + std::to_string(mismatches));
    }

    {  // connected components vs flood fill on 500 random masks
        std::uniform_int_distribution<int> dim(1, 16);
        std::bernoulli_distribution fill(0.45);
        int bad = 0;
        for (int trial = 0; trial < 500; ++trial) {
            ForegroundMask m(dim(rng), dim(rng));
            for (auto& b : m.bits) b = fill(rng) ? 1 : 0;

            // oracle: iterative flood fill, collect (count, bbox) multiset
            std::multiset<std::tuple<long long, int, int, int, int>> oracle;
            std::vector<char> seen(m.bits.size(), 0);
            for (int y = 0; y < m.height; ++y)
                for (int x = 0; x < m.width; ++x) {
                    const std::size_t i = static_cast<std::size_t>(y) * m.width + x;
                    if (!m.bits[i] || seen[i]) continue;
                    long long count = 0;
                    int minx = x, maxx = x, miny = y, maxy = y;
                    std::vector<std::pair<int, int>> frontier{{x, y}};
                    seen[i] = 1;
                    while (!frontier.empty()) {
                        auto [cx, cy] = frontier.back();
                        frontier.pop_back();
                        ++count;
                        minx = std::min(minx, cx);
                        maxx = std::max(maxx, cx);
                        miny = std::min(miny, cy);
                        maxy = std::max(maxy, cy);
                        for (int dy = -1; dy <= 1; ++dy)
                            for (int dx = -1; dx <= 1; ++dx) {
                                const int nx = cx + dx, ny = cy + dy;
                                if (nx < 0 || ny < 0 || nx >= m.width || ny >= m.height) continue;
                                const std::size_t ni = static_cast<std::size_t>(ny) * m.width + nx;
                                if (m.bits[ni] && !seen[ni]) {
                                    seen[ni] = 1;
                                    frontier.push_back({nx, ny});
                                }
                            }
                    }
                    oracle.insert({count, minx, miny, maxx, maxy});
                }

            std::multiset<std::tuple<long long, int, int, int, int>> got;
            for (const ObjectRegion& r : connected_components(m, 0))
                got.insert({r.fg_count, r.bbox.x, r.bbox.y, r.bbox.right() - 1, r.bbox.bottom() - 1});
            if (got != oracle) ++bad;
        }
        c.expect(bad == 0, "component partitions differing: " + std::to_string(bad));
    }

    {  // speed vs independent mean-of-distances oracle
        std::uniform_real_distribution<double> step(-5.0, 5.0);
        double worst = 0.0;
        for (int trial = 0; trial < 500; ++trial) {
            std::vector<PointD> walk{{0, 0}};
            const int n = 2 + trial % 40;
            for (int i = 1; i < n; ++i)
                walk.push_back({walk.back().x + step(rng), walk.back().y + step(rng)});
            double total = 0.0;
            for (std::size_t i = 1; i < walk.size(); ++i)
                total += std::hypot(walk[i].x - walk[i - 1].x, walk[i].y - walk[i - 1].y);
            const double oracle = total / static_cast<double>(walk.size() - 1);
            const double got = estimate_speed(walk);
            worst = std::max(worst, std::abs(got - oracle) / std::max(1.0, std::abs(oracle)));
        }
        c.expect(worst <= 1e-9, "speed relative error " + std::to_string(worst));
    }

    {  // svm objective vs grid oracle on 1-d and 2-d separable instances
        std::normal_distribution<double> n01(0.0, 0.5);
        for (int dims = 1; dims <= 2; ++dims) {
            TrainingSet data;
            for (int i = 0; i < dims; ++i) data.layout.push_back(static_cast<FeatureId>(i));
            for (int i = 0; i < 30; ++i) {
                std::vector<double> pos, neg;
                for (int d = 0; d < dims; ++d) {
                    pos.push_back(2.0 + n01(rng));
                    neg.push_back(-2.0 + n01(rng));
                }
                data.positives.push_back(pos);
                data.negatives.push_back(neg);
            }
            const double lambda = 0.02;
            const SvmModel m = train_svm(data, lambda, 20000);

            std::vector<std::vector<double>> xs;
            std::vector<int> ys;
            for (const auto& r : data.positives) {
                std::vector<double> z(dims);
                for (int d = 0; d < dims; ++d) z[d] = (r[d] - m.mean[d]) / m.stddev[d];
                xs.push_back(z);
                ys.push_back(+1);
            }
            for (const auto& r : data.negatives) {
                std::vector<double> z(dims);
                for (int d = 0; d < dims; ++d) z[d] = (r[d] - m.mean[d]) / m.stddev[d];
                xs.push_back(z);
                ys.push_back(-1);
            }
            const double model_obj = detail::svm_objective(xs, ys, m.w, m.b, lambda);
            double grid_obj = 1e300;
            if (dims == 1) {
                for (double w = -4.0; w <= 4.0; w += 0.02)
                    for (double b = -2.0; b <= 2.0; b += 0.02)
                        grid_obj = std::min(grid_obj, detail::svm_objective(xs, ys, {w}, b, lambda));
            } else {
                for (double w0 = -3.0; w0 <= 3.0; w0 += 0.06)
                    for (double w1 = -3.0; w1 <= 3.0; w1 += 0.06)
                        for (double b = -2.0; b <= 2.0; b += 0.05)
                            grid_obj = std::min(grid_obj,
                                                detail::svm_objective(xs, ys, {w0, w1}, b, lambda));
            }
            c.expect(model_obj <= grid_obj * 1.05 + 1e-9,
                     "svm objective " + std::to_string(model_obj) + " vs grid " +
                         std::to_string(grid_obj) + " in " + std::to_string(dims) + "-d");
        }
    }

    c.finish(30.0);
}

// shared state between criteria 3, 4, 6, 7
struct SuiteRun {
    Fuser svm;
    Fuser cascade;
    std::vector<std::vector<DetectionRecord>> svm_records;  // per eval scene
    std::vector<GroundTruth> truths;
    bool ready = false;
};

// ---------------------------------------------------------------- C3
void criterion_detection(SuiteRun& run) {
    Criterion c(3, "synthetic detection quality");
    try {
        PipelineConfig cfg;
        cfg.tracking.t_cof = 0.2;

        std::vector<FeatureRow> corpus;
        for (const SceneConfig& scene : training_suite()) {
            auto [frames, truth] = generate_scene(scene);
            const auto rows = dump_labeled_features(frames, truth, cfg);
            corpus.insert(corpus.end(), rows.begin(), rows.end());
        }
        run.svm = train_fuser(corpus, "svm", cfg);
        run.cascade = train_fuser(corpus, "cascade", cfg);

        const EvalParams eval_params{cfg.eval_overlap_min, cfg.eval_min_temporal};
        EvalCounts svm_counts, cascade_counts;
        for (const SceneConfig& scene : full_standard_suite()) {
            auto [frames, truth] = generate_scene(scene);
            const PipelineResult svm_res = run_pipeline(frames, run.svm, cfg);
            const PipelineResult cas_res = run_pipeline(frames, run.cascade, cfg);
            svm_counts += tally(svm_res.records, truth, eval_params, cfg.tracking.t_cof);
            cascade_counts += tally(cas_res.records, truth, eval_params, cfg.tracking.t_cof);
            run.svm_records.push_back(svm_res.records);
            run.truths.push_back(truth);
        }

        const MetricsReport svm_rep = make_report(svm_counts);
        const MetricsReport cas_rep = make_report(cascade_counts);
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "cascade R_det=%.4f R_fp=%.4f; svm R_det=%.4f R_fp=%.4f (%lld bicycles)",
                      cas_rep.r_det, cas_rep.r_fp, svm_rep.r_det, svm_rep.r_fp,
                      cas_rep.counts.truth_bicycles);
        c.detail = buf;
        c.expect(cas_rep.counts.truth_bicycles >= 40, "suite has fewer than 40 bicycles");
        c.expect(cas_rep.r_det >= 0.90, "cascade R_det below 0.90");
        c.expect(cas_rep.r_fp <= 0.10, "cascade R_fp above 0.10");
        c.expect(svm_rep.r_det >= 0.90, "svm R_det below 0.90");
        c.expect(svm_rep.r_fp <= 0.20, "svm R_fp above 0.20");
        run.ready = true;
    } catch (const std::exception& e) {
        c.expect(false, std::string("exception: ") + e.what());
    }
    c.finish(300.0);
}

// ---------------------------------------------------------------- C4
void criterion_sweep(const SuiteRun& run) {
    Criterion c(4, "T_COF sweep trend");
    if (!run.ready) {
        c.expect(false, "criterion 3 records unavailable");
        c.finish();
        return;
    }
    const std::vector<double> thresholds{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    const EvalParams eval_params;
    std::vector<MetricsReport> rows;
    for (double t : thresholds) {
        EvalCounts total;
        for (std::size_t i = 0; i < run.svm_records.size(); ++i)
            total += tally(run.svm_records[i], run.truths[i], eval_params, t);
        rows.push_back(make_report(total));
    }
    for (std::size_t i = 1; i < rows.size(); ++i) {
        c.expect(rows[i].r_det <= rows[i - 1].r_det + 1e-12, "R_det not non-increasing");
        c.expect(rows[i].r_rep <= rows[i - 1].r_rep + 1e-12, "R_rep not non-increasing");
    }
    c.expect(rows.back().r_rep <= 0.25 * rows.front().r_rep + 1e-12,
             "R_rep at 1.0 above 25% of R_rep at 0");
    char buf[120];
    std::snprintf(buf, sizeof buf, "R_det %.4f->%.4f, R_rep %.4f->%.4f", rows.front().r_det,
                  rows.back().r_det, rows.front().r_rep, rows.back().r_rep);
    if (c.detail.empty()) c.detail = buf;
    c.finish(10.0);
}

// ---------------------------------------------------------------- C5
void criterion_lifecycle() {
    Criterion c(5, "duplication suppression life cycle");
    try {
        PipelineConfig cfg;
        const int n_life = cfg.tracking.life_cycle;  // 15

        SceneConfig scene = lifecycle_probe_scene();
        SceneConfig no_actor = scene;
        no_actor.actors.clear();
        auto [frames, truth] = generate_scene(scene);
        auto [blank_frames, blank_truth] = generate_scene(no_actor);

        Fuser pass_all;  // track identity is what matters here
        const int blank_start = 120;

        auto records_with_gap = [&](int k) {
            std::vector<Frame> spliced = frames;
            for (int f = blank_start; f < blank_start + k; ++f) spliced[f] = blank_frames[f];
            return run_pipeline(spliced, pass_all, cfg).records;
        };

        const auto at_n = records_with_gap(n_life);
        const auto past_n = records_with_gap(n_life + 1);
        char buf[96];
        std::snprintf(buf, sizeof buf, "k=N -> %zu track(s), k=N+1 -> %zu track(s)", at_n.size(),
                      past_n.size());
        c.detail = buf;
        c.expect(at_n.size() == 1, "gap of N frames must keep one track");
        c.expect(past_n.size() == 2, "gap of N+1 frames must split the track");
        if (at_n.size() == 1) {  // the surviving track spans the whole actor life
            c.expect(at_n[0].first_frame <= 70, "single track starts late");
            c.expect(at_n[0].last_frame >= scene.length - 5, "single track ends early");
        }
        if (past_n.size() == 2) {
            c.expect(past_n[0].last_frame < blank_start + n_life + 1, "first split track too long");
            c.expect(past_n[1].first_frame >= blank_start + n_life, "second split track too early");
        }
    } catch (const std::exception& e) {
        c.expect(false, std::string("exception: ") + e.what());
    }
    c.finish(30.0);
}

// ---------------------------------------------------------------- C6
void criterion_realtime(const SuiteRun& run) {
    Criterion c(6, "real-time budget");
    if (!run.ready) {
        c.expect(false, "criterion 3 models unavailable");
        c.finish();
        return;
    }
    try {
        SceneConfig scene = standard_suite(Profile::sunny)[0];
        scene.length = 550;  // >= 500 frames at 352x288
        auto [frames, truth] = generate_scene(scene);
        PipelineConfig cfg;
        const PipelineResult svm_res = run_pipeline(frames, run.svm, cfg);
        const PipelineResult cas_res = run_pipeline(frames, run.cascade, cfg);
        MetricsReport svm_timing, cas_timing;
        attach_timing(svm_timing, svm_res.frame_ms);
        attach_timing(cas_timing, cas_res.frame_ms);
        char buf[120];
        std::snprintf(buf, sizeof buf,
                      "median svm %.2f ms (p95 %.2f), cascade %.2f ms (p95 %.2f) over %zu frames",
                      svm_timing.median_ms, svm_timing.p95_ms, cas_timing.median_ms,
                      cas_timing.p95_ms, frames.size());
        c.detail = buf;
        c.expect(frames.size() >= 500, "fewer than 500 frames");
        c.expect(svm_timing.median_ms <= 30.0, "svm path over 30 ms");
        c.expect(cas_timing.median_ms <= 30.0, "cascade path over 30 ms");
    } catch (const std::exception& e) {
        c.expect(false, std::string("exception: ") + e.what());
    }
    c.finish();
}

// ---------------------------------------------------------------- C7
void criterion_determinism([[maybe_unused]] const SuiteRun& run) {
    Criterion c(7, "determinism");
    try {
        // synth: fixed seed, byte-identical frames across runs
        const SceneConfig scene = standard_suite(Profile::foggy)[1];
        auto [f1, t1] = generate_scene(scene);
        auto [f2, t2] = generate_scene(scene);
        bool same = f1.size() == f2.size();
        for (std::size_t i = 0; same && i < f1.size(); ++i) same = f1[i] == f2[i];
        c.expect(same, "synth frames differ between runs");

#ifdef BIKEDET_CLI_PATH
        if (run.ready) {
            const fs::path dir = fs::temp_directory_path() / "bikedet_acceptance";
            fs::remove_all(dir);
            fs::create_directories(dir / "scene");
            SceneConfig small = standard_suite(Profile::sunny)[0];
            auto [frames, truth] = generate_scene(small);
            char name[32];
            for (const Frame& f : frames) {
                std::snprintf(name, sizeof name, "%06d.pgm", f.index);
                write_pgm(f, dir / "scene" / name);
            }
            const fs::path model = dir / "model.cascade.model";
            save_model(run.cascade, model);

            const std::string cli = BIKEDET_CLI_PATH;
            auto detect_once = [&](const fs::path& out) {
                const std::string cmd = "\"" + cli + "\" detect --in \"" + (dir / "scene").string() +
                                        "\" --model \"" + model.string() + "\" --out \"" +
                                        out.string() + "\" >/dev/null 2>&1";
                return std::system(cmd.c_str());
            };
            const fs::path out1 = dir / "run1.csv", out2 = dir / "run2.csv";
            const int r1 = detect_once(out1);
            const int r2 = detect_once(out2);
            c.expect(WEXITSTATUS(r1) == 0 && WEXITSTATUS(r2) == 0, "detect cli failed");
            c.expect(read_file_bytes(out1) == read_file_bytes(out2), "record csvs differ");
            c.expect(read_file_bytes(trails_path_for(out1)) == read_file_bytes(trails_path_for(out2)),
                     "trail csvs differ");
            fs::remove_all(dir);
        } else {
            c.expect(false, "criterion 3 models unavailable for detect run");
        }
#endif
    } catch (const std::exception& e) {
        c.expect(false, std::string("exception: ") + e.what());
    }
    c.finish();
}

}  // namespace

int main() {
    std::printf("bikedet acceptance suite\n");
    criterion_equations();
    criterion_oracles();
    SuiteRun run;
    criterion_detection(run);
    criterion_sweep(run);
    criterion_lifecycle();
    criterion_realtime(run);
    criterion_determinism(run);
    std::printf("%s (%d criterion(s) failed)\n", failures == 0 ? "ALL CRITERIA PASS" : "FAILURES",
                failures);
    return failures == 0 ? 0 : 1;
}
