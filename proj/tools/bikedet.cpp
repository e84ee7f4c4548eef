#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

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
#include "bikedet/y4m.hpp"

namespace fs = std::filesystem;
using namespace bikedet;

namespace {

struct CommonOpts {
    std::string config_path;
    std::optional<double> tcof;
    std::optional<int> life_cycle;

    PipelineConfig load() const {
        PipelineConfig cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        if (tcof) cfg.tracking.t_cof = *tcof;
        if (life_cycle) cfg.tracking.life_cycle = *life_cycle;
        cfg.validate();
        return cfg;
    }
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "pipeline config file (TOML-style sections)");
    cmd->add_option("--tcof", opts.tcof, "confidence acceptance threshold, overrides config");
    cmd->add_option("--life-cycle", opts.life_cycle, "track life cycle N, overrides config");
}

std::pair<std::vector<Frame>, StreamMeta> load_stream(const std::string& in) {
    if (fs::path(in).extension() == ".y4m") return load_y4m(in);
    return load_pgm_sequence(in);
}

void write_scene(const SceneConfig& cfg, const fs::path& out_root) {
    const fs::path dir = out_root / cfg.name;
    fs::create_directories(dir);
    auto [frames, truth] = generate_scene(cfg);
    char name[32];
    for (const Frame& f : frames) {
        std::snprintf(name, sizeof name, "%06d.pgm", f.index);
        write_pgm(f, dir / name);
    }
    std::ofstream rate(dir / "rate.txt");
    rate << "25/1\n";
    write_truth_csv(truth, dir / "truth.csv");
    std::cout << cfg.name << ": " << frames.size() << " frames, " << cfg.actors.size()
              << " actors -> " << dir.string() << "\n";
}

int cmd_synth(const std::string& profile, const std::string& out, int scene_index) {
    std::vector<SceneConfig> scenes;
    if (profile == "suite") scenes = full_standard_suite();
    else if (profile == "training") scenes = training_suite();
    else scenes = standard_suite(profile_from_string(profile));
    if (scene_index >= 0) {
        if (scene_index >= static_cast<int>(scenes.size()))
            throw ConfigError("scene index out of range for profile " + profile);
        scenes = {scenes[scene_index]};
    }
    for (const SceneConfig& cfg : scenes) write_scene(cfg, out);
    return 0;
}

// Labels each observation against the truth boxes of its frame.
int cmd_features(const std::string& in, const std::string& truth_path, const std::string& out,
                 const CommonOpts& opts) {
    const PipelineConfig cfg = opts.load();
    auto [frames, meta] = load_stream(in);
    const GroundTruth truth = load_truth_csv(truth_path);
    const std::vector<FeatureRow> rows = dump_labeled_features(frames, truth, cfg);
    write_features_csv(rows, out);
    std::cout << rows.size() << " feature rows -> " << out << "\n";
    return 0;
}

int cmd_train(const std::string& method, const std::string& corpus, const std::string& out,
              const CommonOpts& opts) {
    const PipelineConfig cfg = opts.load();
    const std::vector<FeatureRow> rows = load_features_csv(corpus);
    const Fuser fuser = train_fuser(rows, method, cfg);
    for (const std::string& warning : fuser.svm_full.dropped)
        std::cerr << "warning: " << warning << "\n";
    save_model(fuser, out);
    std::cout << "trained " << method << " on " << rows.size() << " rows -> " << out << "\n";
    return 0;
}

int cmd_detect(const std::string& in, const std::string& model_path, const std::string& out,
               const std::string& masks_dir, const CommonOpts& opts) {
    const PipelineConfig cfg = opts.load();
    const Fuser fuser = load_model(model_path);
    auto [frames, meta] = load_stream(in);

    PipelineHooks hooks;
    if (!masks_dir.empty()) {
        fs::create_directories(masks_dir);
        hooks.on_mask = [&](int frame, const ForegroundMask& mask) {
            char name[32];
            std::snprintf(name, sizeof name, "%06d.pgm", frame);
            write_mask_pgm(mask, fs::path(masks_dir) / name);
        };
    }

    const PipelineResult result = run_pipeline(frames, fuser, cfg, hooks);
    write_records_csv(result.records, out);
    std::cout << result.records.size() << " records -> " << out << "\n";
    return 0;
}

int cmd_eval(const std::vector<std::string>& records_paths,
             const std::vector<std::string>& truth_paths, bool sweep, const std::string& out,
             const CommonOpts& opts) {
    if (records_paths.size() != truth_paths.size())
        throw ConfigError("eval: need one --truth per --records, in order");
    const PipelineConfig cfg = opts.load();
    const EvalParams params{cfg.eval_overlap_min, cfg.eval_min_temporal};

    std::vector<std::pair<std::vector<DetectionRecord>, GroundTruth>> scenes;
    for (std::size_t i = 0; i < records_paths.size(); ++i)
        scenes.emplace_back(load_records_csv(records_paths[i]), load_truth_csv(truth_paths[i]));

    if (sweep) {
        const std::vector<double> thresholds = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
        std::ostream* os = &std::cout;
        std::ofstream file;
        if (!out.empty()) {
            file.open(out);
            if (!file) throw Error("cannot open " + out + " for writing");
            os = &file;
        }
        *os << "t_cof,R_det,R_fp,R_rep,covered,fp_records,covering_records,truth_bicycles\n";
        char buf[160];
        for (double t : thresholds) {
            EvalCounts total;
            for (const auto& [records, truth] : scenes) total += tally(records, truth, params, t);
            const MetricsReport r = make_report(total);
            std::snprintf(buf, sizeof buf, "%.1f,%.6f,%.6f,%.6f,%lld,%lld,%lld,%lld\n", t, r.r_det,
                          r.r_fp, r.r_rep, r.counts.covered_bicycles, r.counts.fp_records,
                          r.counts.covering_records, r.counts.truth_bicycles);
            *os << buf;
        }
        return 0;
    }

    EvalCounts total;
    for (const auto& [records, truth] : scenes)
        total += tally(records, truth, params, cfg.tracking.t_cof);
    const MetricsReport r = make_report(total);
    std::printf("t_cof         %.2f\n", cfg.tracking.t_cof);
    std::printf("R_det         %.4f  (%lld/%lld)\n", r.r_det, r.counts.covered_bicycles,
                r.counts.truth_bicycles);
    std::printf("R_fp          %.4f  (%lld/%lld)\n", r.r_fp, r.counts.fp_records,
                r.counts.truth_bicycles);
    std::printf("R_rep         %.4f  (%lld/%lld)\n", r.r_rep, r.counts.covering_records,
                r.counts.truth_bicycles);
    std::printf("missing_rate  %.4f\n", r.missing_rate);
    return 0;
}

int cmd_bench(const std::string& in, const std::string& model_path, const CommonOpts& opts) {
    const PipelineConfig cfg = opts.load();
    const Fuser fuser = load_model(model_path);
    auto [frames, meta] = load_stream(in);  // preloaded: timing below excludes I/O
    const PipelineResult result = run_pipeline(frames, fuser, cfg);
    MetricsReport timing;
    attach_timing(timing, result.frame_ms);
    std::printf("frames        %zu (%dx%d)\n", frames.size(), meta.width, meta.height);
    std::printf("records       %zu\n", result.records.size());
    std::printf("median ms     %.3f\n", timing.median_ms);
    std::printf("p95 ms        %.3f\n", timing.p95_ms);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bicycle detection pipeline for low-resolution traffic video"};
    app.require_subcommand(1);

    std::string profile = "suite", out_dir = "scenes";
    int scene_index = -1;
    CLI::App* synth = app.add_subcommand("synth", "render synthetic scenes with ground truth");
    synth->add_option("--profile", profile, "sunny|foggy|rainy|training|suite")->required();
    synth->add_option("--out", out_dir, "output directory")->required();
    synth->add_option("--scene", scene_index, "render only this scene index of the profile");

    CommonOpts feat_opts;
    std::string feat_in, feat_truth, feat_out;
    CLI::App* features = app.add_subcommand("features", "dump labeled feature rows for training");
    features->add_option("--in", feat_in, "scene directory or .y4m stream")->required();
    features->add_option("--truth", feat_truth, "ground-truth csv")->required();
    features->add_option("--out", feat_out, "output feature csv")->required();
    add_common(features, feat_opts);

    CommonOpts train_opts;
    std::string train_method, train_corpus, train_out;
    CLI::App* train = app.add_subcommand("train", "train a single-frame fuser");
    train->add_option("--method", train_method, "svm|cascade")->required();
    train->add_option("--corpus", train_corpus, "labeled feature csv")->required();
    train->add_option("--out", train_out, "output model file")->required();
    add_common(train, train_opts);

    CommonOpts detect_opts;
    std::string det_in, det_model, det_out, det_masks;
    CLI::App* detect = app.add_subcommand("detect", "run the detection pipeline");
    detect->add_option("--in", det_in, "scene directory or .y4m stream")->required();
    detect->add_option("--model", det_model, "trained model file")->required();
    detect->add_option("--out", det_out, "output records csv")->required();
    detect->add_option("--masks", det_masks, "also write cleaned masks to this directory");
    add_common(detect, detect_opts);

    CommonOpts eval_opts;
    std::vector<std::string> eval_records, eval_truths;
    std::string eval_out;
    bool eval_sweep = false;
    CLI::App* eval = app.add_subcommand("eval", "score records against ground truth");
    eval->add_option("--records", eval_records, "records csv (repeatable)")->required();
    eval->add_option("--truth", eval_truths, "ground-truth csv (repeatable, paired in order)")
        ->required();
    eval->add_flag("--sweep", eval_sweep, "sweep t_cof over 0,0.2,...,1.0");
    eval->add_option("--out", eval_out, "write sweep csv here instead of stdout");
    add_common(eval, eval_opts);

    CommonOpts bench_opts;
    std::string bench_in, bench_model;
    CLI::App* bench = app.add_subcommand("bench", "per-frame timing over a preloaded stream");
    bench->add_option("--in", bench_in, "scene directory or .y4m stream")->required();
    bench->add_option("--model", bench_model, "trained model file")->required();
    add_common(bench, bench_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (synth->parsed()) return cmd_synth(profile, out_dir, scene_index);
        if (features->parsed()) return cmd_features(feat_in, feat_truth, feat_out, feat_opts);
        if (train->parsed()) return cmd_train(train_method, train_corpus, train_out, train_opts);
        if (detect->parsed()) return cmd_detect(det_in, det_model, det_out, det_masks, detect_opts);
        if (eval->parsed()) return cmd_eval(eval_records, eval_truths, eval_sweep, eval_out, eval_opts);
        if (bench->parsed()) return cmd_bench(bench_in, bench_model, bench_opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
