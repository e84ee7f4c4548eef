#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "bikedet/errors.hpp"
#include "bikedet/features.hpp"
#include "bikedet/model_file.hpp"
#include "bikedet/pipeline.hpp"
#include "bikedet/scene.hpp"

namespace bikedet {

inline const char* to_string(Decision d) {
    return d == Decision::bicycle ? "bicycle" : "not_bicycle";
}

inline std::filesystem::path trails_path_for(const std::filesystem::path& records_path) {
    std::filesystem::path p = records_path;
    p += ".trails.csv";
    return p;
}

// Terminal per-track records; the bbox trail goes to a sidecar file
// referenced by track_id (eval needs it for IoU against ground truth).
inline void write_records_csv(const std::vector<DetectionRecord>& records,
                              const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << "track_id,first_frame,last_frame,M,M_b,decision,COF\n";
    char cof[32];
    for (const DetectionRecord& r : records) {
        std::snprintf(cof, sizeof cof, "%.6f", r.cof);
        out << r.track_id << ',' << r.first_frame << ',' << r.last_frame << ',' << r.m << ','
            << r.m_b << ',' << to_string(r.decision) << ',' << cof << '\n';
    }
    if (!out) throw Error("short write to " + path.string());

    std::ofstream trails(trails_path_for(path));
    if (!trails) throw Error("cannot open trail sidecar for " + path.string());
    trails << "track_id,frame,x,y,w,h\n";
    for (const DetectionRecord& r : records)
        for (const auto& [frame, box] : r.trail)
            trails << r.track_id << ',' << frame << ',' << box.x << ',' << box.y << ','
                   << box.width << ',' << box.height << '\n';
    if (!trails) throw Error("short write to trail sidecar for " + path.string());
}

inline std::vector<DetectionRecord> load_records_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::vector<DetectionRecord> records;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        DetectionRecord r;
        char decision[32] = {0};
        double cof = 0.0;
        if (std::sscanf(line.c_str(), "%d,%d,%d,%d,%d,%31[^,],%lf", &r.track_id, &r.first_frame,
                        &r.last_frame, &r.m, &r.m_b, decision, &cof) != 7)
            throw ParseError("bad record row: " + line, 0);
        const std::string d = decision;
        if (d == "bicycle") r.decision = Decision::bicycle;
        else if (d == "not_bicycle") r.decision = Decision::not_bicycle;
        else throw ParseError("bad decision in record row: " + line, 0);
        r.cof = cof;
        records.push_back(r);
    }

    const std::filesystem::path trails = trails_path_for(path);
    if (std::filesystem::exists(trails)) {
        std::map<int, DetectionRecord*> by_id;
        for (DetectionRecord& r : records) by_id[r.track_id] = &r;
        std::ifstream tin(trails);
        std::getline(tin, line);  // header
        while (std::getline(tin, line)) {
            if (line.empty()) continue;
            int id = 0, frame = 0;
            Box box;
            if (std::sscanf(line.c_str(), "%d,%d,%d,%d,%d,%d", &id, &frame, &box.x, &box.y,
                            &box.width, &box.height) != 6)
                throw ParseError("bad trail row: " + line, 0);
            const auto it = by_id.find(id);
            if (it != by_id.end()) it->second->trail.emplace_back(frame, box);
        }
    }
    return records;
}

// One labeled observation for classifier training. speed is NaN when
// the observation was a track's first frame.
struct FeatureRow {
    int track_id = 0;
    int frame = 0;
    FeatureVector fv;
    std::string label;  // actor class name, or "background"
};

inline void write_features_csv(const std::vector<FeatureRow>& rows,
                               const std::filesystem::path& path, bool append = false) {
    const bool fresh = !append || !std::filesystem::exists(path);
    std::ofstream out(path, append ? std::ios::app : std::ios::out);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    if (fresh)
        out << "track_id,frame,fg_count,width,height,aspect_ratio,r_f,r_f_upper,r_f_lower,speed,label\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const FeatureRow& r : rows) {
        out << r.track_id << ',' << r.frame << ',' << r.fv.fg_count << ',' << r.fv.width << ','
            << r.fv.height << ',' << num(r.fv.aspect_ratio) << ',' << num(r.fv.r_f) << ','
            << num(r.fv.r_f_upper) << ',' << num(r.fv.r_f_lower) << ','
            << (r.fv.speed ? num(*r.fv.speed) : std::string()) << ',' << r.label << '\n';
    }
    if (!out) throw Error("short write to " + path.string());
}

inline std::vector<FeatureRow> load_features_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::vector<FeatureRow> rows;
    std::string line;
    std::getline(in, line);  // header
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        FeatureRow r;
        // speed field may be empty, so split on commas instead of sscanf
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            cells.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (cells.size() != 11) throw ParseError("bad feature row at line " + std::to_string(lineno), 0);
        try {
            r.track_id = std::stoi(cells[0]);
            r.frame = std::stoi(cells[1]);
            r.fv.fg_count = std::stoll(cells[2]);
            r.fv.width = std::stoi(cells[3]);
            r.fv.height = std::stoi(cells[4]);
            r.fv.aspect_ratio = std::stod(cells[5]);
            r.fv.r_f = std::stod(cells[6]);
            r.fv.r_f_upper = std::stod(cells[7]);
            r.fv.r_f_lower = std::stod(cells[8]);
            if (!cells[9].empty()) r.fv.speed = std::stod(cells[9]);
            r.label = cells[10];
        } catch (const std::exception&) {
            throw ParseError("bad feature row at line " + std::to_string(lineno), 0);
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

// Splits labeled rows into the training classes. The 8-feature layout
// keeps speed with NaN for first-frame rows (train_svm skips those);
// callers wanting the speed-free layout drop the last column.
inline TrainingSet training_set_from_rows(const std::vector<FeatureRow>& rows,
                                          const FeatureLayout& layout) {
    TrainingSet set;
    set.layout = layout;
    for (const FeatureRow& r : rows) {
        std::vector<double> x;
        x.reserve(layout.size());
        for (FeatureId id : layout) {
            if (id == FeatureId::speed && !r.fv.speed)
                x.push_back(std::numeric_limits<double>::quiet_NaN());
            else
                x.push_back(feature_value(r.fv, id));
        }
        if (r.label == "bicycle") set.positives.push_back(std::move(x));
        else set.negatives.push_back(std::move(x));
    }
    return set;
}

}  // namespace bikedet
