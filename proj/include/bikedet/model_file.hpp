#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bikedet/cascade.hpp"
#include "bikedet/errors.hpp"
#include "bikedet/svm.hpp"

namespace bikedet {

// The single-frame decision source selected per run: either the pair
// of linear SVMs (full layout + speed-free first-frame layout) or the
// cascade.
struct Fuser {
    enum class Kind { svm, cascade };
    Kind kind = Kind::cascade;
    SvmModel svm_full;
    SvmModel svm_first;
    Cascade cascade;

    Decision preliminary(const FeatureVector& fv) const {
        if (kind == Kind::cascade) return cascade_decide(cascade, fv).first;
        const SvmModel& m = fv.speed ? svm_full : svm_first;
        return svm_decide(svm_score(m, fv));
    }
};

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& tok) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str()) throw ParseError("bad number in model file: " + tok, 0);
    return v;
}

inline void write_svm_section(std::ostream& out, const char* name, const SvmModel& m) {
    out << "section " << name << '\n';
    out << "layout";
    for (FeatureId id : m.layout) out << ' ' << feature_name(id);
    out << '\n';
    auto write_row = [&](const char* key, const std::vector<double>& vs) {
        out << key;
        for (double v : vs) out << ' ' << fmt_double(v);
        out << '\n';
    };
    write_row("mean", m.mean);
    write_row("stddev", m.stddev);
    write_row("w", m.w);
    out << "b " << fmt_double(m.b) << '\n';
    for (const std::string& d : m.dropped) out << "warning " << d << '\n';
}

}  // namespace detail

// Versioned plain-text key-value format, human-diffable.
inline void save_model(const Fuser& fuser, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << "bikedet-model v1\n";
    if (fuser.kind == Fuser::Kind::svm) {
        out << "type svm\n";
        detail::write_svm_section(out, "full", fuser.svm_full);
        detail::write_svm_section(out, "first_frame", fuser.svm_first);
    } else {
        out << "type cascade\n";
        for (const CascadeStage& s : fuser.cascade.stages)
            out << "stage " << feature_name(s.feature) << ' ' << detail::fmt_double(s.lo) << ' '
                << detail::fmt_double(s.hi) << '\n';
    }
    out << "end\n";
    if (!out) throw Error("short write to " + path.string());
}

inline Fuser load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model file " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "bikedet-model v1")
        throw ParseError(path.string() + ": not a bikedet model file", 0);
    if (!std::getline(in, line)) throw ParseError(path.string() + ": missing type line", 0);

    Fuser fuser;
    if (line == "type cascade") {
        fuser.kind = Fuser::Kind::cascade;
        while (std::getline(in, line)) {
            if (line == "end") break;
            if (line.empty()) continue;
            std::istringstream ss(line);
            std::string key, feat, lo, hi;
            ss >> key >> feat >> lo >> hi;
            if (key != "stage" || feat.empty() || lo.empty() || hi.empty())
                throw ParseError(path.string() + ": bad cascade line: " + line, 0);
            fuser.cascade.stages.push_back(CascadeStage{
                feature_from_name(feat), detail::parse_double(lo), detail::parse_double(hi)});
        }
        validate_cascade(fuser.cascade);
        return fuser;
    }
    if (line != "type svm") throw ParseError(path.string() + ": unknown model type: " + line, 0);

    fuser.kind = Fuser::Kind::svm;
    SvmModel* current = nullptr;
    while (std::getline(in, line)) {
        if (line == "end") break;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "section") {
            std::string name;
            ss >> name;
            if (name == "full") current = &fuser.svm_full;
            else if (name == "first_frame") current = &fuser.svm_first;
            else throw ParseError(path.string() + ": unknown section " + name, 0);
        } else if (current == nullptr) {
            throw ParseError(path.string() + ": data before section header", 0);
        } else if (key == "layout") {
            std::string name;
            while (ss >> name) current->layout.push_back(feature_from_name(name));
        } else if (key == "mean" || key == "stddev" || key == "w") {
            std::vector<double>& dst = key == "mean"   ? current->mean
                                       : key == "stddev" ? current->stddev
                                                         : current->w;
            std::string tok;
            while (ss >> tok) dst.push_back(detail::parse_double(tok));
        } else if (key == "b") {
            std::string tok;
            ss >> tok;
            current->b = detail::parse_double(tok);
        } else if (key == "warning") {
            std::string rest;
            std::getline(ss, rest);
            if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
            current->dropped.push_back(rest);
        } else {
            throw ParseError(path.string() + ": unknown model key " + key, 0);
        }
    }
    for (const SvmModel* m : {&fuser.svm_full, &fuser.svm_first}) {
        if (m->w.size() != m->layout.size() || m->mean.size() != m->layout.size() ||
            m->stddev.size() != m->layout.size())
            throw ParseError(path.string() + ": inconsistent svm section sizes", 0);
        for (double s : m->stddev)
            if (!(s > 0.0)) throw ParseError(path.string() + ": non-positive stddev", 0);
    }
    return fuser;
}

}  // namespace bikedet
