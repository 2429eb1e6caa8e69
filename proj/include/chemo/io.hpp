#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "chemo/config.hpp"
#include "chemo/evolve.hpp"
#include "chemo/model.hpp"
#include "chemo/norms.hpp"

namespace chemo {

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Trajectory in CSV form. Column order is part of the tool contract;
/// floats are printed with 17 significant digits so identical runs
/// serialize to identical bytes.
inline std::string trajectory_csv(const Trajectory& tr) {
    std::string out = "t,mass,lq_norm,linf_norm,dt,min_u\n";
    for (const auto& s : tr.samples) {
        out += format_g17(s.t);
        out += ',';
        out += format_g17(s.mass);
        out += ',';
        out += format_g17(s.lq);
        out += ',';
        out += format_g17(s.linf);
        out += ',';
        out += format_g17(s.dt);
        out += ',';
        out += format_g17(s.min_u);
        out += '\n';
    }
    return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read file: " + path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return content;
}

inline nlohmann::json admissibility_json(const ExponentSet& e, const AdmissibilityReport& rep) {
    nlohmann::json j;
    j["exponents"] = {{"n", e.n}, {"gamma", e.gamma}, {"p", e.p}, {"q", e.q}, {"alpha", e.alpha}};
    j["accepted"] = rep.accepted;
    j["alpha_bound"] = rep.alpha_bound;
    j["violations"] = rep.violations;
    return j;
}

inline nlohmann::json summary_json(const RunConfig& cfg, const Trajectory& tr, double K) {
    nlohmann::json j;
    j["config_hash"] = config_hash(cfg);
    j["terminated_at"] = tr.terminated_at;
    j["blowup_reason"] = tr.blowup ? nlohmann::json(to_string(tr.blowup->reason))
                                   : nlohmann::json(nullptr);
    j["blowup_time"] = tr.blowup ? nlohmann::json(tr.blowup->t) : nlohmann::json(nullptr);
    j["max_mass"] = tr.max_mass;
    j["max_lq"] = tr.max_lq;
    j["max_linf"] = tr.max_linf;
    j["K"] = K;
    j["steps_accepted"] = tr.steps_accepted;
    j["steps_rejected"] = tr.steps_rejected;
    return j;
}

enum class LogLevel { quiet = 0, info = 1, debug = 2 };

inline LogLevel log_level() {
    static LogLevel lvl = [] {
        const char* env = std::getenv("CHEMO_SIM_LOG");
        if (!env) return LogLevel::info;
        const std::string v(env);
        if (v == "quiet") return LogLevel::quiet;
        if (v == "debug") return LogLevel::debug;
        return LogLevel::info;
    }();
    return lvl;
}

inline void log_line(LogLevel at, const std::string& msg) {
    if (static_cast<int>(log_level()) >= static_cast<int>(at))
        std::fprintf(stderr, "%s\n", msg.c_str());
}

}  // namespace chemo
