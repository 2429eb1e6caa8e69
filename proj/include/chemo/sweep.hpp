#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "chemo/config.hpp"
#include "chemo/evolve.hpp"
#include "chemo/io.hpp"

namespace chemo {

/// Outcome record for one executed run, as stored in the sweep registry.
struct RunRecord {
    std::string config_hash;
    std::string outcome;  // completed | blowup | skipped_inadmissible | error:<what>
    std::map<std::string, double> params;
    double terminated_at = 0.0;
    double max_mass = 0.0;
    double max_lq = 0.0;
    double max_linf = 0.0;
    double K = 0.0;
    double wall_time_s = 0.0;
    std::string dir;  // run directory relative to the sweep root, empty if skipped
};

inline nlohmann::json to_json(const RunRecord& r) {
    nlohmann::json j;
    j["config_hash"] = r.config_hash;
    j["outcome"] = r.outcome;
    j["params"] = r.params;
    j["terminated_at"] = r.terminated_at;
    j["max_mass"] = r.max_mass;
    j["max_lq"] = r.max_lq;
    j["max_linf"] = r.max_linf;
    j["K"] = r.K;
    j["wall_time_s"] = r.wall_time_s;
    j["dir"] = r.dir;
    return j;
}

/**
 * Runs one configuration and, when outdir is nonempty, writes
 * outdir/trajectory.csv and outdir/summary.json. Inadmissible parameters
 * surface as InadmissibleError unless the config forces the run.
 */
inline RunRecord execute_run(const RunConfig& cfg, const std::string& outdir) {
    RunRecord rec;
    rec.config_hash = config_hash(cfg);
    const auto start = std::chrono::steady_clock::now();
    Simulator sim(cfg);
    Trajectory tr = sim.run();
    rec.outcome = tr.blowup ? "blowup" : "completed";
    rec.terminated_at = tr.terminated_at;
    rec.max_mass = tr.max_mass;
    rec.max_lq = tr.max_lq;
    rec.max_linf = tr.max_linf;
    rec.K = sim.mass_bound_K();
    if (!outdir.empty()) {
        std::filesystem::create_directories(outdir);
        write_text_file(outdir + "/trajectory.csv", trajectory_csv(tr));
        write_text_file(outdir + "/summary.json",
                        summary_json(cfg, tr, sim.mass_bound_K()).dump(2) + "\n");
    }
    rec.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

struct SweepAxis {
    std::string name;  // gamma | p | q | alpha | mu1 | u0_amplitude
    std::vector<double> values;
};

struct SweepSpec {
    RunConfig base;
    std::vector<SweepAxis> axes;

    std::size_t points() const {
        std::size_t n = 1;
        for (const auto& a : axes) n *= a.values.size();
        return n;
    }
};

namespace detail {

inline std::vector<double> parse_axis_values(const ConfigEntry& e) {
    std::vector<double> vals;
    const std::string& v = e.value;
    if (v.find(':') != std::string::npos) {
        // linspace form start:stop:count, inclusive at both ends
        const std::size_t c1 = v.find(':');
        const std::size_t c2 = v.find(':', c1 + 1);
        if (c2 == std::string::npos)
            throw ConfigError(e.line, "axis range needs start:stop:count, got '" + v + "'");
        ConfigEntry tmp = e;
        tmp.value = trim(v.substr(0, c1));
        const double start = parse_double(tmp);
        tmp.value = trim(v.substr(c1 + 1, c2 - c1 - 1));
        const double stop = parse_double(tmp);
        tmp.value = trim(v.substr(c2 + 1));
        const long count = parse_long(tmp);
        if (count < 1) throw ConfigError(e.line, "axis count must be >= 1");
        for (long i = 0; i < count; ++i)
            vals.push_back(count == 1 ? start
                                      : start + (stop - start) * static_cast<double>(i) /
                                                    static_cast<double>(count - 1));
        return vals;
    }
    std::size_t pos = 0;
    while (pos < v.size()) {
        std::size_t comma = v.find(',', pos);
        if (comma == std::string::npos) comma = v.size();
        ConfigEntry tmp = e;
        tmp.value = trim(v.substr(pos, comma - pos));
        if (tmp.value.empty()) throw ConfigError(e.line, "empty entry in axis value list");
        vals.push_back(parse_double(tmp));
        pos = comma + 1;
    }
    if (vals.empty()) throw ConfigError(e.line, "axis needs at least one value");
    return vals;
}

inline void apply_axis(RunConfig& cfg, const std::string& name, double value) {
    if (name == "gamma") cfg.exponents.gamma = value;
    else if (name == "p") cfg.exponents.p = value;
    else if (name == "q") cfg.exponents.q = value;
    else if (name == "alpha") cfg.exponents.alpha = value;
    else if (name == "mu1") cfg.mu1 = value;
    else if (name == "u0_amplitude") cfg.u0.amplitude = value;
    else throw std::invalid_argument("unknown sweep axis '" + name + "'");
}

}  // namespace detail

inline constexpr std::size_t sweep_point_limit = 10000;

/// Parses a sweep file: ordinary run keys plus any of
/// sweep_gamma / sweep_p / sweep_q / sweep_alpha / sweep_mu1 /
/// sweep_u0_amplitude, each a comma list or start:stop:count range.
inline SweepSpec parse_sweep_entries(const std::vector<ConfigEntry>& entries) {
    SweepSpec spec;
    spec.base = RunConfig::from_entries(entries, /*ignore_sweep_keys=*/true);
    static const char* axis_names[] = {"gamma", "p", "q", "alpha", "mu1", "u0_amplitude"};
    for (const auto& e : entries) {
        if (e.key.rfind("sweep_", 0) != 0) continue;
        const std::string name = e.key.substr(6);
        bool known = false;
        for (const char* a : axis_names) known = known || (name == a);
        if (!known)
            throw ConfigError(e.line, "unknown sweep axis '" + e.key +
                                          "' (allowed: gamma, p, q, alpha, mu1, u0_amplitude)");
        spec.axes.push_back({name, detail::parse_axis_values(e)});
    }
    if (spec.axes.empty()) throw ConfigError(0, "sweep file declares no sweep_* axes");
    if (spec.points() > sweep_point_limit)
        throw ConfigError(0, "sweep has " + std::to_string(spec.points()) +
                                 " points, limit is " + std::to_string(sweep_point_limit));
    return spec;
}

inline SweepSpec parse_sweep_file(const std::string& path) {
    return parse_sweep_entries(parse_kv_file(path));
}

/**
 * Executes the Cartesian product of the axes with a small worker pool.
 * Duplicate parameter tuples (identical config hashes) execute once; later
 * occurrences are dropped with a warning. Inadmissible tuples are recorded
 * as skipped rather than failing the sweep. Returns the registry records in
 * deterministic (enumeration) order.
 */
inline std::vector<RunRecord> run_sweep(const SweepSpec& spec, const std::string& outdir,
                                        int jobs = 1) {
    if (jobs < 1) throw std::invalid_argument("run_sweep: jobs must be >= 1");
    const std::size_t total = spec.points();

    // Enumerate tuples and deduplicate by config hash up front.
    std::vector<RunConfig> configs;
    std::vector<std::map<std::string, double>> params;
    std::set<std::string> seen;
    for (std::size_t flat = 0; flat < total; ++flat) {
        RunConfig cfg = spec.base;
        std::map<std::string, double> pt;
        std::size_t rem = flat;
        for (std::size_t a = spec.axes.size(); a-- > 0;) {
            const auto& ax = spec.axes[a];
            const std::size_t i = rem % ax.values.size();
            rem /= ax.values.size();
            detail::apply_axis(cfg, ax.name, ax.values[i]);
            pt[ax.name] = ax.values[i];
        }
        const std::string h = config_hash(cfg);
        if (!seen.insert(h).second) {
            log_line(LogLevel::info, "sweep: duplicate tuple " + h + " skipped");
            continue;
        }
        configs.push_back(std::move(cfg));
        params.push_back(std::move(pt));
    }

    std::vector<RunRecord> records(configs.size());
    std::atomic<std::size_t> cursor{0};
    std::mutex log_mutex;
    auto worker = [&] {
        while (true) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= configs.size()) return;
            const RunConfig& cfg = configs[i];
            RunRecord rec;
            rec.params = params[i];
            rec.config_hash = config_hash(cfg);
            const std::string dir = "runs/" + rec.config_hash;
            try {
                rec = execute_run(cfg, outdir.empty() ? "" : outdir + "/" + dir);
                rec.params = params[i];
                rec.dir = dir;
            } catch (const InadmissibleError&) {
                rec.outcome = "skipped_inadmissible";
            } catch (const std::domain_error&) {
                // structure-condition or sign violations are parameter
                // problems, not runtime failures
                rec.outcome = "skipped_inadmissible";
            } catch (const std::exception& e) {
                rec.outcome = std::string("error: ") + e.what();
            }
            records[i] = rec;
            {
                std::lock_guard<std::mutex> lock(log_mutex);
                log_line(LogLevel::info, "sweep: [" + std::to_string(i + 1) + "/" +
                                             std::to_string(configs.size()) + "] " +
                                             rec.config_hash + " " + rec.outcome);
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return records;
}

inline nlohmann::json registry_json(const SweepSpec& spec, const std::vector<RunRecord>& records) {
    nlohmann::json j;
    j["points_declared"] = spec.points();
    j["points_executed"] = records.size();
    nlohmann::json axes = nlohmann::json::array();
    for (const auto& a : spec.axes) axes.push_back({{"name", a.name}, {"values", a.values}});
    j["axes"] = axes;
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& r : records) recs.push_back(to_json(r));
    j["records"] = recs;
    return j;
}

}  // namespace chemo
