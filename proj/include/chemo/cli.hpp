#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chemo/config.hpp"
#include "chemo/evolve.hpp"
#include "chemo/io.hpp"
#include "chemo/model.hpp"
#include "chemo/norms.hpp"
#include "chemo/sweep.hpp"
#include "chemo/verify.hpp"

namespace chemo {

// Exit codes shared by all subcommands.
inline constexpr int exit_ok = 0;
inline constexpr int exit_verification_failure = 1;
inline constexpr int exit_inadmissible = 2;
inline constexpr int exit_input_error = 3;

namespace cli_detail {

/// Full parameter report for check-params: admissibility, sampled
/// coefficient validity, mass bound, and the derived quantities.
inline nlohmann::json parameter_report(const RunConfig& cfg) {
    nlohmann::json j;
    const AdmissibilityReport rep = validate_exponents(cfg.exponents);
    j["admissibility"] = admissibility_json(cfg.exponents, rep);

    CoefficientField field;
    std::vector<double> weights;
    std::vector<double> u0;
    if (cfg.mode == GridMode::radial) {
        RadialGrid g = RadialGrid::make(cfg.exponents.n, cfg.R, cfg.cells);
        field = sample_coefficients(cfg.coefficient_spec(), g, cfg.exponents.alpha);
        u0 = sample_u0(cfg, g);
        weights = g.weights;
    } else {
        PolarGrid g = PolarGrid::make(cfg.R, cfg.cells, cfg.cells_theta);
        field = sample_coefficients(cfg.coefficient_spec(), g, cfg.exponents.alpha);
        u0 = sample_u0(cfg, g);
        weights = g.weights;
    }
    j["coefficients"] = {{"valid", field.valid()},
                         {"negative_nodes", field.negative_nodes},
                         {"lower_bound_violations", field.lower_bound_violations},
                         {"kappa_sup", field.kappa_sup()}};
    j["mass_bound_K"] = mass_bound(u0, weights, field);

    const auto& e = cfg.exponents;
    if (e.p > e.gamma + 1.0 && e.alpha > 0.0 && e.q > 0.0 && e.gamma > 0.0) {
        auto wi = norms::weight_integral(e.alpha, e.q, e.gamma, e.p, cfg.R);
        j["weight_integral"] = {{"finite", wi.finite},
                                {"beta", wi.beta},
                                {"value", wi.finite ? nlohmann::json(wi.value)
                                                    : nlohmann::json(nullptr)},
                                {"diagnostic", wi.diagnostic}};
    } else {
        j["weight_integral"] = {{"finite", false},
                                {"diagnostic", "not evaluated: requires p > gamma + 1, "
                                               "alpha > 0, q > 0, gamma > 0"}};
    }
    if (e.gamma > 1.0 && e.q > 0.0) {
        auto qs = norms::qstar(e.n, e.gamma, e.q);
        j["qstar"] = {{"defined", qs.defined},
                      {"value", qs.defined ? nlohmann::json(qs.value) : nlohmann::json(nullptr)},
                      {"diagnostic", qs.diagnostic}};
    } else {
        j["qstar"] = {{"defined", false}, {"diagnostic", "not evaluated: requires gamma > 1"}};
    }
    j["admissible"] = rep.accepted && field.valid();
    return j;
}

inline int run_check_params(const std::string& config_path) {
    const RunConfig cfg = RunConfig::parse_file(config_path);
    nlohmann::json j;
    try {
        j = parameter_report(cfg);
    } catch (const std::domain_error& e) {
        // e.g. a negative initial profile: report and classify as inadmissible
        std::fprintf(stdout, "{\n  \"admissible\": false,\n  \"error\": \"%s\"\n}\n", e.what());
        return exit_inadmissible;
    }
    std::fprintf(stdout, "%s\n", j.dump(2).c_str());
    return j["admissible"].get<bool>() ? exit_ok : exit_inadmissible;
}

inline int run_simulate(const std::string& config_path, const std::string& out_dir, bool force) {
    RunConfig cfg = RunConfig::parse_file(config_path);
    if (force) cfg.force_inadmissible = true;
    log_line(LogLevel::info, "simulate: config " + config_hash(cfg));
    RunRecord rec = execute_run(cfg, out_dir);
    log_line(LogLevel::info, "simulate: outcome " + rec.outcome + " at t = " +
                                 format_g17(rec.terminated_at));
    const std::string summary = read_text_file(out_dir + "/summary.json");
    std::fprintf(stdout, "%s", summary.c_str());
    return exit_ok;
}

inline int run_sweep_cmd(const std::string& config_path, const std::string& out_dir, int jobs) {
    const SweepSpec spec = parse_sweep_file(config_path);
    log_line(LogLevel::info,
             "sweep: " + std::to_string(spec.points()) + " declared points, jobs=" +
                 std::to_string(jobs));
    std::filesystem::create_directories(out_dir);
    const std::vector<RunRecord> records = run_sweep(spec, out_dir, jobs);
    write_text_file(out_dir + "/registry.json", registry_json(spec, records).dump(2) + "\n");
    std::fprintf(stdout, "%s\n", (out_dir + "/registry.json").c_str());
    return exit_ok;
}

inline int run_verify(int samples, std::uint64_t seed, double corrupt_damping) {
    verify::SuiteOptions opt;
    opt.samples = samples;
    opt.seed = seed;
    opt.damping_scale = corrupt_damping;
    const verify::Suite suite = verify::run_suite(opt);
    for (const auto& row : suite.rows)
        std::fprintf(stdout, "[%s] %-26s measured=%-12.6g %s\n", row.passed ? "PASS" : "FAIL",
                     row.name.c_str(), row.measured, row.detail.c_str());
    if (!suite.all_passed()) {
        std::fprintf(stdout, "verification FAILED\n");
        return exit_verification_failure;
    }
    std::fprintf(stdout, "all checks passed\n");
    return exit_ok;
}

}  // namespace cli_detail

/// Entry point behind main(); factored out so tests can drive the CLI
/// in-process and assert on exit codes.
inline int cli_main(int argc, const char* const* argv) {
    CLI::App app{"radially symmetric chemotaxis simulation toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    bool force = false;
    int jobs = 1;
    int samples = 500;
    std::uint64_t seed = 2026;
    double corrupt_damping = 1.0;

    CLI::App* check = app.add_subcommand("check-params", "validate a parameter file");
    check->add_option("--config", config_path, "run configuration file")->required();

    CLI::App* sim = app.add_subcommand("simulate", "integrate one configuration");
    sim->add_option("--config", config_path, "run configuration file")->required();
    sim->add_option("--out", out_dir, "output directory")->required();
    sim->add_flag("--force-inadmissible", force, "run outside the admissible region");

    CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep");
    sweep->add_option("--config", config_path, "sweep configuration file")->required();
    sweep->add_option("--out", out_dir, "output directory")->required();
    sweep->add_option("--jobs", jobs, "worker thread count")->check(CLI::PositiveNumber);

    CLI::App* verify_cmd = app.add_subcommand("verify-lemmas", "run the verification suite");
    verify_cmd->add_option("--samples", samples, "probe sample count")->check(CLI::PositiveNumber);
    verify_cmd->add_option("--seed", seed, "random seed");
    verify_cmd->add_option("--corrupt-damping", corrupt_damping,
                           "rescale semigroup damping (diagnostics hook)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_input_error;
    }

    try {
        if (check->parsed()) return cli_detail::run_check_params(config_path);
        if (sim->parsed()) return cli_detail::run_simulate(config_path, out_dir, force);
        if (sweep->parsed()) return cli_detail::run_sweep_cmd(config_path, out_dir, jobs);
        if (verify_cmd->parsed()) return cli_detail::run_verify(samples, seed, corrupt_damping);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_input_error;
    } catch (const InadmissibleError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return exit_inadmissible;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "invalid model data: %s\n", e.what());
        return exit_inadmissible;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_verification_failure;
    }
    return exit_input_error;
}

}  // namespace chemo
