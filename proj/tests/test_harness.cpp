#include <catch2/catch_amalgamated.hpp>

#include <fcntl.h>
#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "chemo/cli.hpp"
#include "chemo/config.hpp"
#include "chemo/evolve.hpp"
#include "chemo/io.hpp"
#include "chemo/sweep.hpp"

using namespace chemo;
namespace fs = std::filesystem;

namespace {

// keep sweep/cli progress logging out of the test output
const bool quiet_logs = [] {
    setenv("CHEMO_SIM_LOG", "quiet", 1);
    return true;
}();

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path = fs::temp_directory_path() /
               ("chemo_test_" + tag + "_" + std::to_string(counter.fetch_add(1)) + "_" +
                std::to_string(static_cast<unsigned>(::getpid())));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string str() const { return path.string(); }
};

const std::string demo_text =
    "n = 2\n"
    "gamma = 1.5\n"
    "p = 4\n"
    "q = 2\n"
    "alpha = 0.5\n"
    "mu1 = 0.1\n"
    "kappa = \"0.2\"\n"
    "mu = \"0.1 * s^0.5\"\n"
    "cells = 64\n"
    "u0 = bump\n"
    "u0_amplitude = 4\n"
    "u0_sigma = 0.25\n"
    "t_end = 0.5\n"
    "sample_interval = 0.1\n";

}  // namespace

TEST_CASE("key-value parsing handles comments, quotes and whitespace") {
    auto entries = parse_kv_text(
        "# leading comment\n"
        "\n"
        "a = 1.5   # trailing comment\n"
        "  b=\"hash # inside\"  \n"
        "c   =   text\n");
    REQUIRE(entries.size() == 3);
    CHECK(entries[0].key == "a");
    CHECK(entries[0].value == "1.5");
    CHECK(entries[0].line == 3);
    CHECK(entries[1].key == "b");
    CHECK(entries[1].value == "hash # inside");
    CHECK(entries[2].value == "text");
}

TEST_CASE("key-value parse errors carry line numbers") {
    try {
        parse_kv_text("a = 1\nb = 2\nnot an assignment\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(parse_kv_text("a = 1\na = 2\n"), ConfigError);   // duplicate
    CHECK_THROWS_AS(parse_kv_text("a =\n"), ConfigError);            // missing value
    CHECK_THROWS_AS(parse_kv_text("= 3\n"), ConfigError);            // missing key
    CHECK_THROWS_AS(parse_kv_text("a = \"open\n"), ConfigError);     // unterminated
    CHECK_THROWS_AS(parse_kv_file("/nonexistent/path.toml"), ConfigError);
}

TEST_CASE("run configuration applies defaults and validates") {
    RunConfig cfg = RunConfig::parse_text("n = 2\ngamma = 1.5\np = 4\nq = 2\nalpha = 0.5\n");
    CHECK(cfg.cells == 200);
    CHECK(cfg.mode == GridMode::radial);
    CHECK(cfg.t_end == 10.0);
    CHECK(cfg.mu1 == 1.0);
    CHECK(cfg.u0.kind == U0Kind::bump);
    CHECK(cfg.seed == 0);

    CHECK_THROWS_AS(RunConfig::parse_text("typo_key = 1\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse_text("gamma = notanumber\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse_text("u0 = pyramid\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse_text("grid = cartesian\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse_text("dt_init = 1e-12\ndt_min = 1e-10\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse_text("n = 3\ngrid = polar\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse_text("u0 = two_bumps\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse_text("cells = 1\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse_text("u0_sigma = 0\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse_text("mu = \"garbage(\"\n"), ConfigError);
}

TEST_CASE("configuration hashing is canonical") {
    RunConfig a = RunConfig::parse_text("gamma = 1.5\nn = 2\np = 4\nq = 2\nalpha = 0.5\n");
    RunConfig b = RunConfig::parse_text("alpha = 0.5\nq = 2\np = 4\ngamma = 1.5\nn = 2\n");
    CHECK(config_hash(a) == config_hash(b));

    // spelling out a default does not change the hash
    RunConfig c = RunConfig::parse_text(
        "gamma = 1.5\nn = 2\np = 4\nq = 2\nalpha = 0.5\ncells = 200\nmu1 = 1\n");
    CHECK(config_hash(a) == config_hash(c));

    RunConfig d = RunConfig::parse_text("gamma = 1.5\nn = 2\np = 4\nq = 2\nalpha = 0.25\n");
    CHECK(config_hash(a) != config_hash(d));

    // cells_theta only participates for polar grids
    RunConfig r1 = a, r2 = a;
    r1.cells_theta = 64;
    r2.cells_theta = 32;
    CHECK(config_hash(r1) == config_hash(r2));
    r1.mode = r2.mode = GridMode::polar;
    CHECK(config_hash(r1) != config_hash(r2));

    // canonical text is sorted and materializes every effective key
    const std::string canon = canonical_config(a);
    CHECK(canon.find("cells = 200\n") != std::string::npos);
    CHECK(canon.find("seed = 0\n") != std::string::npos);
    CHECK(canon.find("cells_theta") == std::string::npos);
}

TEST_CASE("initial profiles sample as documented") {
    RunConfig cfg = RunConfig::parse_text(demo_text);
    RadialGrid g = RadialGrid::make(2, cfg.R, cfg.cells);

    SECTION("bump") {
        std::vector<double> u = sample_u0(cfg, g);
        for (int i = 0; i < g.cells; ++i) {
            const double expected =
                4.0 * std::exp(-0.5 * g.nodes[i] * g.nodes[i] / (0.25 * 0.25));
            CHECK(u[i] == Catch::Approx(expected).epsilon(1e-14));
        }
    }
    SECTION("constant") {
        cfg.u0.kind = U0Kind::constant;
        std::vector<double> u = sample_u0(cfg, g);
        for (double x : u) CHECK(x == 4.0);
    }
    SECTION("ring peaks at mid-radius") {
        cfg.u0.kind = U0Kind::ring;
        std::vector<double> u = sample_u0(cfg, g);
        int peak = 0;
        for (int i = 0; i < g.cells; ++i)
            if (u[i] > u[peak]) peak = i;
        CHECK(g.nodes[peak] == Catch::Approx(0.5 * cfg.R).margin(g.dr()));
    }
    SECTION("expression") {
        cfg.u0.kind = U0Kind::expression;
        cfg.u0.expr_text = "1 + s";
        std::vector<double> u = sample_u0(cfg, g);
        for (int i = 0; i < g.cells; ++i) CHECK(u[i] == Catch::Approx(1.0 + g.nodes[i]));
    }
    SECTION("negative expression is rejected") {
        cfg.u0.kind = U0Kind::expression;
        cfg.u0.expr_text = "s - 0.5";
        CHECK_THROWS_AS(sample_u0(cfg, g), std::domain_error);
    }
    SECTION("noisy bump is seed-deterministic") {
        cfg.u0.kind = U0Kind::noisy_bump;
        cfg.seed = 11;
        std::vector<double> u1 = sample_u0(cfg, g);
        std::vector<double> u2 = sample_u0(cfg, g);
        CHECK(u1 == u2);
        cfg.seed = 12;
        std::vector<double> u3 = sample_u0(cfg, g);
        CHECK(u1 != u3);
        for (int i = 0; i < g.cells; ++i) {
            const double base = 4.0 * std::exp(-0.5 * g.nodes[i] * g.nodes[i] / (0.25 * 0.25));
            CHECK(std::abs(u1[i] - base) <= 0.0100001 * base);
        }
    }
}

TEST_CASE("trajectory serialization is stable to the last bit") {
    CHECK(format_g17(0.1) == "0.10000000000000001");
    CHECK(format_g17(1.0) == "1");

    Trajectory tr;
    TrajectorySample s;
    s.t = 0.1;
    s.mass = 2.5;
    s.lq = 1.25;
    s.linf = 4.0;
    s.dt = 1e-3;
    s.min_u = 0.0;
    tr.samples.push_back(s);
    const std::string csv = trajectory_csv(tr);
    CHECK(csv ==
          "t,mass,lq_norm,linf_norm,dt,min_u\n"
          "0.10000000000000001,2.5,1.25,4,0.001,0\n");
}

TEST_CASE("executing a run writes a reproducible artifact pair") {
    RunConfig cfg = RunConfig::parse_text(demo_text);
    TempDir d1("run1"), d2("run2");
    RunRecord r1 = execute_run(cfg, d1.str());
    RunRecord r2 = execute_run(cfg, d2.str());

    CHECK(r1.outcome == "completed");
    CHECK(r1.config_hash == config_hash(cfg));
    CHECK(r1.terminated_at == Catch::Approx(0.5).margin(1e-9));
    CHECK(r1.K > 0.0);

    const std::string csv1 = read_text_file(d1.str() + "/trajectory.csv");
    const std::string csv2 = read_text_file(d2.str() + "/trajectory.csv");
    CHECK(csv1 == csv2);  // byte-identical
    CHECK(csv1.rfind("t,mass,lq_norm,linf_norm,dt,min_u\n", 0) == 0);

    const std::string sum1 = read_text_file(d1.str() + "/summary.json");
    const std::string sum2 = read_text_file(d2.str() + "/summary.json");
    CHECK(sum1 == sum2);

    nlohmann::json j = nlohmann::json::parse(sum1);
    CHECK(j["config_hash"] == r1.config_hash);
    CHECK(j["blowup_reason"].is_null());
    CHECK(j["max_mass"].get<double>() == Catch::Approx(r1.max_mass));
    CHECK(j["steps_accepted"].get<long>() > 0);

    // empty outdir: no files, record only
    RunRecord r3 = execute_run(cfg, "");
    CHECK(r3.outcome == "completed");
    CHECK(r3.max_mass == Catch::Approx(r1.max_mass));
}

TEST_CASE("sweep axis parsing accepts lists and ranges") {
    auto entries = parse_kv_text(demo_text +
                                 "sweep_alpha = 0.2:0.8:4\n"
                                 "sweep_u0_amplitude = \"2.0, 4.0\"\n");
    SweepSpec spec = parse_sweep_entries(entries);
    REQUIRE(spec.axes.size() == 2);
    CHECK(spec.axes[0].name == "alpha");
    REQUIRE(spec.axes[0].values.size() == 4);
    CHECK(spec.axes[0].values[0] == Catch::Approx(0.2));
    CHECK(spec.axes[0].values[1] == Catch::Approx(0.4));
    CHECK(spec.axes[0].values[3] == Catch::Approx(0.8));
    CHECK(spec.axes[1].values == std::vector<double>{2.0, 4.0});
    CHECK(spec.points() == 8);

    CHECK_THROWS_AS(parse_sweep_entries(parse_kv_text(demo_text + "sweep_alpha = 0.2:0.8\n")),
                    ConfigError);
    CHECK_THROWS_AS(parse_sweep_entries(parse_kv_text(demo_text + "sweep_R = 1, 2\n")),
                    ConfigError);
    CHECK_THROWS_AS(parse_sweep_entries(parse_kv_text(demo_text)), ConfigError);
    CHECK_THROWS_AS(parse_sweep_entries(parse_kv_text(demo_text + "sweep_alpha = 0.1:0.8:20000\n")),
                    ConfigError);
}

TEST_CASE("sweeps deduplicate tuples and skip inadmissible points") {
    // alpha values must stay at or above the exponent in the mu expression or
    // the structure condition fails near the origin; 0.55 is safe, 0.9 is past
    // the admissible bound 6/7
    auto entries = parse_kv_text(demo_text +
                                 "sweep_alpha = \"0.55, 0.9\"\n"
                                 "sweep_u0_amplitude = \"2, 2\"\n");
    SweepSpec spec = parse_sweep_entries(entries);
    CHECK(spec.points() == 4);

    TempDir out("sweep");
    std::vector<RunRecord> records = run_sweep(spec, out.str());
    REQUIRE(records.size() == 2);  // duplicates collapsed

    CHECK(records[0].params.at("alpha") == Catch::Approx(0.55));
    CHECK(records[0].outcome == "completed");
    CHECK(records[1].params.at("alpha") == Catch::Approx(0.9));
    CHECK(records[1].outcome == "skipped_inadmissible");

    CHECK(fs::exists(out.path / records[0].dir / "trajectory.csv"));
    CHECK(fs::exists(out.path / records[0].dir / "summary.json"));
    CHECK(records[1].dir.empty());

    nlohmann::json reg = registry_json(spec, records);
    CHECK(reg["points_declared"] == 4);
    CHECK(reg["points_executed"] == 2);
    CHECK(reg["records"].size() == 2);
    CHECK(reg["axes"][0]["name"] == "alpha");
}

TEST_CASE("sweep registries are reproducible modulo wall time") {
    auto entries = parse_kv_text(demo_text + "sweep_u0_amplitude = \"2, 3\"\n");
    SweepSpec spec = parse_sweep_entries(entries);
    TempDir o1("reg1"), o2("reg2");
    auto strip = [](std::vector<RunRecord> rs) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : rs) {
            nlohmann::json j = to_json(r);
            j.erase("wall_time_s");
            arr.push_back(j);
        }
        return arr;
    };
    CHECK(strip(run_sweep(spec, o1.str())) == strip(run_sweep(spec, o2.str())));
}

TEST_CASE("structure-condition violations inside a sweep are skipped, not errors") {
    // raising mu1 pushes mu below the required lower bound
    auto entries = parse_kv_text(demo_text + "sweep_mu1 = \"0.1, 5.0\"\n");
    SweepSpec spec = parse_sweep_entries(entries);
    std::vector<RunRecord> records = run_sweep(spec, "");
    REQUIRE(records.size() == 2);
    CHECK(records[0].outcome == "completed");
    CHECK(records[1].outcome == "skipped_inadmissible");
}

TEST_CASE("command line: parameter checking") {
    TempDir dir("cli_check");
    const std::string good = (dir.path / "good.toml").string();
    write_text_file(good, demo_text);
    const char* argv_good[] = {"chemo-sim", "check-params", "--config", good.c_str()};
    CHECK(cli_main(4, argv_good) == 0);

    // make it inadmissible by violating the q threshold
    const std::string bad = (dir.path / "bad.toml").string();
    std::string text = demo_text;
    text.replace(text.find("q = 2"), 5, "q = 1");
    write_text_file(bad, text);
    const char* argv_bad[] = {"chemo-sim", "check-params", "--config", bad.c_str()};
    CHECK(cli_main(4, argv_bad) == 2);

    const char* argv_missing[] = {"chemo-sim", "check-params", "--config", "/no/such/file"};
    CHECK(cli_main(4, argv_missing) == 3);

    const std::string broken = (dir.path / "broken.toml").string();
    write_text_file(broken, "n = 2\nbogus line\n");
    const char* argv_broken[] = {"chemo-sim", "check-params", "--config", broken.c_str()};
    CHECK(cli_main(4, argv_broken) == 3);

    const char* argv_nosub[] = {"chemo-sim"};
    CHECK(cli_main(1, argv_nosub) == 3);
    const char* argv_badopt[] = {"chemo-sim", "check-params", "--wat"};
    CHECK(cli_main(3, argv_badopt) == 3);
}

TEST_CASE("command line: simulate") {
    TempDir dir("cli_sim");
    const std::string cfg_path = (dir.path / "run.toml").string();
    write_text_file(cfg_path, demo_text);
    const std::string out = (dir.path / "out").string();
    const char* argv_sim[] = {"chemo-sim", "simulate", "--config", cfg_path.c_str(),
                              "--out",     out.c_str()};
    CHECK(cli_main(6, argv_sim) == 0);
    CHECK(fs::exists(dir.path / "out" / "trajectory.csv"));
    CHECK(fs::exists(dir.path / "out" / "summary.json"));

    // inadmissible config: refused without the override, runs with it
    std::string text = demo_text;
    text.replace(text.find("alpha = 0.5"), 11, "alpha = 1.5");
    const std::string inadm = (dir.path / "inadm.toml").string();
    write_text_file(inadm, text);
    const std::string out2 = (dir.path / "out2").string();
    const char* argv_inadm[] = {"chemo-sim", "simulate", "--config", inadm.c_str(),
                                "--out",     out2.c_str()};
    CHECK(cli_main(6, argv_inadm) == 2);
    const char* argv_forced[] = {"chemo-sim", "simulate", "--config", inadm.c_str(),
                                 "--out",     out2.c_str(), "--force-inadmissible"};
    CHECK(cli_main(7, argv_forced) == 0);
    CHECK(fs::exists(dir.path / "out2" / "summary.json"));
}

TEST_CASE("command line: sweep") {
    TempDir dir("cli_sweep");
    const std::string cfg_path = (dir.path / "sweep.toml").string();
    write_text_file(cfg_path, demo_text + "sweep_u0_amplitude = \"2, 3\"\n");
    const std::string out = (dir.path / "out").string();
    const char* argv_sweep[] = {"chemo-sim", "sweep", "--config", cfg_path.c_str(),
                                "--out",     out.c_str()};
    CHECK(cli_main(6, argv_sweep) == 0);
    nlohmann::json reg = nlohmann::json::parse(read_text_file(out + "/registry.json"));
    CHECK(reg["points_declared"] == 2);
    CHECK(reg["points_executed"] == 2);
    for (const auto& rec : reg["records"]) {
        CHECK(rec["outcome"] == "completed");
        CHECK(fs::exists(fs::path(out) / rec["dir"].get<std::string>() / "trajectory.csv"));
    }
}

// the verification subcommand prints its own [PASS]/[FAIL] table; swallow it
// so the deliberately corrupted run cannot be mistaken for a test failure
struct MuteStdout {
    int saved;
    MuteStdout() : saved(::dup(1)) {
        std::fflush(stdout);
        int devnull = ::open("/dev/null", O_WRONLY);
        ::dup2(devnull, 1);
        ::close(devnull);
    }
    ~MuteStdout() {
        std::fflush(stdout);
        ::dup2(saved, 1);
        ::close(saved);
    }
};

TEST_CASE("command line: verification suite") {
    MuteStdout mute;
    const char* argv_verify[] = {"chemo-sim", "verify-lemmas"};
    CHECK(cli_main(2, argv_verify) == 0);

    const char* argv_corrupt[] = {"chemo-sim", "verify-lemmas", "--corrupt-damping", "0.5"};
    CHECK(cli_main(4, argv_corrupt) == 1);
}
