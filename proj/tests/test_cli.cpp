#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "csl/dataio.hpp"
#include "csl/errors.hpp"

using namespace csl;

namespace {

struct CmdResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::filesystem::path fresh_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("csl_cli_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// Runs the built binary through the shell with a scrubbed CSL_SEED unless the
// test sets one explicitly via env_prefix (e.g. "CSL_SEED=5").
CmdResult run_cli(const std::string& args, const std::filesystem::path& workdir,
                  const std::string& env_prefix = "") {
    const auto out_file = workdir / "stdout.txt";
    const auto err_file = workdir / "stderr.txt";
    std::string cmd = "cd '" + workdir.string() + "' && env -u CSL_SEED " + env_prefix +
                      (env_prefix.empty() ? "" : " ") + "'" + CSL_CLI_BINARY + "' " + args +
                      " > '" + out_file.string() + "' 2> '" + err_file.string() + "'";
    const int rc = std::system(cmd.c_str());
    CmdResult r;
    REQUIRE(rc != -1);
    REQUIRE(WIFEXITED(rc));
    r.exit_code = WEXITSTATUS(rc);
    r.out = slurp(out_file);
    r.err = slurp(err_file);
    return r;
}

std::size_t data_rows(const std::filesystem::path& csv) {
    std::ifstream in(csv);
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++rows;
    }
    return rows == 0 ? 0 : rows - 1;
}

} // namespace

TEST_CASE("help is available for every subcommand and unknown flags fail", "[cli]") {
    const auto dir = fresh_dir("help");
    auto top = run_cli("--help", dir);
    REQUIRE(top.exit_code == 0);
    for (const char* sub : {"simulate", "evaluate", "reproduce", "check"}) {
        REQUIRE(top.out.find(sub) != std::string::npos);
        auto help = run_cli(std::string(sub) + " --help", dir);
        REQUIRE(help.exit_code == 0);
        for (const char* flag : {"--config", "--seed", "--out", "--reps", "--rows"}) {
            REQUIRE(help.out.find(flag) != std::string::npos);
        }
    }
    auto bad = run_cli("simulate --frobnicate", dir);
    REQUIRE(bad.exit_code != 0);
    auto none = run_cli("", dir);
    REQUIRE(none.exit_code != 0);
}

TEST_CASE("simulate writes dataset, oracle, and manifest deterministically", "[cli]") {
    const auto dir = fresh_dir("simulate");
    auto first = run_cli("simulate --seed 9 --rows 300 --out run", dir);
    REQUIRE(first.exit_code == 0);
    REQUIRE(first.out.find("dataset.csv") != std::string::npos);

    const auto data = slurp(dir / "run" / "dataset.csv");
    const auto oracle = slurp(dir / "run" / "oracle.csv");
    const auto manifest = slurp(dir / "run" / "manifest.json");
    REQUIRE(data_rows(dir / "run" / "dataset.csv") == 300);
    REQUIRE(data_rows(dir / "run" / "oracle.csv") == 300);
    REQUIRE(manifest.find("timestamp") == std::string::npos);
    REQUIRE(manifest.find("\"subcommand\": \"simulate\"") != std::string::npos);

    auto second = run_cli("simulate --seed 9 --rows 300 --out run", dir);
    REQUIRE(second.exit_code == 0);
    REQUIRE(slurp(dir / "run" / "dataset.csv") == data);
    REQUIRE(slurp(dir / "run" / "oracle.csv") == oracle);
    REQUIRE(slurp(dir / "run" / "manifest.json") == manifest);

    auto other_seed = run_cli("simulate --seed 10 --rows 300 --out other", dir);
    REQUIRE(other_seed.exit_code == 0);
    REQUIRE(slurp(dir / "other" / "dataset.csv") != data);
}

TEST_CASE("seed resolution prefers the flag, then CSL_SEED, then the default", "[cli]") {
    const auto dir = fresh_dir("seed");
    REQUIRE(run_cli("simulate --rows 100 --out def", dir).exit_code == 0);
    REQUIRE(run_cli("simulate --seed 17 --rows 100 --out flag17", dir).exit_code == 0);
    REQUIRE(slurp(dir / "def" / "dataset.csv") == slurp(dir / "flag17" / "dataset.csv"));

    REQUIRE(run_cli("simulate --rows 100 --out env5", dir, "CSL_SEED=5").exit_code == 0);
    REQUIRE(run_cli("simulate --seed 5 --rows 100 --out flag5", dir).exit_code == 0);
    REQUIRE(slurp(dir / "env5" / "dataset.csv") == slurp(dir / "flag5" / "dataset.csv"));
    REQUIRE(slurp(dir / "env5" / "dataset.csv") != slurp(dir / "def" / "dataset.csv"));

    // Flag beats environment.
    REQUIRE(run_cli("simulate --seed 17 --rows 100 --out both", dir, "CSL_SEED=5")
                .exit_code == 0);
    REQUIRE(slurp(dir / "both" / "dataset.csv") == slurp(dir / "def" / "dataset.csv"));

    auto bad_env = run_cli("simulate --rows 100 --out bad", dir, "CSL_SEED=xyz");
    REQUIRE(bad_env.exit_code == InvalidConfig::code);
    REQUIRE(bad_env.err.find("CSL_SEED") != std::string::npos);
}

TEST_CASE("simulate reads dgp configs and rejects invalid ones", "[cli]") {
    const auto dir = fresh_dir("simcfg");
    {
        std::ofstream cfg(dir / "surrogate.json");
        cfg << R"({"dgp": {"family": "surrogate", "k": 3, "rho_L": 0.5}, "rows": 123})";
    }
    auto ok = run_cli("simulate --config surrogate.json --seed 2 --out s", dir);
    REQUIRE(ok.exit_code == 0);
    REQUIRE(data_rows(dir / "s" / "dataset.csv") == 123);
    const auto manifest = slurp(dir / "s" / "manifest.json");
    REQUIRE(manifest.find("\"family\": \"surrogate\"") != std::string::npos);

    {
        std::ofstream cfg(dir / "bad.json");
        cfg << R"({"dgp": {"family": "surrogate", "k": 3, "rho_L": -0.9}})";
    }
    auto bad = run_cli("simulate --config bad.json --out b", dir);
    REQUIRE(bad.exit_code == InvalidConfig::code);
    REQUIRE(!bad.err.empty());
    REQUIRE(bad.err.find('\n') == bad.err.size() - 1); // single-line diagnostic

    auto missing = run_cli("simulate --config nope.json --out m", dir);
    REQUIRE(missing.exit_code == IoFailure::code);
}

TEST_CASE("evaluate produces a replicated report with curves per scorer", "[cli]") {
    const auto dir = fresh_dir("evaluate");
    {
        std::ofstream cfg(dir / "eval.json");
        cfg << R"({
            "dgp": {"family": "nudge", "mu_mean": -2.0},
            "rows": 3000,
            "train_fraction": 0.5,
            "grid_points": 21,
            "scorers": [
                {"kind": "transformed_outcome", "trees": 60, "bins": 32},
                {"kind": "outcome_rate", "trees": 60, "bins": 32},
                {"kind": "t_learner", "name": "tl_ridge", "learner": "ridge", "l2": 0.001}
            ],
            "metrics": ["auqc", "uplift_at_10", "mean_score", "kendall_tau", "qini_area"]
        })";
    }
    auto res = run_cli("evaluate --config eval.json --seed 4 --reps 3 --out ev", dir);
    INFO(res.err);
    REQUIRE(res.exit_code == 0);

    const auto report = read_report((dir / "ev" / "report.json").string());
    REQUIRE(report.seed == 4);
    const std::vector<std::string> scorers = {"transformed_outcome", "outcome_rate",
                                              "tl_ridge"};
    for (const auto& s : scorers) {
        for (const auto& m : {"auqc", "uplift_at_10", "mean_score", "kendall_tau",
                              "qini_area"}) {
            double sum = 0.0;
            for (int r = 1; r <= 3; ++r) {
                const auto key = s + "." + m + ".rep" + std::to_string(r);
                REQUIRE(report.metrics.count(key) == 1);
                sum += report.metrics.at(key);
            }
            REQUIRE(report.metrics.at(s + "." + m + ".mean") ==
                    Catch::Approx(sum / 3.0).margin(1e-12));
        }
        REQUIRE(report.curves.count("qini." + s) == 1);
        REQUIRE(report.curves.at("qini." + s).fractions.size() == 21);
        REQUIRE(std::filesystem::exists(dir / "ev" / ("qini_" + s + ".csv")));
        REQUIRE(std::filesystem::exists(dir / "ev" / ("qini_" + s + ".svg")));
    }
    // Oracle-referenced quality of the unbiased scorer is sane.
    REQUIRE(report.metrics.at("transformed_outcome.kendall_tau.mean") > 0.2);
    REQUIRE(report.metrics.at("transformed_outcome.auqc.mean") > 0.3);

    auto rerun = run_cli("evaluate --config eval.json --seed 4 --reps 3 --out ev2", dir);
    REQUIRE(rerun.exit_code == 0);
    const auto again = read_report((dir / "ev2" / "report.json").string());
    REQUIRE(again.metrics == report.metrics);
}

TEST_CASE("evaluate validates metric names and oracle requirements", "[cli]") {
    const auto dir = fresh_dir("evalbad");
    {
        std::ofstream cfg(dir / "unknown.json");
        cfg << R"({"dgp": {"family": "nudge"}, "rows": 200,
                   "scorers": [{"kind": "outcome_rate", "trees": 5}],
                   "metrics": ["lift_over_random"]})";
    }
    auto unknown = run_cli("evaluate --config unknown.json --out u", dir);
    REQUIRE(unknown.exit_code == UnknownMetric::code);
    REQUIRE(unknown.err.find("lift_over_random") != std::string::npos);

    // CSV-sourced data has no oracle truth, so auqc is rejected up front.
    auto sim = run_cli("simulate --seed 3 --rows 400 --out data", dir);
    REQUIRE(sim.exit_code == 0);
    {
        std::ofstream cfg(dir / "csv.json");
        cfg << R"({"data": {"path": "data/dataset.csv",
                            "schema": {"feature_columns": ["mu"],
                                       "outcome_column": "outcome"}},
                   "scorers": [{"kind": "outcome_rate", "trees": 5}],
                   "metrics": ["qini_area", "uplift_at_25", "mean_score"]})";
    }
    auto csv_ok = run_cli("evaluate --config csv.json --reps 2 --out c", dir);
    INFO(csv_ok.err);
    REQUIRE(csv_ok.exit_code == 0);
    const auto report = read_report((dir / "c" / "report.json").string());
    REQUIRE(report.metrics.count("outcome_rate.uplift_at_25.mean") == 1);

    {
        std::ofstream cfg(dir / "needs_oracle.json");
        cfg << R"({"data": {"path": "data/dataset.csv",
                            "schema": {"feature_columns": ["mu"],
                                       "outcome_column": "outcome"}},
                   "scorers": [{"kind": "outcome_rate", "trees": 5}],
                   "metrics": ["auqc"]})";
    }
    auto needs = run_cli("evaluate --config needs_oracle.json --out n", dir);
    REQUIRE(needs.exit_code == InvalidConfig::code);
    REQUIRE(needs.err.find("oracle") != std::string::npos);
}

TEST_CASE("reproduce regenerates figure data deterministically", "[cli]") {
    const auto dir = fresh_dir("reproduce");
    auto fig5 = run_cli("reproduce fig5 --out f", dir);
    REQUIRE(fig5.exit_code == 0);
    auto rows5 = load_column_csv((dir / "f" / "fig5.csv").string(), "cate");
    auto mu5 = load_column_csv((dir / "f" / "fig5.csv").string(), "mu");
    std::size_t best = 0;
    for (std::size_t i = 1; i < rows5.size(); ++i) {
        if (rows5[i] > rows5[best]) {
            best = i;
        }
    }
    REQUIRE(mu5[best] == Catch::Approx(-0.25).margin(5e-3));
    REQUIRE(std::filesystem::exists(dir / "f" / "fig5.svg"));

    auto fig6 = run_cli("reproduce fig6 --out f", dir);
    REQUIRE(fig6.exit_code == 0);
    auto cas = load_column_csv((dir / "f" / "fig6.csv").string(), "cas");
    auto cate = load_column_csv((dir / "f" / "fig6.csv").string(), "cate");
    std::size_t at28 = 0;
    for (std::size_t i = 1; i < cas.size(); ++i) {
        if (std::abs(cas[i] - 0.28) < std::abs(cas[at28] - 0.28)) {
            at28 = i;
        }
    }
    REQUIRE(cate[at28] == Catch::Approx(0.11).margin(0.005));

    auto thm3 = run_cli("reproduce thm3 --seed 8 --reps 5 --out f", dir);
    REQUIRE(thm3.exit_code == 0);
    const auto bytes = slurp(dir / "f" / "thm3.csv");
    auto again = run_cli("reproduce thm3 --seed 8 --reps 5 --out f", dir);
    REQUIRE(again.exit_code == 0);
    REQUIRE(slurp(dir / "f" / "thm3.csv") == bytes);

    auto quintile = run_cli("reproduce quintile --seed 8 --rows 4000 --out f", dir);
    REQUIRE(quintile.exit_code == 0);
    REQUIRE(data_rows(dir / "f" / "quintile.csv") == 5);

    auto unknown = run_cli("reproduce fig99 --out f", dir);
    REQUIRE(unknown.exit_code == UnknownFigure::code);
    REQUIRE(unknown.err.find("fig99") != std::string::npos);
}

TEST_CASE("reproduce emits structurally complete heatmaps", "[cli]") {
    const auto dir = fresh_dir("fig8");
    auto fig8 = run_cli("reproduce fig8 --seed 8 --rows 2000 --out f", dir);
    INFO(fig8.err);
    REQUIRE(fig8.exit_code == 0);
    for (const char* tag : {"fig8_k2", "fig8_k6"}) {
        REQUIRE(data_rows(dir / "f" / (std::string(tag) + ".csv")) == 25);
        const auto svg = slurp(dir / "f" / (std::string(tag) + ".svg"));
        std::size_t cells = 0;
        for (std::size_t pos = svg.find("<rect class=\"cell\""); pos != std::string::npos;
             pos = svg.find("<rect class=\"cell\"", pos + 1)) {
            ++cells;
        }
        REQUIRE(cells == 25);
    }
}

TEST_CASE("check reports interpretation verdicts for score/effect files", "[cli]") {
    const auto dir = fresh_dir("check");
    {
        std::ofstream s(dir / "scores.csv");
        s << "score\n0.1\n0.5\n0.3\n0.9\n";
        std::ofstream e(dir / "effects.csv");
        e << "effect\n1.0\n2.0\n1.5\n3.0\n";
        std::ofstream cfg(dir / "check.json");
        cfg << R"({"scores": {"path": "scores.csv"},
                   "effects": {"path": "effects.csv"}, "tau": 1.7})";
    }
    auto res = run_cli("check --config check.json --out v", dir);
    INFO(res.err);
    REQUIRE(res.exit_code == 0);
    REQUIRE(res.out.find("eo: valid=true") != std::string::npos);
    const auto report = read_report((dir / "v" / "verdicts.json").string());
    REQUIRE(report.verdicts.at("eo").valid);
    REQUIRE(report.verdicts.at("ec").valid);
    REQUIRE(report.verdicts.at("ec").threshold_interval->low == 0.3);
    REQUIRE(report.verdicts.at("ec").threshold_interval->high == 0.5);
    REQUIRE(report.metrics.at("kendall_tau") == 1.0);

    {
        std::ofstream e(dir / "short.csv");
        e << "effect\n1.0\n2.0\n";
        std::ofstream cfg(dir / "bad.json");
        cfg << R"({"scores": {"path": "scores.csv"}, "effects": {"path": "short.csv"}})";
    }
    auto bad = run_cli("check --config bad.json --out v", dir);
    REQUIRE(bad.exit_code == MisalignedInputs::code);

    auto noconf = run_cli("check --out v", dir);
    REQUIRE(noconf.exit_code == InvalidConfig::code);
}
