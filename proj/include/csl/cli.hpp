#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "csl/dataio.hpp"
#include "csl/dataset.hpp"
#include "csl/dgp.hpp"
#include "csl/errors.hpp"
#include "csl/interpret.hpp"
#include "csl/metrics.hpp"
#include "csl/normal.hpp"
#include "csl/rng.hpp"
#include "csl/scoring.hpp"
#include "csl/svg.hpp"
#include "csl/version.hpp"

namespace csl::cli {

inline constexpr std::uint64_t kDefaultSeed = 17;

struct CommonFlags {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    int reps = 20;
    std::uint64_t rows = 10000;
};

inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) {
        return *flag;
    }
    if (const char* env = std::getenv("CSL_SEED")) {
        const std::string s(env);
        std::uint64_t v = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty()) {
            throw InvalidConfig("CSL_SEED is not an unsigned integer: '" + s + "'");
        }
        return v;
    }
    return kDefaultSeed;
}

inline std::string current_timestamp() {
    if (const char* env = std::getenv("CSL_TIMESTAMP")) {
        return env;
    }
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

inline nlohmann::json load_config(const std::string& path) {
    if (path.empty()) {
        return nlohmann::json::object();
    }
    std::ifstream in(path);
    if (!in) {
        throw IoFailure("cannot open config '" + path + "'");
    }
    try {
        nlohmann::json j;
        in >> j;
        return j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfig("config '" + path + "' is not valid JSON: " + e.what());
    }
}

inline void ensure_out_dir(const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw IoFailure("cannot create output directory '" + out_dir + "': " + ec.message());
    }
}

inline std::string out_path(const CommonFlags& flags, const std::string& name) {
    return (std::filesystem::path(flags.out_dir) / name).string();
}

struct RunManifest {
    std::string subcommand;
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir;
    int reps = 0;
    std::uint64_t rows = 0;
    nlohmann::json config = nlohmann::json::object();
    std::vector<std::string> outputs;
};

// Deliberately timestamp-free: identical invocations must produce identical
// manifest bytes.
inline nlohmann::json manifest_to_json(const RunManifest& m) {
    return {{"format_version", 1},     {"tool_version", kVersion},
            {"subcommand", m.subcommand}, {"config_path", m.config_path},
            {"seed", m.seed},          {"out_dir", m.out_dir},
            {"reps", m.reps},          {"rows", m.rows},
            {"config", m.config},      {"outputs", m.outputs}};
}

inline void write_manifest(const RunManifest& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoFailure("cannot open '" + path + "' for writing");
    }
    out << manifest_to_json(m).dump(2) << '\n';
    if (!out.good()) {
        throw IoFailure("failed writing '" + path + "'");
    }
}

namespace detail {

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw MisalignedInputs("correlation needs two equal-length series");
    }
    const double ma = mean(a), mb = mean(b);
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    return sab / std::sqrt(saa * sbb);
}

inline double median(std::vector<double> v) {
    if (v.empty()) {
        throw TooFewUnits("median of an empty series");
    }
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace detail

// ---- simulate ----

inline DgpSpec dgp_from_config(const nlohmann::json& config) {
    if (config.contains("dgp")) {
        return dgp_from_json(config["dgp"]);
    }
    if (config.contains("family")) {
        return dgp_from_json(config);
    }
    return NudgeConfig{};
}

inline int cmd_simulate(const CommonFlags& flags) {
    const std::uint64_t seed = resolve_seed(flags.seed);
    nlohmann::json config = load_config(flags.config_path);
    const DgpSpec spec = dgp_from_config(config);
    std::uint64_t rows = flags.rows;
    if (config.contains("rows") && flags.rows == 10000) {
        rows = config["rows"].get<std::uint64_t>();
    }
    if (rows < 1) {
        throw InvalidConfig("simulate needs rows >= 1");
    }
    ensure_out_dir(flags.out_dir);

    const auto sim = simulate(spec, rows, RngStream(seed));

    RunManifest manifest;
    manifest.subcommand = "simulate";
    manifest.config_path = flags.config_path;
    manifest.seed = seed;
    manifest.out_dir = flags.out_dir;
    manifest.reps = 1;
    manifest.rows = rows;
    manifest.config = {{"dgp", dgp_to_json(spec)}};

    const auto data_path = out_path(flags, "dataset.csv");
    const auto oracle_path = out_path(flags, "oracle.csv");
    const auto manifest_path = out_path(flags, "manifest.json");
    export_dataset_csv(sim.dataset, data_path);
    export_oracle_csv(sim.oracle, sim.dataset.n(), oracle_path);
    manifest.outputs = {data_path, oracle_path, manifest_path};
    write_manifest(manifest, manifest_path);
    for (const auto& p : manifest.outputs) {
        std::cout << "wrote: " << p << '\n';
    }
    return 0;
}

// ---- evaluate ----

struct ScorerSpec {
    std::string name;
    ScoreKind kind = ScoreKind::transformed_outcome;
    BaseLearnerConfig base;
    TargetColumn target = TargetColumn::primary;
    PropensitySource propensity = PropensitySource::constant;
};

inline ScorerSpec scorer_from_json(const nlohmann::json& j) {
    ScorerSpec s;
    if (!j.contains("kind")) {
        throw InvalidConfig("scorer entry needs a 'kind'");
    }
    s.kind = score_kind_from_string(j["kind"].get<std::string>());
    s.name = j.value("name", std::string(to_string(s.kind)));
    const std::string learner = j.value("learner", std::string("gbdt"));
    if (learner == "ridge") {
        s.base.learner = LearnerKind::ridge_linear;
    } else if (learner == "gbdt") {
        s.base.learner = LearnerKind::gradient_boosted_trees;
    } else {
        throw InvalidConfig("unknown learner '" + learner + "' (gbdt or ridge)");
    }
    s.base.trees.tree_count = j.value("trees", s.base.trees.tree_count);
    s.base.trees.max_depth = j.value("depth", s.base.trees.max_depth);
    s.base.trees.learning_rate = j.value("learning_rate", s.base.trees.learning_rate);
    s.base.trees.min_leaf = j.value("min_leaf", s.base.trees.min_leaf);
    s.base.trees.histogram_bins = j.value("bins", s.base.trees.histogram_bins);
    s.base.ridge.l2_penalty = j.value("l2", s.base.ridge.l2_penalty);
    const std::string target = j.value("target", std::string("primary"));
    if (target == "surrogate") {
        s.target = TargetColumn::surrogate;
    } else if (target != "primary") {
        throw InvalidConfig("unknown target '" + target + "' (primary or surrogate)");
    }
    const std::string prop = j.value("propensity", std::string("constant"));
    if (prop == "fitted") {
        s.propensity = PropensitySource::fitted;
    } else if (prop != "constant") {
        throw InvalidConfig("unknown propensity source '" + prop +
                            "' (constant or fitted)");
    }
    return s;
}

struct MetricSpec {
    enum class Kind { auqc, qini_area, uplift_at, mean_score, kendall_tau };
    std::string name;
    Kind kind = Kind::auqc;
    double fraction = 0.1;
};

inline MetricSpec parse_metric(const std::string& name, bool have_oracle) {
    MetricSpec m;
    m.name = name;
    const auto need_oracle = [&] {
        if (!have_oracle) {
            throw InvalidConfig("metric '" + name +
                                "' needs simulated data with oracle truth");
        }
    };
    if (name == "auqc") {
        m.kind = MetricSpec::Kind::auqc;
        need_oracle();
    } else if (name == "qini_area") {
        m.kind = MetricSpec::Kind::qini_area;
    } else if (name == "mean_score") {
        m.kind = MetricSpec::Kind::mean_score;
    } else if (name == "kendall_tau") {
        m.kind = MetricSpec::Kind::kendall_tau;
        need_oracle();
    } else if (name.rfind("uplift_at_", 0) == 0) {
        const std::string pct = name.substr(10);
        int v = 0;
        const auto res = std::from_chars(pct.data(), pct.data() + pct.size(), v);
        if (res.ec != std::errc{} || res.ptr != pct.data() + pct.size() || v < 1 ||
            v > 100) {
            throw UnknownMetric("'" + name + "' (expected uplift_at_<1..100>)");
        }
        m.kind = MetricSpec::Kind::uplift_at;
        m.fraction = static_cast<double>(v) / 100.0;
    } else {
        throw UnknownMetric("'" + name + "'");
    }
    return m;
}

namespace detail {

struct SplitWithTruth {
    ExperimentDataset train;
    ExperimentDataset test;
    std::vector<double> test_cate; // empty when no oracle
};

// Same shuffle as csl::split, but keeps the oracle effects aligned with the
// test rows so oracle-referenced metrics stay well defined.
inline SplitWithTruth split_for_eval(const ExperimentDataset& ds,
                                     const std::vector<double>* cate,
                                     std::size_t train_count, RngStream rng) {
    const std::size_t n = ds.n();
    if (train_count == 0 || train_count >= n) {
        throw InvalidSplitSize("train_count " + std::to_string(train_count) +
                               " outside (0, " + std::to_string(n) + ")");
    }
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) {
        perm[i] = i;
    }
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.below(i + 1));
        std::swap(perm[i], perm[j]);
    }
    const std::vector<std::size_t> train_idx(
        perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(train_count));
    const std::vector<std::size_t> test_idx(
        perm.begin() + static_cast<std::ptrdiff_t>(train_count), perm.end());
    SplitWithTruth out{csl::detail::gather_rows(ds, train_idx),
                       csl::detail::gather_rows(ds, test_idx),
                       {}};
    if (cate) {
        out.test_cate.reserve(test_idx.size());
        for (std::size_t i : test_idx) {
            out.test_cate.push_back((*cate)[i]);
        }
    }
    return out;
}

struct RepOutcome {
    std::map<std::string, double> values;       // "<scorer>.<metric>" -> value
    std::map<std::string, UpliftCurve> curves;  // "<scorer>" -> qini curve
};

inline RepOutcome run_replication(const ExperimentDataset& ds,
                                  const std::vector<double>* oracle_cate,
                                  const std::vector<ScorerSpec>& scorers,
                                  const std::vector<MetricSpec>& metrics,
                                  double train_fraction, std::size_t grid_points,
                                  RngStream split_rng) {
    const auto train_count =
        static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(ds.n())));
    const auto parts = split_for_eval(ds, oracle_cate, train_count, split_rng);

    std::optional<UpliftCurve> reference;
    if (oracle_cate) {
        reference = qini_curve(parts.test, parts.test_cate, grid_points);
    }

    RepOutcome out;
    for (const auto& spec : scorers) {
        const ScoreModel model =
            fit(spec.kind, parts.train, spec.base, spec.target, spec.propensity);
        const std::vector<double> scores = model.predict(parts.test);
        const UpliftCurve curve = qini_curve(parts.test, scores, grid_points);
        out.curves[spec.name] = curve;
        for (const auto& metric : metrics) {
            double value = 0.0;
            switch (metric.kind) {
                case MetricSpec::Kind::auqc: value = auqc(curve, *reference); break;
                case MetricSpec::Kind::qini_area:
                    value = csl::detail::trapezoid_area(curve);
                    break;
                case MetricSpec::Kind::uplift_at:
                    value = top_k_uplift(parts.test, scores, metric.fraction);
                    break;
                case MetricSpec::Kind::mean_score: value = mean(scores); break;
                case MetricSpec::Kind::kendall_tau:
                    value = kendall_tau_against(scores, parts.test_cate);
                    break;
            }
            out.values[spec.name + "." + metric.name] = value;
        }
    }
    return out;
}

} // namespace detail

inline int cmd_evaluate(const CommonFlags& flags) {
    const std::uint64_t seed = resolve_seed(flags.seed);
    nlohmann::json config = load_config(flags.config_path);
    if (config.empty()) {
        config = {{"dgp", {{"family", "nudge"}}},
                  {"scorers", {{{"kind", "transformed_outcome"}},
                               {{"kind", "outcome_rate"}},
                               {{"kind", "t_learner"}}}},
                  {"metrics", {"auqc", "uplift_at_10", "mean_score"}}};
    }
    if (flags.reps < 1) {
        throw InvalidConfig("evaluate needs reps >= 1");
    }

    // Data source: a CSV path with schema, or a generator family.
    ExperimentDataset ds({}, {}, {});
    const std::vector<double>* oracle_cate = nullptr;
    std::vector<double> cate_storage;
    if (config.contains("data")) {
        const auto& data = config["data"];
        if (!data.contains("path")) {
            throw InvalidConfig("config data section needs a 'path'");
        }
        CsvSchema schema;
        if (data.contains("schema")) {
            const auto& sj = data["schema"];
            schema.feature_columns =
                sj.value("feature_columns", std::vector<std::string>{});
            schema.treatment_column = sj.value("treatment_column", schema.treatment_column);
            schema.outcome_column = sj.value("outcome_column", schema.outcome_column);
            if (sj.contains("surrogate_column")) {
                schema.surrogate_column = sj["surrogate_column"].get<std::string>();
            }
        } else {
            schema.surrogate_column.reset();
        }
        std::optional<std::size_t> limit;
        if (flags.rows != 10000 || config.value("limit_rows", false)) {
            limit = flags.rows;
        }
        ds = load_csv(data["path"].get<std::string>(), schema, limit);
    } else {
        const DgpSpec spec = dgp_from_config(config);
        std::uint64_t rows = flags.rows;
        if (config.contains("rows") && flags.rows == 10000) {
            rows = config["rows"].get<std::uint64_t>();
        }
        auto sim = simulate(spec, rows, RngStream(seed).substream(0));
        ds = std::move(sim.dataset);
        cate_storage = std::move(sim.oracle.cate);
        if (!cate_storage.empty()) {
            oracle_cate = &cate_storage;
        }
        config["dgp"] = dgp_to_json(spec);
    }

    std::vector<ScorerSpec> scorers;
    if (!config.contains("scorers") || !config["scorers"].is_array() ||
        config["scorers"].empty()) {
        throw InvalidConfig("evaluate config needs a nonempty 'scorers' array");
    }
    for (const auto& sj : config["scorers"]) {
        scorers.push_back(scorer_from_json(sj));
    }
    for (std::size_t i = 0; i < scorers.size(); ++i) {
        for (std::size_t j = i + 1; j < scorers.size(); ++j) {
            if (scorers[i].name == scorers[j].name) {
                throw InvalidConfig("duplicate scorer name '" + scorers[i].name + "'");
            }
        }
    }

    std::vector<MetricSpec> metrics;
    const std::vector<std::string> metric_names = config.value(
        "metrics", std::vector<std::string>{"qini_area", "uplift_at_10", "mean_score"});
    for (const auto& name : metric_names) {
        metrics.push_back(parse_metric(name, oracle_cate != nullptr));
    }

    const double train_fraction = config.value("train_fraction", 0.5);
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw InvalidConfig("train_fraction must lie in (0, 1)");
    }
    const auto grid_points = config.value("grid_points", std::size_t{100});

    ensure_out_dir(flags.out_dir);

    // Replications are independent splits with per-replication rng streams.
    const RngStream split_root = RngStream(seed).substream(1);
    std::vector<std::future<detail::RepOutcome>> futures;
    futures.reserve(static_cast<std::size_t>(flags.reps));
    for (int r = 0; r < flags.reps; ++r) {
        futures.push_back(std::async(std::launch::async, [&, r] {
            return detail::run_replication(ds, oracle_cate, scorers, metrics,
                                           train_fraction, grid_points,
                                           split_root.substream(static_cast<std::uint64_t>(r)));
        }));
    }
    std::vector<detail::RepOutcome> reps;
    reps.reserve(futures.size());
    for (auto& f : futures) {
        reps.push_back(f.get());
    }

    EvaluationReport report;
    report.seed = seed;
    report.timestamp = current_timestamp();
    report.config = config;
    for (const auto& spec : scorers) {
        for (const auto& metric : metrics) {
            const std::string key = spec.name + "." + metric.name;
            std::vector<double> values;
            values.reserve(reps.size());
            for (std::size_t r = 0; r < reps.size(); ++r) {
                const double v = reps[r].values.at(key);
                report.metrics[key + ".rep" + std::to_string(r + 1)] = v;
                values.push_back(v);
            }
            report.metrics[key + ".mean"] = detail::mean(values);
        }
        // Pointwise mean of the per-replication curves on the shared grid.
        UpliftCurve mean_curve = reps.front().curves.at(spec.name);
        for (std::size_t r = 1; r < reps.size(); ++r) {
            const auto& c = reps[r].curves.at(spec.name);
            if (c.fractions != mean_curve.fractions) {
                throw GridMismatch("replication curves disagree on fractions");
            }
            for (std::size_t g = 0; g < c.values.size(); ++g) {
                mean_curve.values[g] += c.values[g];
            }
        }
        for (double& v : mean_curve.values) {
            v /= static_cast<double>(reps.size());
        }
        report.curves["qini." + spec.name] = mean_curve;
    }

    std::vector<std::string> outputs;
    const auto report_path = out_path(flags, "report.json");
    write_report(report, report_path);
    outputs.push_back(report_path);
    for (const auto& spec : scorers) {
        const auto& curve = report.curves.at("qini." + spec.name);
        const auto csv_path = out_path(flags, "qini_" + spec.name + ".csv");
        export_curve_csv(curve, csv_path);
        outputs.push_back(csv_path);

        SvgChart chart;
        chart.title = "qini curve: " + spec.name;
        chart.x_label = "targeted fraction";
        chart.y_label = "incremental outcome per unit";
        SvgSeries series;
        series.label = spec.name;
        series.x = curve.fractions;
        series.y = curve.values;
        chart.series = {series};
        const auto svg_path = out_path(flags, "qini_" + spec.name + ".svg");
        write_svg(render_line_svg(chart), svg_path);
        outputs.push_back(svg_path);
    }
    for (const auto& p : outputs) {
        std::cout << "wrote: " << p << '\n';
    }
    return 0;
}

// ---- reproduce ----

namespace detail {

inline void write_table_csv(const std::string& path, const std::string& header,
                            const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) {
        throw IoFailure("cannot open '" + path + "' for writing");
    }
    out << header << '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out << (c ? "," : "") << csl::detail::format_number(row[c]);
        }
        out << '\n';
    }
    if (!out.good()) {
        throw IoFailure("failed writing '" + path + "'");
    }
}

} // namespace detail

inline std::vector<std::string> reproduce_fig5(const CommonFlags& flags, std::uint64_t) {
    const double delta = 0.5;
    std::vector<std::vector<double>> rows;
    std::vector<double> mu_grid, cas_vals, cate_vals;
    for (double mu = -6.0; mu <= 2.0 + 1e-12; mu += 0.005) {
        mu_grid.push_back(mu);
        cas_vals.push_back(nudge_cas(mu));
        cate_vals.push_back(nudge_cate(mu, delta));
        rows.push_back({mu, cas_vals.back(), cate_vals.back()});
    }
    const auto csv = out_path(flags, "fig5.csv");
    detail::write_table_csv(csv, "mu,cas,cate", rows);

    SvgChart chart;
    chart.title = "acceptance and lift across the latent index";
    chart.x_label = "latent index mu";
    chart.y_label = "rate";
    chart.series = {{"cas", mu_grid, cas_vals, false}, {"cate", mu_grid, cate_vals, false}};
    const auto svg = out_path(flags, "fig5.svg");
    write_svg(render_line_svg(chart), svg);
    return {csv, svg};
}

inline std::vector<std::string> reproduce_fig6(const CommonFlags& flags, std::uint64_t) {
    const double delta = 0.5;
    std::vector<std::vector<double>> rows;
    std::vector<double> cas_vals, cate_vals;
    for (double mu = -8.0; mu <= 0.0 + 1e-12; mu += 0.001) {
        const double cas = nudge_cas(mu);
        const double cate = nudge_cate(mu, delta);
        cas_vals.push_back(cas);
        cate_vals.push_back(cate);
        rows.push_back({mu, cas, cate});
    }
    const auto csv = out_path(flags, "fig6.csv");
    detail::write_table_csv(csv, "mu,cas,cate", rows);

    SvgChart chart;
    chart.title = "lift as a function of the acceptance score";
    chart.x_label = "cas";
    chart.y_label = "cate";
    SvgSeries trace{"cate(cas)", cas_vals, cate_vals, false};
    SvgSeries marker{"threshold pair", {0.28}, {nudge_cate(logit(0.28), delta)}, true};
    chart.series = {trace, marker};
    const auto svg = out_path(flags, "fig6.svg");
    write_svg(render_line_svg(chart), svg);
    return {csv, svg};
}

inline std::vector<std::string> reproduce_fig7(const CommonFlags& flags,
                                               std::uint64_t seed) {
    struct Variant {
        const char* label;
        double rho;
        double eta;
    };
    const Variant variants[] = {{"strong", 0.9, 0.1}, {"weak", 0.0, 1.0}};
    std::vector<std::vector<double>> rows;     // variant_id, cas, cate
    std::vector<std::vector<double>> summary;  // variant_id, pearson corr
    SvgChart chart;
    chart.title = "score versus lift under partial mediation";
    chart.x_label = "cas";
    chart.y_label = "cate";
    RngStream rng(seed);
    for (std::size_t v = 0; v < 2; ++v) {
        NudgeConfig cfg;
        cfg.heterogeneous = HeterogeneousNudge{variants[v].eta, variants[v].rho, 0.5};
        const auto sim = simulate_nudge(cfg, flags.rows, rng.substream(v));
        const auto& cas = sim.oracle.cas;
        const auto& cate = sim.oracle.cate;
        for (std::size_t i = 0; i < cas.size(); ++i) {
            rows.push_back({static_cast<double>(v), cas[i], cate[i]});
        }
        summary.push_back({static_cast<double>(v), detail::pearson(cas, cate)});
        SvgSeries series;
        series.label = variants[v].label;
        series.points_only = true;
        const std::size_t keep = std::min<std::size_t>(cas.size(), 1500);
        series.x.assign(cas.begin(), cas.begin() + static_cast<std::ptrdiff_t>(keep));
        series.y.assign(cate.begin(), cate.begin() + static_cast<std::ptrdiff_t>(keep));
        chart.series.push_back(series);
    }
    const auto csv = out_path(flags, "fig7.csv");
    detail::write_table_csv(csv, "variant,cas,cate", rows);
    const auto summary_csv = out_path(flags, "fig7_summary.csv");
    detail::write_table_csv(summary_csv, "variant,pearson_corr", summary);
    const auto svg = out_path(flags, "fig7.svg");
    write_svg(render_line_svg(chart), svg);
    return {csv, summary_csv, svg};
}

inline std::vector<std::string> reproduce_fig8(const CommonFlags& flags,
                                               std::uint64_t seed) {
    const std::vector<double> rho_L_grid = {0.0, 0.2, 0.4, 0.6, 0.8};
    const std::vector<double> rho_gamma_grid = {0.0, 0.2, 0.4, 0.6, 0.8};
    std::vector<std::string> written;
    RngStream rng(seed);
    for (const std::size_t k : {std::size_t{2}, std::size_t{6}}) {
        // Grid cells run in parallel on independent substreams.
        std::vector<std::future<double>> cells;
        for (std::size_t r = 0; r < rho_L_grid.size(); ++r) {
            for (std::size_t c = 0; c < rho_gamma_grid.size(); ++c) {
                RngStream cell_rng =
                    rng.substream(k).substream(r * rho_gamma_grid.size() + c);
                cells.push_back(std::async(std::launch::async, [&, r, c, cell_rng] {
                    SurrogateConfig cfg;
                    cfg.k = k;
                    cfg.rho_L = rho_L_grid[r];
                    cfg.rho_gamma = rho_gamma_grid[c];
                    const auto sim = simulate_surrogate(cfg, flags.rows, cell_rng);
                    return detail::pearson(sim.oracle.cas, sim.oracle.cate);
                }));
            }
        }
        HeatmapGrid grid;
        grid.title = "score-lift correlation, k=" + std::to_string(k);
        grid.x_label = "loading correlation";
        grid.y_label = "latent correlation";
        grid.values = Matrix(rho_L_grid.size(), rho_gamma_grid.size());
        std::vector<std::vector<double>> rows;
        std::size_t cell = 0;
        for (std::size_t r = 0; r < rho_L_grid.size(); ++r) {
            for (std::size_t c = 0; c < rho_gamma_grid.size(); ++c) {
                const double corr = cells[cell++].get();
                grid.values(r, c) = corr;
                rows.push_back({rho_L_grid[r], rho_gamma_grid[c], corr});
            }
        }
        for (double v : rho_gamma_grid) {
            grid.x_ticks.push_back(csl::detail::tick_text(v));
        }
        for (double v : rho_L_grid) {
            grid.y_ticks.push_back(csl::detail::tick_text(v));
        }
        const std::string tag = "fig8_k" + std::to_string(k);
        const auto csv = out_path(flags, tag + ".csv");
        detail::write_table_csv(csv, "rho_L,rho_gamma,corr", rows);
        const auto svg = out_path(flags, tag + ".svg");
        write_svg(render_heatmap_svg(grid), svg);
        written.push_back(csv);
        written.push_back(svg);
    }
    return written;
}

inline std::vector<std::string> reproduce_fig9(const CommonFlags& flags, std::uint64_t) {
    const double alpha_c = 2.0;
    std::vector<std::vector<double>> rows;
    std::vector<double> psi_grid, cate_vals, catt_vals;
    for (double psi = -2.0; psi <= 2.0 + 1e-12; psi += 0.02) {
        const double beta_val = std::exp(0.8 + 0.9 * psi);
        psi_grid.push_back(psi);
        cate_vals.push_back(beta_val);
        catt_vals.push_back(catt(psi, beta_val, alpha_c));
        rows.push_back({psi, beta_val, catt_vals.back()});
    }
    const auto csv = out_path(flags, "fig9.csv");
    detail::write_table_csv(csv, "psi,cate,catt", rows);

    SvgChart chart;
    chart.title = "treated-unit lift versus population lift";
    chart.x_label = "uptake index psi";
    chart.y_label = "effect";
    chart.series = {{"cate", psi_grid, cate_vals, false},
                    {"catt", psi_grid, catt_vals, false}};
    const auto svg = out_path(flags, "fig9.svg");
    write_svg(render_line_svg(chart), svg);
    return {csv, svg};
}

inline std::vector<std::string> reproduce_thm3(const CommonFlags& flags,
                                               std::uint64_t seed) {
    // Ten units with strictly descending effects and no systematic gap; the
    // closed-form expected rank agreement is compared against simulation.
    std::vector<double> betas, alphas;
    for (int i = 0; i < 10; ++i) {
        betas.push_back(1.0 - 0.1 * i);
        alphas.push_back(0.0);
    }
    const int mc_reps = std::max(200, flags.reps * 100);
    std::vector<std::vector<double>> rows;
    std::vector<double> sd_grid, expected_vals, mc_vals;
    RngStream rng(seed);
    std::size_t cfg_id = 0;
    for (double sd = 0.05; sd <= 1.5 + 1e-12; sd += 0.05) {
        const auto model = RankNoiseModel::from_units(betas, alphas, sd);
        const double expected = expected_tau(model);
        RngStream cfg_rng = rng.substream(cfg_id++);
        double acc = 0.0;
        for (int rep = 0; rep < mc_reps; ++rep) {
            RngStream rep_rng = cfg_rng.substream(static_cast<std::uint64_t>(rep));
            std::vector<double> estimates(betas.size());
            for (std::size_t i = 0; i < betas.size(); ++i) {
                estimates[i] = betas[i] + alphas[i] + rep_rng.normal(0.0, sd);
            }
            acc += kendall_tau_against(estimates, betas);
        }
        const double mc = acc / mc_reps;
        sd_grid.push_back(sd);
        expected_vals.push_back(expected);
        mc_vals.push_back(mc);
        rows.push_back({sd, expected, mc});
    }
    const auto csv = out_path(flags, "thm3.csv");
    detail::write_table_csv(csv, "unit_noise_sd,expected_tau,mc_tau", rows);

    SvgChart chart;
    chart.title = "expected rank agreement under estimation noise";
    chart.x_label = "per-unit noise sd";
    chart.y_label = "kendall tau";
    chart.series = {{"closed form", sd_grid, expected_vals, false},
                    {"monte carlo", sd_grid, mc_vals, true}};
    const auto svg = out_path(flags, "thm3.svg");
    write_svg(render_line_svg(chart), svg);
    return {csv, svg};
}

inline std::vector<std::string> reproduce_quintile(const CommonFlags& flags,
                                                   std::uint64_t seed) {
    NudgeConfig cfg;
    cfg.mu_mean = -2.5;
    cfg.mu_sd = 0.7;
    const std::size_t n = std::max<std::uint64_t>(flags.rows, 2000);
    auto sim = simulate_nudge(cfg, n, RngStream(seed).substream(0));
    const std::size_t train_count = n / 2;
    const auto parts = detail::split_for_eval(sim.dataset, &sim.oracle.cate, train_count,
                                              RngStream(seed).substream(1));

    BaseLearnerConfig base;
    const auto model = fit(ScoreKind::outcome_rate, parts.train, base);
    const auto scores = model.predict(parts.test);
    const auto summary = quintile_bias(parts.test, scores, parts.test_cate);

    std::vector<std::vector<double>> rows;
    std::vector<double> quintiles, mean_scores, mean_effects;
    for (std::size_t q = 0; q < 5; ++q) {
        quintiles.push_back(static_cast<double>(q + 1));
        mean_scores.push_back(summary.mean_score[q]);
        mean_effects.push_back(summary.mean_effect[q]);
        rows.push_back({quintiles.back(), summary.mean_score[q], summary.mean_effect[q],
                        summary.bias[q]});
    }
    const auto csv = out_path(flags, "quintile.csv");
    detail::write_table_csv(csv, "quintile,mean_score,mean_effect,bias", rows);

    SvgChart chart;
    chart.title = "per-quintile score versus realized lift";
    chart.x_label = "score quintile";
    chart.y_label = "value";
    chart.series = {{"mean score", quintiles, mean_scores, false},
                    {"mean effect", quintiles, mean_effects, false}};
    const auto svg = out_path(flags, "quintile.svg");
    write_svg(render_line_svg(chart), svg);
    return {csv, svg};
}

inline int cmd_reproduce(const std::string& figure, const CommonFlags& flags) {
    const std::uint64_t seed = resolve_seed(flags.seed);
    ensure_out_dir(flags.out_dir);
    std::vector<std::string> written;
    if (figure == "fig5") {
        written = reproduce_fig5(flags, seed);
    } else if (figure == "fig6") {
        written = reproduce_fig6(flags, seed);
    } else if (figure == "fig7") {
        written = reproduce_fig7(flags, seed);
    } else if (figure == "fig8") {
        written = reproduce_fig8(flags, seed);
    } else if (figure == "fig9") {
        written = reproduce_fig9(flags, seed);
    } else if (figure == "thm3") {
        written = reproduce_thm3(flags, seed);
    } else if (figure == "quintile") {
        written = reproduce_quintile(flags, seed);
    } else {
        throw UnknownFigure("'" + figure +
                            "' (known: fig5 fig6 fig7 fig8 fig9 thm3 quintile)");
    }
    for (const auto& p : written) {
        std::cout << "wrote: " << p << '\n';
    }
    return 0;
}

// ---- check ----

inline int cmd_check(const CommonFlags& flags) {
    if (flags.config_path.empty()) {
        throw InvalidConfig("check needs --config naming the score/effect files");
    }
    nlohmann::json config = load_config(flags.config_path);
    if (!config.contains("scores") || !config.contains("effects")) {
        throw InvalidConfig("check config needs 'scores' and 'effects' sections");
    }
    auto read_series = [](const nlohmann::json& section, const char* fallback_column) {
        if (!section.contains("path")) {
            throw InvalidConfig("series section needs a 'path'");
        }
        const std::string column = section.value("column", std::string(fallback_column));
        return load_column_csv(section["path"].get<std::string>(), column);
    };
    const auto scores = read_series(config["scores"], "score");
    const auto effects = read_series(config["effects"], "effect");
    if (scores.size() != effects.size()) {
        throw MisalignedInputs("scores (" + std::to_string(scores.size()) +
                               ") vs effects (" + std::to_string(effects.size()) + ")");
    }

    const double tau =
        config.contains("tau") ? config["tau"].get<double>() : detail::median(effects);
    config["tau"] = tau;

    EvaluationReport report;
    report.seed = resolve_seed(flags.seed);
    report.timestamp = current_timestamp();
    report.config = config;
    report.verdicts["eo"] = check_eo(scores, effects);
    report.verdicts["ec"] = check_ec(scores, effects, tau);
    report.metrics["kendall_tau"] = kendall_tau_against(scores, effects);

    ensure_out_dir(flags.out_dir);
    const auto path = out_path(flags, "verdicts.json");
    write_report(report, path);

    for (const auto& [name, verdict] : report.verdicts) {
        std::cout << name << ": valid=" << (verdict.valid ? "true" : "false")
                  << " violations=" << verdict.violations;
        if (verdict.kind == Interpretation::eo) {
            std::cout << " ties=" << verdict.ties;
        }
        if (verdict.threshold_interval) {
            std::cout << " threshold_interval=[" << verdict.threshold_interval->low << ", "
                      << verdict.threshold_interval->high << ")";
        }
        std::cout << '\n';
    }
    std::cout << "wrote: " << path << '\n';
    return 0;
}

// ---- entry point ----

inline int run(int argc, char** argv) {
    CLI::App app{"causal scoring laboratory: simulate, score, validate, evaluate"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::uint64_t seed_value = 0;
    std::string figure;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", flags.config_path, "JSON config file");
        auto* seed_opt = sub->add_option("--seed", seed_value,
                                         "rng seed (fallback: env CSL_SEED, then " +
                                             std::to_string(kDefaultSeed) + ")");
        sub->add_option("--out", flags.out_dir, "output directory")
            ->capture_default_str();
        sub->add_option("--reps", flags.reps, "replication count")
            ->capture_default_str();
        sub->add_option("--rows", flags.rows, "row count for simulated data")
            ->capture_default_str();
        return seed_opt;
    };

    auto* simulate_cmd =
        app.add_subcommand("simulate", "generate a synthetic experiment with oracle truth");
    auto* simulate_seed = add_common(simulate_cmd);
    auto* evaluate_cmd = app.add_subcommand(
        "evaluate", "fit scoring models over replicated splits and report uplift metrics");
    auto* evaluate_seed = add_common(evaluate_cmd);
    auto* reproduce_cmd =
        app.add_subcommand("reproduce", "regenerate a reference figure or table");
    reproduce_cmd
        ->add_option("figure", figure, "one of: fig5 fig6 fig7 fig8 fig9 thm3 quintile")
        ->required();
    auto* reproduce_seed = add_common(reproduce_cmd);
    auto* check_cmd = app.add_subcommand(
        "check", "interpretation verdicts for a score/effect column pair");
    auto* check_seed = add_common(check_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (app.got_subcommand(simulate_cmd)) {
            if (simulate_seed->count()) flags.seed = seed_value;
            return cmd_simulate(flags);
        }
        if (app.got_subcommand(evaluate_cmd)) {
            if (evaluate_seed->count()) flags.seed = seed_value;
            return cmd_evaluate(flags);
        }
        if (app.got_subcommand(reproduce_cmd)) {
            if (reproduce_seed->count()) flags.seed = seed_value;
            return cmd_reproduce(figure, flags);
        }
        if (check_seed->count()) flags.seed = seed_value;
        return cmd_check(flags);
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "unexpected failure: " << e.what() << '\n';
        return 1;
    }
}

} // namespace csl::cli
