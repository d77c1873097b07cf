#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

#include "csl/dataset.hpp"
#include "csl/dgp.hpp"
#include "csl/errors.hpp"
#include "csl/interpret.hpp"
#include "csl/metrics.hpp"
#include "csl/rng.hpp"
#include "csl/version.hpp"

namespace csl {

// ---- CSV ingestion ----

struct CsvSchema {
    // Empty feature list turns on autodiscovery: every header column named
    // f<number> becomes a feature, in header order.
    std::vector<std::string> feature_columns;
    std::string treatment_column = "treatment";
    std::string outcome_column = "conversion";
    std::optional<std::string> surrogate_column;

    static CsvSchema criteo(const std::string& outcome = "conversion",
                            std::optional<std::string> surrogate = std::string("visit")) {
        CsvSchema s;
        s.outcome_column = outcome;
        s.surrogate_column = std::move(surrogate);
        return s;
    }
};

namespace detail {

// RFC-4180-style field split: comma delimited, double quotes with ""
// escapes. line_no is 1-based and counts the header as line 1.
inline void split_csv_line(const std::string& line, std::size_t line_no,
                           std::vector<std::string>& fields) {
    fields.clear();
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) {
        throw MalformedRow("line " + std::to_string(line_no) + ": unterminated quote");
    }
    fields.push_back(std::move(cur));
}

inline double parse_number(const std::string& field, std::size_t line_no,
                           const std::string& column) {
    double v = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end || field.empty()) {
        throw MalformedRow("line " + std::to_string(line_no) + ": column '" + column +
                           "' has non-numeric value '" + field + "'");
    }
    return v;
}

inline bool looks_like_feature_name(const std::string& name) {
    if (name.size() < 2 || name[0] != 'f') {
        return false;
    }
    for (std::size_t i = 1; i < name.size(); ++i) {
        if (name[i] < '0' || name[i] > '9') {
            return false;
        }
    }
    return true;
}

} // namespace detail

inline ExperimentDataset load_csv(const std::string& path, const CsvSchema& schema,
                                  std::optional<std::size_t> row_limit = std::nullopt) {
    std::ifstream in(path);
    if (!in) {
        throw IoFailure("cannot open '" + path + "' for reading");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw MalformedRow("line 1: empty file, header expected");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    std::vector<std::string> header;
    detail::split_csv_line(line, 1, header);

    std::map<std::string, std::size_t> index;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (!index.emplace(header[j], j).second) {
            throw MalformedRow("line 1: duplicate header column '" + header[j] + "'");
        }
    }

    std::vector<std::string> feature_names = schema.feature_columns;
    if (feature_names.empty()) {
        for (const auto& name : header) {
            if (detail::looks_like_feature_name(name)) {
                feature_names.push_back(name);
            }
        }
        if (feature_names.empty()) {
            throw MissingColumn("no f<number> feature columns found in header");
        }
    }
    {
        std::map<std::string, int> seen;
        for (const auto& name : feature_names) {
            if (++seen[name] > 1) {
                throw InvalidConfig("schema repeats column '" + name + "'");
            }
        }
        if (++seen[schema.treatment_column] > 1 || ++seen[schema.outcome_column] > 1 ||
            (schema.surrogate_column && ++seen[*schema.surrogate_column] > 1)) {
            throw InvalidConfig("schema column names must be distinct");
        }
    }

    auto column_at = [&](const std::string& name) {
        const auto it = index.find(name);
        if (it == index.end()) {
            throw MissingColumn("column '" + name + "' not in header");
        }
        return it->second;
    };
    std::vector<std::size_t> feature_idx;
    feature_idx.reserve(feature_names.size());
    for (const auto& name : feature_names) {
        feature_idx.push_back(column_at(name));
    }
    const std::size_t treatment_idx = column_at(schema.treatment_column);
    const std::size_t outcome_idx = column_at(schema.outcome_column);
    std::optional<std::size_t> surrogate_idx;
    if (schema.surrogate_column) {
        surrogate_idx = column_at(*schema.surrogate_column);
    }

    std::vector<std::vector<double>> columns(feature_names.size());
    std::vector<std::uint8_t> treatment;
    std::vector<double> outcome;
    std::vector<double> surrogate;

    std::vector<std::string> fields;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() && in.peek() == std::char_traits<char>::eof()) {
            break; // trailing newline
        }
        detail::split_csv_line(line, line_no, fields);
        if (fields.size() != header.size()) {
            throw MalformedRow("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(header.size()) + " fields, got " +
                               std::to_string(fields.size()));
        }
        const double t = detail::parse_number(fields[treatment_idx], line_no,
                                              schema.treatment_column);
        if (t != 0.0 && t != 1.0) {
            throw NonBinaryTreatment("line " + std::to_string(line_no) +
                                     ": treatment value '" + fields[treatment_idx] + "'");
        }
        treatment.push_back(t == 1.0 ? 1 : 0);
        outcome.push_back(
            detail::parse_number(fields[outcome_idx], line_no, schema.outcome_column));
        if (surrogate_idx) {
            surrogate.push_back(detail::parse_number(fields[*surrogate_idx], line_no,
                                                     *schema.surrogate_column));
        }
        for (std::size_t j = 0; j < feature_idx.size(); ++j) {
            columns[j].push_back(
                detail::parse_number(fields[feature_idx[j]], line_no, feature_names[j]));
        }
        if (row_limit && treatment.size() >= *row_limit) {
            break;
        }
    }
    std::optional<std::vector<double>> surr;
    if (surrogate_idx) {
        surr = std::move(surrogate);
    }
    return ExperimentDataset(std::move(columns), std::move(treatment), std::move(outcome),
                             std::move(surr), std::move(feature_names));
}

// ---- Train/test split ----

namespace detail {

inline ExperimentDataset gather_rows(const ExperimentDataset& ds,
                                     const std::vector<std::size_t>& idx) {
    std::vector<std::vector<double>> cols(ds.feature_count());
    for (std::size_t j = 0; j < ds.feature_count(); ++j) {
        cols[j].reserve(idx.size());
        for (std::size_t i : idx) {
            cols[j].push_back(ds.feature(j)[i]);
        }
    }
    std::vector<std::uint8_t> t;
    std::vector<double> y;
    t.reserve(idx.size());
    y.reserve(idx.size());
    for (std::size_t i : idx) {
        t.push_back(ds.treatment()[i]);
        y.push_back(ds.outcome()[i]);
    }
    std::optional<std::vector<double>> s;
    if (ds.has_surrogate()) {
        s.emplace();
        s->reserve(idx.size());
        for (std::size_t i : idx) {
            s->push_back(ds.surrogate()[i]);
        }
    }
    return ExperimentDataset(std::move(cols), std::move(t), std::move(y), std::move(s),
                             ds.feature_names());
}

} // namespace detail

// Disjoint uniform-random partition via a Fisher-Yates shuffle of the row
// indices; fully determined by the rng stream.
inline std::pair<ExperimentDataset, ExperimentDataset> split(const ExperimentDataset& ds,
                                                             std::size_t train_count,
                                                             RngStream rng) {
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
    std::vector<std::size_t> train_idx(perm.begin(),
                                       perm.begin() + static_cast<std::ptrdiff_t>(train_count));
    std::vector<std::size_t> test_idx(perm.begin() + static_cast<std::ptrdiff_t>(train_count),
                                      perm.end());
    return {detail::gather_rows(ds, train_idx), detail::gather_rows(ds, test_idx)};
}

// ---- Report persistence ----

struct EvaluationReport {
    int format_version = 1;
    std::string tool_version = kVersion;
    std::string timestamp; // excluded from the determinism contract
    std::uint64_t seed = 0;
    nlohmann::json config = nlohmann::json::object();
    std::map<std::string, double> metrics;
    std::map<std::string, UpliftCurve> curves;
    std::map<std::string, InterpretationVerdict> verdicts;
};

namespace detail {

inline nlohmann::json curve_to_json(const UpliftCurve& c) {
    return {{"kind", c.kind == CurveKind::qini ? "qini" : "profit"},
            {"fractions", c.fractions},
            {"values", c.values}};
}

inline UpliftCurve curve_from_json(const nlohmann::json& j) {
    UpliftCurve c;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "qini") {
        c.kind = CurveKind::qini;
    } else if (kind == "profit") {
        c.kind = CurveKind::profit;
    } else {
        throw IoFailure("unknown curve kind '" + kind + "'");
    }
    c.fractions = j.at("fractions").get<std::vector<double>>();
    c.values = j.at("values").get<std::vector<double>>();
    return c;
}

inline nlohmann::json verdict_to_json(const InterpretationVerdict& v) {
    nlohmann::json j{{"kind", to_string(v.kind)},
                     {"valid", v.valid},
                     {"violations", v.violations},
                     {"ties", v.ties}};
    if (v.threshold_interval) {
        nlohmann::json iv = nlohmann::json::object();
        if (std::isfinite(v.threshold_interval->low)) {
            iv["low"] = v.threshold_interval->low;
        }
        if (std::isfinite(v.threshold_interval->high)) {
            iv["high"] = v.threshold_interval->high;
        }
        j["threshold_interval"] = iv;
    }
    return j;
}

inline InterpretationVerdict verdict_from_json(const nlohmann::json& j) {
    InterpretationVerdict v;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "EE") {
        v.kind = Interpretation::ee;
    } else if (kind == "EO") {
        v.kind = Interpretation::eo;
    } else if (kind == "EC") {
        v.kind = Interpretation::ec;
    } else {
        throw IoFailure("unknown verdict kind '" + kind + "'");
    }
    v.valid = j.at("valid").get<bool>();
    v.violations = j.at("violations").get<std::uint64_t>();
    v.ties = j.at("ties").get<std::uint64_t>();
    if (j.contains("threshold_interval")) {
        ThresholdInterval iv;
        iv.low = j["threshold_interval"].value("low",
                                               -std::numeric_limits<double>::infinity());
        iv.high = j["threshold_interval"].value("high",
                                                std::numeric_limits<double>::infinity());
        v.threshold_interval = iv;
    }
    return v;
}

} // namespace detail

inline nlohmann::json report_to_json(const EvaluationReport& r) {
    nlohmann::json j{{"format_version", r.format_version},
                     {"tool_version", r.tool_version},
                     {"timestamp", r.timestamp},
                     {"seed", r.seed},
                     {"config", r.config},
                     {"metrics", r.metrics}};
    nlohmann::json curves = nlohmann::json::object();
    for (const auto& [name, curve] : r.curves) {
        curves[name] = detail::curve_to_json(curve);
    }
    j["curves"] = curves;
    nlohmann::json verdicts = nlohmann::json::object();
    for (const auto& [name, verdict] : r.verdicts) {
        verdicts[name] = detail::verdict_to_json(verdict);
    }
    j["verdicts"] = verdicts;
    return j;
}

inline void write_report(const EvaluationReport& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoFailure("cannot open '" + path + "' for writing");
    }
    out << report_to_json(r).dump(2) << '\n';
    if (!out.good()) {
        throw IoFailure("failed writing '" + path + "'");
    }
}

inline EvaluationReport read_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoFailure("cannot open '" + path + "' for reading");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoFailure("invalid JSON in '" + path + "': " + e.what());
    }
    EvaluationReport r;
    try {
        r.format_version = j.at("format_version").get<int>();
        if (r.format_version != 1) {
            throw SchemaVersionMismatch("report format_version " +
                                        std::to_string(r.format_version) +
                                        ", this build reads version 1");
        }
        r.tool_version = j.at("tool_version").get<std::string>();
        r.timestamp = j.value("timestamp", std::string{});
        r.seed = j.value("seed", std::uint64_t{0});
        r.config = j.value("config", nlohmann::json::object());
        r.metrics = j.value("metrics", std::map<std::string, double>{});
        const nlohmann::json curves = j.value("curves", nlohmann::json::object());
        for (const auto& [name, cj] : curves.items()) {
            r.curves[name] = detail::curve_from_json(cj);
        }
        const nlohmann::json verdicts = j.value("verdicts", nlohmann::json::object());
        for (const auto& [name, vj] : verdicts.items()) {
            r.verdicts[name] = detail::verdict_from_json(vj);
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoFailure("report '" + path + "' is structurally invalid: " + e.what());
    }
    return r;
}

// Equality modulo the timestamp, for the round-trip contract.
inline bool reports_equivalent(const EvaluationReport& a, const EvaluationReport& b) {
    auto strip = [](const EvaluationReport& r) {
        nlohmann::json j = report_to_json(r);
        j.erase("timestamp");
        return j;
    };
    return strip(a) == strip(b);
}

// ---- DGP configuration as JSON ----

namespace detail {

inline nlohmann::json table_to_json(const MonotoneTable& t) {
    return {{"x", t.knots_x()}, {"y", t.knots_y()}};
}

inline MonotoneTable table_from_json(const nlohmann::json& j) {
    return MonotoneTable(j.at("x").get<std::vector<double>>(),
                         j.at("y").get<std::vector<double>>());
}

} // namespace detail

inline nlohmann::json dgp_to_json(const DgpSpec& spec) {
    return std::visit(
        [](const auto& cfg) -> nlohmann::json {
            using T = std::decay_t<decltype(cfg)>;
            if constexpr (std::is_same_v<T, NudgeConfig>) {
                nlohmann::json j{{"family", "nudge"},
                                 {"delta", cfg.delta},
                                 {"mu_mean", cfg.mu_mean},
                                 {"mu_sd", cfg.mu_sd},
                                 {"noise", cfg.noise == NudgeNoise::logistic ? "logistic"
                                                                             : "probit"}};
                if (cfg.heterogeneous) {
                    j["heterogeneous"] = {{"eta", cfg.heterogeneous->eta},
                                          {"rho", cfg.heterogeneous->rho},
                                          {"delta_mean", cfg.heterogeneous->delta_mean}};
                }
                return j;
            } else if constexpr (std::is_same_v<T, SurrogateConfig>) {
                return {{"family", "surrogate"},
                        {"k", cfg.k},
                        {"rho_L", cfg.rho_L},
                        {"rho_gamma", cfg.rho_gamma}};
            } else if constexpr (std::is_same_v<T, SelfSelectionConfig>) {
                nlohmann::json j{{"family", "self_selection"},
                                 {"alpha_y", cfg.alpha_y},
                                 {"alpha_c", cfg.alpha_c},
                                 {"zeta", cfg.zeta},
                                 {"psi", cfg.psi},
                                 {"noise_sd_y", cfg.noise_sd_y},
                                 {"noise_sd_c", cfg.noise_sd_c}};
                if (cfg.beta_fn.table) {
                    j["beta"] = {{"table", detail::table_to_json(*cfg.beta_fn.table)}};
                } else {
                    j["beta"] = {{"b0", cfg.beta_fn.b0}, {"b1", cfg.beta_fn.b1}};
                }
                return j;
            } else {
                return {{"family", "generic_latent"},
                        {"g", detail::table_to_json(cfg.g)},
                        {"h", detail::table_to_json(cfg.h)},
                        {"mu_mean", cfg.mu_mean},
                        {"mu_sd", cfg.mu_sd},
                        {"outcome_noise_sd", cfg.outcome_noise_sd}};
            }
        },
        spec);
}

inline DgpSpec dgp_from_json(const nlohmann::json& j) {
    std::string family;
    try {
        family = j.at("family").get<std::string>();
        if (family == "nudge") {
            NudgeConfig cfg;
            cfg.delta = j.value("delta", cfg.delta);
            cfg.mu_mean = j.value("mu_mean", cfg.mu_mean);
            cfg.mu_sd = j.value("mu_sd", cfg.mu_sd);
            const std::string noise = j.value("noise", std::string("logistic"));
            if (noise == "probit") {
                cfg.noise = NudgeNoise::probit;
            } else if (noise != "logistic") {
                throw InvalidConfig("unknown nudge noise '" + noise + "'");
            }
            if (j.contains("heterogeneous")) {
                const auto& h = j["heterogeneous"];
                HeterogeneousNudge het;
                het.eta = h.value("eta", het.eta);
                het.rho = h.value("rho", het.rho);
                het.delta_mean = h.value("delta_mean", het.delta_mean);
                cfg.heterogeneous = het;
            }
            return cfg;
        }
        if (family == "surrogate") {
            SurrogateConfig cfg;
            cfg.k = j.value("k", cfg.k);
            cfg.rho_L = j.value("rho_L", cfg.rho_L);
            cfg.rho_gamma = j.value("rho_gamma", cfg.rho_gamma);
            return cfg;
        }
        if (family == "self_selection") {
            SelfSelectionConfig cfg;
            cfg.alpha_y = j.value("alpha_y", cfg.alpha_y);
            cfg.alpha_c = j.value("alpha_c", cfg.alpha_c);
            cfg.zeta = j.value("zeta", cfg.zeta);
            cfg.psi = j.value("psi", cfg.psi);
            cfg.noise_sd_y = j.value("noise_sd_y", cfg.noise_sd_y);
            cfg.noise_sd_c = j.value("noise_sd_c", cfg.noise_sd_c);
            if (j.contains("beta")) {
                const auto& b = j["beta"];
                if (b.contains("table")) {
                    cfg.beta_fn.table = detail::table_from_json(b["table"]);
                } else {
                    cfg.beta_fn.b0 = b.value("b0", cfg.beta_fn.b0);
                    cfg.beta_fn.b1 = b.value("b1", cfg.beta_fn.b1);
                }
            }
            return cfg;
        }
        if (family == "generic_latent") {
            GenericLatentConfig cfg;
            if (j.contains("g")) {
                cfg.g = detail::table_from_json(j["g"]);
            }
            if (j.contains("h")) {
                cfg.h = detail::table_from_json(j["h"]);
            }
            cfg.mu_mean = j.value("mu_mean", cfg.mu_mean);
            cfg.mu_sd = j.value("mu_sd", cfg.mu_sd);
            cfg.outcome_noise_sd = j.value("outcome_noise_sd", cfg.outcome_noise_sd);
            return cfg;
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfig("malformed dgp config: " + std::string(e.what()));
    }
    throw InvalidConfig("unknown dgp family '" + family + "'");
}

// ---- CSV export ----

namespace detail {

inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

inline void export_curve_csv(const UpliftCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoFailure("cannot open '" + path + "' for writing");
    }
    out << "fraction,value\n";
    for (std::size_t g = 0; g < curve.fractions.size(); ++g) {
        out << detail::format_number(curve.fractions[g]) << ','
            << detail::format_number(curve.values[g]) << '\n';
    }
    if (!out.good()) {
        throw IoFailure("failed writing '" + path + "'");
    }
}

inline void export_dataset_csv(const ExperimentDataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoFailure("cannot open '" + path + "' for writing");
    }
    for (const auto& name : ds.feature_names()) {
        out << name << ',';
    }
    out << "treatment,outcome";
    if (ds.has_surrogate()) {
        out << ",surrogate";
    }
    out << '\n';
    for (std::size_t i = 0; i < ds.n(); ++i) {
        for (std::size_t j = 0; j < ds.feature_count(); ++j) {
            out << detail::format_number(ds.feature(j)[i]) << ',';
        }
        out << int(ds.treatment()[i]) << ',' << detail::format_number(ds.outcome()[i]);
        if (ds.has_surrogate()) {
            out << ',' << detail::format_number(ds.surrogate()[i]);
        }
        out << '\n';
    }
    if (!out.good()) {
        throw IoFailure("failed writing '" + path + "'");
    }
}

inline void export_oracle_csv(const OracleTruth& oracle, std::size_t n,
                              const std::string& path) {
    oracle.validate(n);
    std::ofstream out(path);
    if (!out) {
        throw IoFailure("cannot open '" + path + "' for writing");
    }
    std::vector<std::pair<const char*, const std::vector<double>*>> cols;
    if (!oracle.cate.empty()) cols.emplace_back("cate", &oracle.cate);
    if (!oracle.cas.empty()) cols.emplace_back("cas", &oracle.cas);
    if (!oracle.latent_mean.empty()) cols.emplace_back("latent_mean", &oracle.latent_mean);
    if (!oracle.y0.empty()) cols.emplace_back("y0", &oracle.y0);
    if (!oracle.y1.empty()) cols.emplace_back("y1", &oracle.y1);
    for (std::size_t c = 0; c < cols.size(); ++c) {
        out << (c ? "," : "") << cols[c].first;
    }
    out << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            out << (c ? "," : "") << detail::format_number((*cols[c].second)[i]);
        }
        out << '\n';
    }
    if (!out.good()) {
        throw IoFailure("failed writing '" + path + "'");
    }
}

// Loads two aligned single-column (or named-column) CSVs of scores and
// effects for the `check` subcommand.
inline std::vector<double> load_column_csv(const std::string& path,
                                           const std::string& column) {
    std::ifstream in(path);
    if (!in) {
        throw IoFailure("cannot open '" + path + "' for reading");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw MalformedRow("line 1: empty file, header expected");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    std::vector<std::string> header;
    detail::split_csv_line(line, 1, header);
    std::size_t idx = header.size();
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == column) {
            idx = j;
            break;
        }
    }
    if (idx == header.size()) {
        throw MissingColumn("column '" + column + "' not in header");
    }
    std::vector<double> out;
    std::vector<std::string> fields;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() && in.peek() == std::char_traits<char>::eof()) {
            break;
        }
        detail::split_csv_line(line, line_no, fields);
        if (fields.size() != header.size()) {
            throw MalformedRow("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(header.size()) + " fields, got " +
                               std::to_string(fields.size()));
        }
        out.push_back(detail::parse_number(fields[idx], line_no, column));
    }
    return out;
}

} // namespace csl
