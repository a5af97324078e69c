#include "serialize.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace regdiag::detail {

namespace {

const ojson& at(const ojson& j, const char* key) {
    if (!j.is_object()) throw std::invalid_argument(std::string("expected an object holding '") + key + "'");
    auto it = j.find(key);
    if (it == j.end()) throw std::invalid_argument(std::string("missing key '") + key + "'");
    return *it;
}

template <typename T>
T get(const ojson& j, const char* key) {
    try {
        return at(j, key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad value for '") + key + "': " + e.what());
    }
}

// nlohmann stores non-finite doubles as null; map them back to NaN.
double get_number(const ojson& j, const char* key) {
    const auto& v = at(j, key);
    if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (!v.is_number()) throw std::invalid_argument(std::string("key '") + key + "' must be a number");
    return v.get<double>();
}

}  // namespace

ojson config_json(const DiagnosisConfig& c) {
    ojson j;
    j["target_column"] = c.target_column;
    j["invariant_columns"] = c.invariant_columns;
    j["hypothesis_columns"] = c.hypothesis_columns;
    j["metric_p_threshold"] = c.metric_p_threshold;
    j["bias_p_threshold"] = c.bias_p_threshold;
    j["bias_deviation_threshold_pct"] = c.bias_deviation_threshold_pct;
    j["ranking_p_threshold"] = c.ranking_p_threshold;
    j["max_bins"] = c.max_bins;
    j["numeric_hypothesis_bins"] = c.numeric_hypothesis_bins;
    j["prune_p_threshold"] = c.prune_p_threshold;
    j["add_is_null"] = c.add_is_null;
    j["caliper_coefficient"] = c.caliper_coefficient;
    j["forest"] = {{"n_trees", c.forest.n_trees}, {"max_depth", c.forest.max_depth}, {"min_leaf", c.forest.min_leaf}};
    j["min_rows"] = c.min_rows;
    j["min_matched_fraction"] = c.min_matched_fraction;
    j["direction"] = std::string(to_string(c.direction));
    j["seed"] = c.seed;
    return j;
}

ojson test_json(const TestResult& t) {
    return {{"statistic", t.statistic}, {"dof", t.dof}, {"p_value", t.p_value}, {"significant", t.significant}};
}

TestResult parse_test(const ojson& j) {
    return {get_number(j, "statistic"), get<int>(j, "dof"), get_number(j, "p_value"), get<bool>(j, "significant")};
}

ojson comparison_json(const MetricComparison& m) {
    return {{"mean_c", m.mean_c}, {"mean_t", m.mean_t}, {"delta", m.delta}, {"test", test_json(m.test)}};
}

MetricComparison parse_comparison(const ojson& j) {
    return {get_number(j, "mean_c"), get_number(j, "mean_t"), get_number(j, "delta"), parse_test(at(j, "test"))};
}

ojson bias_json(const BiasReport& report) {
    ojson entries = ojson::array();
    for (const auto& e : report.entries) {
        ojson bins = ojson::array();
        for (const auto& b : e.bins) {
            bins.push_back({{"bin", b.bin},
                            {"occurrence_pct_c", b.occurrence_pct_c},
                            {"occurrence_pct_t", b.occurrence_pct_t}});
        }
        entries.push_back({{"feature", e.feature},
                           {"test", test_json(e.test)},
                           {"deviation_pct", e.deviation_pct},
                           {"biased", e.biased},
                           {"bins", std::move(bins)}});
    }
    return {{"any_bias", report.any_bias}, {"biased_features", report.biased_features()}, {"entries", entries}};
}

BiasReport parse_bias(const ojson& j) {
    BiasReport report;
    report.any_bias = get<bool>(j, "any_bias");
    for (const auto& e : at(j, "entries")) {
        FeatureBias fb;
        fb.feature = get<std::string>(e, "feature");
        fb.test = parse_test(at(e, "test"));
        fb.deviation_pct = get_number(e, "deviation_pct");
        fb.biased = get<bool>(e, "biased");
        for (const auto& b : at(e, "bins"))
            fb.bins.push_back({get<std::string>(b, "bin"), get_number(b, "occurrence_pct_c"),
                               get_number(b, "occurrence_pct_t")});
        report.entries.push_back(std::move(fb));
    }
    return report;
}

ojson log_json(const PreprocessLog& log) {
    ojson uninformative = ojson::array();
    for (const auto& [name, p] : log.dropped_uninformative) uninformative.push_back({{"feature", name}, {"p_value", p}});
    ojson binned = ojson::array();
    for (const auto& b : log.binned)
        binned.push_back({{"feature", b.name}, {"kept_bins", b.kept_bins}, {"other_count", b.other_count}});
    ojson j;
    j["dropped_constant"] = log.dropped_constant;
    j["dropped_uninformative"] = std::move(uninformative);
    j["binned"] = std::move(binned);
    return j;
}

PreprocessLog parse_log(const ojson& j) {
    PreprocessLog log;
    log.dropped_constant = get<std::vector<std::string>>(j, "dropped_constant");
    for (const auto& e : at(j, "dropped_uninformative"))
        log.dropped_uninformative.emplace_back(get<std::string>(e, "feature"), get_number(e, "p_value"));
    for (const auto& e : at(j, "binned"))
        log.binned.push_back({get<std::string>(e, "feature"), get<int>(e, "kept_bins"),
                              get<std::int64_t>(e, "other_count")});
    return log;
}

ojson ranking_json(const RankTable& table) {
    ojson rows = ojson::array();
    for (const auto& r : table.rows) {
        ojson row;
        row["feature"] = r.feature;
        row["fail_count_t"] = r.fail_count_t;
        row["expected_fail_t"] = r.expected_fail_t;
        row["abs_diff"] = r.abs_diff;
        row["pct_diff"] = r.pct_diff ? ojson(*r.pct_diff) : ojson(nullptr);
        row["hazard_score"] = r.hazard_score;
        row["p_value"] = r.p_value;
        rows.push_back(std::move(row));
    }
    return {{"direction", std::string(to_string(table.direction))}, {"rows", std::move(rows)}};
}

RankTable parse_ranking(const ojson& j) {
    RankTable table;
    const auto direction = get<std::string>(j, "direction");
    if (direction == "increase")
        table.direction = Direction::increase;
    else if (direction == "decrease")
        table.direction = Direction::decrease;
    else
        throw std::invalid_argument("unknown ranking direction '" + direction + "'");
    for (const auto& r : at(j, "rows")) {
        RankRow row;
        row.feature = get<std::string>(r, "feature");
        row.fail_count_t = get<std::int64_t>(r, "fail_count_t");
        row.expected_fail_t = get_number(r, "expected_fail_t");
        row.abs_diff = get_number(r, "abs_diff");
        if (const auto& pct = at(r, "pct_diff"); !pct.is_null()) row.pct_diff = get_number(r, "pct_diff");
        row.hazard_score = get_number(r, "hazard_score");
        row.p_value = get_number(r, "p_value");
        table.rows.push_back(std::move(row));
    }
    return table;
}

ojson issues_json(const std::vector<Issue>& issues) {
    ojson out = ojson::array();
    for (const auto& i : issues) out.push_back({{"code", i.code}, {"message", i.message}});
    return out;
}

std::vector<Issue> parse_issues(const ojson& j) {
    if (!j.is_array()) throw std::invalid_argument("warnings must be an array");
    std::vector<Issue> issues;
    for (const auto& i : j) issues.push_back({get<std::string>(i, "code"), get<std::string>(i, "message")});
    return issues;
}

ojson report_json(const DiagnosisReport& r) {
    ojson j;
    j["report_version"] = 1;
    j["classification"] = std::string(to_string(r.classification));
    j["comparison_raw"] = comparison_json(r.comparison_raw);
    j["comparison_normalized"] = r.comparison_normalized ? comparison_json(*r.comparison_normalized) : ojson(nullptr);
    j["bias"] = r.bias ? bias_json(*r.bias) : ojson(nullptr);
    if (r.normalization) {
        j["normalization"] = {{"n_pairs", r.normalization->n_pairs},
                              {"bin_width", r.normalization->bin_width},
                              {"matched_fraction", r.normalization->matched_fraction},
                              {"residual_bias", bias_json(r.normalization->residual_bias)}};
    } else {
        j["normalization"] = nullptr;
    }
    j["residual_bias_warning"] = r.residual_bias_warning;
    j["ranking"] = r.ranking ? ranking_json(*r.ranking) : ojson(nullptr);
    j["preprocess_log"] = log_json(r.preprocess_log);
    j["config_echo"] = config_json(r.config_echo);
    j["warnings"] = issues_json(r.warnings);
    return j;
}

DiagnosisReport parse_report(const ojson& j) {
    if (get<int>(j, "report_version") != 1) throw std::invalid_argument("unsupported report_version");
    DiagnosisReport r;
    r.classification = classification_from_string(get<std::string>(j, "classification"));
    r.comparison_raw = parse_comparison(at(j, "comparison_raw"));
    if (const auto& n = at(j, "comparison_normalized"); !n.is_null()) r.comparison_normalized = parse_comparison(n);
    if (const auto& b = at(j, "bias"); !b.is_null()) r.bias = parse_bias(b);
    if (const auto& n = at(j, "normalization"); !n.is_null()) {
        r.normalization = NormalizationSummary{get<std::size_t>(n, "n_pairs"), get_number(n, "bin_width"),
                                               get_number(n, "matched_fraction"), parse_bias(at(n, "residual_bias"))};
    }
    r.residual_bias_warning = get<bool>(j, "residual_bias_warning");
    if (const auto& k = at(j, "ranking"); !k.is_null()) r.ranking = parse_ranking(k);
    r.preprocess_log = parse_log(at(j, "preprocess_log"));
    r.config_echo = parse_config(at(j, "config_echo").dump());
    r.warnings = parse_issues(at(j, "warnings"));
    return r;
}

}  // namespace regdiag::detail
