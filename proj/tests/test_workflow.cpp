#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "regdiag/errors.hpp"
#include "regdiag/report.hpp"
#include "regdiag/synth.hpp"
#include "regdiag/workflow.hpp"
#include "support.hpp"

using namespace regdiag;
using namespace support;

namespace {

std::vector<std::int8_t> failures(int fails, int total) {
    std::vector<std::int8_t> y(static_cast<std::size_t>(total), 0);
    std::fill(y.begin(), y.begin() + fails, 1);
    return y;
}

// Segment-level spec with equal weights and the given hypotheses.
ScenarioSpec two_segment_spec(std::uint64_t seed, std::int64_t n_rows, std::vector<HypothesisSpec> hypotheses) {
    ScenarioSpec spec;
    spec.invariant_names = {"region"};
    spec.segments = {{{"north"}, 0.05, 0.5, 0.5}, {{"south"}, 0.08, 0.5, 0.5}};
    spec.hypotheses = std::move(hypotheses);
    spec.n_rows_c = n_rows;
    spec.n_rows_t = n_rows;
    spec.seed = seed;
    return spec;
}

void expect_invariants(const DiagnosisReport& r) {
    EXPECT_DOUBLE_EQ(r.comparison_raw.delta, r.comparison_raw.mean_t - r.comparison_raw.mean_c);
    switch (r.classification) {
        case Classification::TypeB:
            ASSERT_TRUE(r.bias.has_value());
            ASSERT_TRUE(r.comparison_normalized.has_value());
            EXPECT_FALSE(r.comparison_normalized->test.significant);
            EXPECT_FALSE(r.ranking.has_value());
            break;
        case Classification::TypeS:
            EXPECT_TRUE(r.ranking.has_value());
            EXPECT_TRUE(r.comparison_raw.test.significant);
            break;
        case Classification::NoChange:
            EXPECT_FALSE(r.comparison_raw.test.significant);
            EXPECT_FALSE(r.ranking.has_value());
            break;
        case Classification::InsufficientData:
            EXPECT_FALSE(r.ranking.has_value());
            break;
    }
}

}  // namespace

TEST(CompareMetric, HandOracle) {
    const Dataset c("c", {bin("fail", failures(10, 100))});
    const Dataset t("t", {bin("fail", failures(30, 100))});
    const MetricComparison m = compare_metric(c, t, "fail", 0.05);
    EXPECT_DOUBLE_EQ(m.mean_c, 0.1);
    EXPECT_DOUBLE_EQ(m.mean_t, 0.3);
    EXPECT_NEAR(m.delta, 0.2, 1e-15);
    EXPECT_NEAR(m.test.statistic, 12.5, 1e-9);
    EXPECT_TRUE(m.test.significant);
}

TEST(CompareMetric, IdenticalAndNulls) {
    auto y = failures(10, 100);
    y[50] = -1;
    y[0] = -1;
    const Dataset c("c", {bin("fail", y)});
    const MetricComparison m = compare_metric(c, c, "fail", 0.05);
    EXPECT_EQ(m.delta, 0.0);
    EXPECT_DOUBLE_EQ(m.test.p_value, 1.0);
    EXPECT_FALSE(m.test.significant);
    EXPECT_DOUBLE_EQ(m.mean_c, 9.0 / 98.0);
}

TEST(CompareMetric, ThresholdIsStrict) {
    const Dataset c("c", {bin("fail", failures(10, 100))});
    const Dataset t("t", {bin("fail", failures(30, 100))});
    const double p = compare_metric(c, t, "fail", 0.05).test.p_value;
    EXPECT_FALSE(compare_metric(c, t, "fail", p).test.significant);
    EXPECT_TRUE(compare_metric(c, t, "fail", std::nextafter(p, 1.0)).test.significant);
}

TEST(CompareMetric, AllNullTargetThrows) {
    const Dataset c("c", {bin("fail", {-1, -1})});
    const Dataset t("t", {bin("fail", {0, 1})});
    EXPECT_THROW(compare_metric(c, t, "fail", 0.05), std::domain_error);
    EXPECT_THROW(compare_metric(t, c, "fail", 0.05), std::domain_error);
}

TEST(Classification, StringRoundTrip) {
    for (auto c : {Classification::NoChange, Classification::TypeB, Classification::TypeS,
                   Classification::InsufficientData}) {
        EXPECT_EQ(classification_from_string(to_string(c)), c);
    }
    EXPECT_THROW(classification_from_string("TypeX"), std::invalid_argument);
}

TEST(Diagnose, IdenticalDatasetsAreNoChange) {
    const Scenario s = generate_scenario(null_scenario(1, 5000));
    const DiagnosisReport r = diagnose(s.control, s.control, config_for(null_scenario(1, 5000), {}));
    EXPECT_EQ(r.classification, Classification::NoChange);
    EXPECT_EQ(r.comparison_raw.delta, 0.0);
    EXPECT_FALSE(r.bias.has_value());
    expect_invariants(r);
}

TEST(Diagnose, SmallDatasetsAreInsufficientData) {
    const ScenarioSpec spec = systemic_scenario(2, 500);
    const Scenario s = generate_scenario(spec);
    const DiagnosisReport r = diagnose(s.control, s.treatment, config_for(spec, {}));
    EXPECT_EQ(r.classification, Classification::InsufficientData);
    EXPECT_FALSE(r.ranking.has_value());
    ASSERT_FALSE(r.warnings.empty());
    EXPECT_EQ(r.warnings[0].code, "insufficient_rows");
    EXPECT_GT(r.comparison_raw.mean_c, 0.0);
}

TEST(Diagnose, PopulationShiftIsTypeB) {
    const ScenarioSpec spec = bias_only_scenario(3, 20000);
    const Scenario s = generate_scenario(spec);
    const DiagnosisReport r = diagnose(s.control, s.treatment, config_for(spec, {}));
    EXPECT_TRUE(r.comparison_raw.test.significant);
    ASSERT_EQ(r.classification, Classification::TypeB);
    ASSERT_TRUE(r.bias.has_value());
    EXPECT_TRUE(r.bias->any_bias);
    EXPECT_EQ(r.bias->entries.front().feature, "region");
    ASSERT_TRUE(r.normalization.has_value());
    EXPECT_GT(r.normalization->n_pairs, 0u);
    expect_invariants(r);
}

TEST(Diagnose, SystemicScenarioRanksInjectedFeature) {
    const ScenarioSpec spec = systemic_scenario(4, 20000);
    const Scenario s = generate_scenario(spec);
    ASSERT_EQ(s.truth.injected_features.size(), 1u);
    const DiagnosisReport r = diagnose(s.control, s.treatment, config_for(spec, {}));
    ASSERT_EQ(r.classification, Classification::TypeS);
    ASSERT_TRUE(r.ranking.has_value());
    ASSERT_FALSE(r.ranking->rows.empty());
    EXPECT_EQ(r.ranking->rows[0].feature, s.truth.injected_features[0] + "=1");
    expect_invariants(r);
}

TEST(Diagnose, ScreenShareRegressionIsTopRanked) {
    // Failure rate raised only on calls that share the screen.
    const ScenarioSpec spec = two_segment_spec(5, 20000,
                                               {{"screen_share", {0.3}, 2.5},
                                                {"video", {0.6}, 1.0},
                                                {"bluetooth_headset", {0.2}, 1.0},
                                                {"wifi", {0.7}, 1.0}});
    const Scenario s = generate_scenario(spec);
    const DiagnosisReport r = diagnose(s.control, s.treatment, config_for(spec, {}));
    ASSERT_EQ(r.classification, Classification::TypeS);
    ASSERT_FALSE(r.ranking->rows.empty());
    EXPECT_EQ(r.ranking->rows[0].feature, "screen_share=1");
    EXPECT_GT(r.ranking->rows[0].hazard_score, 0.0);
}

TEST(Diagnose, DecreaseDirectionReversesRanking) {
    const ScenarioSpec spec = systemic_scenario(6, 20000);
    const Scenario s = generate_scenario(spec);
    DiagnosisConfig cfg = config_for(spec, {});
    const DiagnosisReport inc = diagnose(s.control, s.treatment, cfg);
    cfg.direction = Direction::decrease;
    const DiagnosisReport dec = diagnose(s.control, s.treatment, cfg);
    ASSERT_TRUE(inc.ranking && dec.ranking);
    auto rows = inc.ranking->rows;
    std::reverse(rows.begin(), rows.end());
    EXPECT_EQ(dec.ranking->rows, rows);
}

TEST(Diagnose, DisjointPopulationsAreNotComparable) {
    std::vector<std::int8_t> y_c(2000, 0);
    std::vector<std::int8_t> y_t(2000, 0);
    for (std::size_t i = 0; i < 2000; ++i) {
        y_c[i] = i % 20 == 0;
        y_t[i] = i % 5 == 0;
    }
    const Dataset c("c", {cat("region", repeat("north", 2000)), bin("fail", y_c)});
    const Dataset t("t", {cat("region", repeat("south", 2000)), bin("fail", y_t)});
    DiagnosisConfig cfg;
    cfg.target_column = "fail";
    cfg.invariant_columns = {"region"};
    try {
        diagnose(c, t, cfg);
        FAIL() << "expected DiagnosisError";
    } catch (const DiagnosisError& e) {
        EXPECT_EQ(e.code(), "non_comparable_populations");
    }
}

TEST(Diagnose, DeterministicAndRoundTrips) {
    for (const ScenarioSpec& spec : {bias_only_scenario(7, 20000), systemic_scenario(8, 20000)}) {
        const Scenario s = generate_scenario(spec);
        DiagnosisConfig cfg = config_for(spec, {});
        cfg.seed = 99;
        const DiagnosisReport a = diagnose(s.control, s.treatment, cfg);
        const DiagnosisReport b = diagnose(s.control, s.treatment, cfg);
        const std::string json = render_report(a, Format::json);
        EXPECT_EQ(json, render_report(b, Format::json));
        EXPECT_EQ(render_report(a, Format::markdown), render_report(b, Format::markdown));
        const DiagnosisReport parsed = report_from_json(json);
        EXPECT_EQ(render_report(parsed, Format::json), json);
        EXPECT_EQ(parsed.classification, a.classification);
        EXPECT_EQ(parsed.config_echo, a.config_echo);
        EXPECT_EQ(parsed.bias, a.bias);
        if (a.ranking) {
            ASSERT_TRUE(parsed.ranking.has_value());
            ASSERT_EQ(parsed.ranking->rows.size(), a.ranking->rows.size());
        }
    }
}

TEST(Report, TypeBMarkdownMentionsPopulationBias) {
    const ScenarioSpec spec = bias_only_scenario(3, 20000);
    const Scenario s = generate_scenario(spec);
    const DiagnosisReport r = diagnose(s.control, s.treatment, config_for(spec, {}));
    ASSERT_EQ(r.classification, Classification::TypeB);
    const std::string md = render_report(r, Format::markdown);
    EXPECT_NE(md.find("population bias"), std::string::npos);
    EXPECT_NE(md.find("| Feature | Deviation"), std::string::npos);
    EXPECT_EQ(md.find("## Feature ranking"), std::string::npos);
}

TEST(Report, JsonHasStableKeysAndVersion) {
    const Scenario s = generate_scenario(null_scenario(9, 2000));
    DiagnosisConfig cfg = config_for(null_scenario(9, 2000), {});
    const std::string json = render_report(diagnose(s.control, s.treatment, cfg), Format::json);
    EXPECT_EQ(json.rfind("{\n  \"report_version\": 1,\n  \"classification\": ", 0), 0u);
    EXPECT_EQ(json.back(), '\n');
    EXPECT_THROW(report_from_json("{\"report_version\": 2}"), std::invalid_argument);
    EXPECT_THROW(report_from_json("not json"), std::invalid_argument);
}

TEST(Report, FormatNames) {
    EXPECT_EQ(format_from_string("json"), Format::json);
    EXPECT_EQ(format_from_string("markdown"), Format::markdown);
    EXPECT_THROW(format_from_string("html"), std::invalid_argument);
}

// Every classification path is reachable, and the report invariants hold on
// a mixed batch.
TEST(Diagnose, InvariantsOverPresetBatch) {
    std::set<Classification> seen;
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const std::int64_t n = seed % 4 == 3 ? 400 : 10000;
        ScenarioSpec spec = seed % 3 == 0 ? null_scenario(seed, n)
                            : seed % 3 == 1 ? bias_only_scenario(seed, n)
                                            : systemic_scenario(seed, n);
        const Scenario s = generate_scenario(spec);
        const DiagnosisReport r = diagnose(s.control, s.treatment, config_for(spec, {}));
        expect_invariants(r);
        seen.insert(r.classification);
    }
    EXPECT_EQ(seen.size(), 4u);
}
