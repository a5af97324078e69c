#include <gtest/gtest.h>

#include "regdiag/config.hpp"
#include "regdiag/errors.hpp"
#include "regdiag/validate.hpp"
#include "support.hpp"

using namespace regdiag;
using namespace support;

namespace {

const char* kMinimal = R"({"target_column":"fail","invariant_columns":["os"],"hypothesis_columns":["h1"]})";

std::string config_error_key(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "<no error>";
}

DiagnosisConfig basic_config() {
    DiagnosisConfig c;
    c.target_column = "fail";
    c.invariant_columns = {"os"};
    c.hypothesis_columns = {"h1"};
    c.min_rows = 2;
    return c;
}

}  // namespace

TEST(ParseConfig, DefaultsFillIn) {
    const DiagnosisConfig c = parse_config(kMinimal);
    EXPECT_EQ(c.target_column, "fail");
    EXPECT_EQ(c.invariant_columns, std::vector<std::string>{"os"});
    EXPECT_DOUBLE_EQ(c.caliper_coefficient, 0.2);
    EXPECT_DOUBLE_EQ(c.metric_p_threshold, 0.05);
    EXPECT_DOUBLE_EQ(c.bias_p_threshold, 0.05);
    EXPECT_DOUBLE_EQ(c.bias_deviation_threshold_pct, 2.0);
    EXPECT_DOUBLE_EQ(c.ranking_p_threshold, 0.05);
    EXPECT_EQ(c.max_bins, 10);
    EXPECT_EQ(c.numeric_hypothesis_bins, 4);
    EXPECT_DOUBLE_EQ(c.prune_p_threshold, 0.95);
    EXPECT_TRUE(c.add_is_null);
    EXPECT_EQ(c.forest, (ForestParams{32, 8, 50}));
    EXPECT_EQ(c.min_rows, 1000);
    EXPECT_DOUBLE_EQ(c.min_matched_fraction, 0.5);
    EXPECT_EQ(c.direction, Direction::increase);
}

TEST(ParseConfig, AllKeys) {
    const DiagnosisConfig c = parse_config(R"({
        "target_column":"y","invariant_columns":["a","b"],"hypothesis_columns":[],
        "metric_p_threshold":0.01,"bias_p_threshold":0.02,"bias_deviation_threshold_pct":5,
        "ranking_p_threshold":0.03,"max_bins":6,"numeric_hypothesis_bins":3,"prune_p_threshold":1.0,
        "add_is_null":false,"caliper_coefficient":0.1,"forest":{"n_trees":4,"max_depth":3,"min_leaf":7},
        "min_rows":10,"min_matched_fraction":0.25,"direction":"decrease","seed":18446744073709551615})");
    EXPECT_EQ(c.forest, (ForestParams{4, 3, 7}));
    EXPECT_EQ(c.direction, Direction::decrease);
    EXPECT_EQ(c.seed, 18446744073709551615ull);
    EXPECT_FALSE(c.add_is_null);
    EXPECT_EQ(parse_config(config_to_json(c)), c);
}

TEST(ParseConfig, RangeErrorsNameTheKey) {
    EXPECT_EQ(config_error_key(
                  R"({"target_column":"f","invariant_columns":["a"],"hypothesis_columns":[],"metric_p_threshold":1.5})"),
              "metric_p_threshold");
    EXPECT_EQ(config_error_key(
                  R"({"target_column":"f","invariant_columns":["a"],"hypothesis_columns":[],"caliper_coefficient":0})"),
              "caliper_coefficient");
    EXPECT_EQ(config_error_key(R"({"target_column":"f","invariant_columns":["a"],"hypothesis_columns":[],"max_bins":1})"),
              "max_bins");
    EXPECT_EQ(config_error_key(
                  R"({"target_column":"f","invariant_columns":["a"],"hypothesis_columns":[],"direction":"sideways"})"),
              "direction");
    EXPECT_EQ(config_error_key(
                  R"({"target_column":"f","invariant_columns":["a"],"hypothesis_columns":[],"forest":{"n_trees":0}})"),
              "forest");
    EXPECT_EQ(config_error_key(R"({"target_column":"f","invariant_columns":["a"],"hypothesis_columns":[],"seed":-1})"),
              "seed");
}

TEST(ParseConfig, MissingRequiredKeys) {
    EXPECT_EQ(config_error_key(R"({"invariant_columns":["a"],"hypothesis_columns":[]})"), "target_column");
    EXPECT_EQ(config_error_key(R"({"target_column":"f","hypothesis_columns":[]})"), "invariant_columns");
    EXPECT_EQ(config_error_key(R"({"target_column":"f","invariant_columns":["a"]})"), "hypothesis_columns");
    EXPECT_THROW(parse_config("not json"), ConfigError);
    EXPECT_THROW(parse_config("[1,2]"), ConfigError);
}

TEST(ParseConfig, RolesMustBeDisjoint) {
    EXPECT_EQ(config_error_key(R"({"target_column":"f","invariant_columns":["a"],"hypothesis_columns":["f"]})"),
              "hypothesis_columns");
    EXPECT_THROW(parse_config(R"({"target_column":"f","invariant_columns":["a"],"hypothesis_columns":["a"]})"),
                 ConfigError);
    EXPECT_THROW(parse_config(R"({"target_column":"f","invariant_columns":["a","a"],"hypothesis_columns":[]})"),
                 ConfigError);
}

TEST(ParseConfig, UnknownKeysWarn) {
    std::vector<Issue> warnings;
    parse_config(R"({"target_column":"f","invariant_columns":["a"],"hypothesis_columns":[],"colour":1,
                     "forest":{"n_trees":3,"depth":2}})",
                 &warnings);
    ASSERT_EQ(warnings.size(), 2u);
    EXPECT_EQ(warnings[0].code, "unknown_key");
    EXPECT_NE(warnings[0].message.find("forest.depth"), std::string::npos);
    EXPECT_NE(warnings[1].message.find("colour"), std::string::npos);
}

TEST(Validate, CleanInputs) {
    const Dataset d("d", {bin("fail", {0, 1}), cat("os", {"a", "b"}), cat("h1", {"x", "y"})});
    const ValidationReport r = validate(basic_config(), d, d);
    EXPECT_TRUE(r.ok());
    EXPECT_TRUE(r.warnings.empty());
}

TEST(Validate, MissingColumn) {
    const Dataset c("c", {bin("fail", {0, 1}), cat("os", {"a", "b"}), cat("h1", {"x", "y"})});
    const Dataset t("t", {bin("fail", {0, 1}), cat("h1", {"x", "y"})});
    const ValidationReport r = validate(basic_config(), c, t);
    EXPECT_FALSE(r.ok());
    EXPECT_TRUE(r.has_error("missing_column"));
    ASSERT_EQ(r.errors.size(), 1u);
    EXPECT_NE(r.errors[0].message.find("os"), std::string::npos);
}

TEST(Validate, TargetNotBinary) {
    const Dataset c("c", {num("fail", {0, 1, 2}), cat("os", {"a", "b", "c"}), cat("h1", {"x", "y", "z"})});
    EXPECT_TRUE(validate(basic_config(), c, c).has_error("target_not_binary"));
}

TEST(Validate, InvariantMustBeCategorical) {
    const Dataset c("c", {bin("fail", {0, 1}), num("os", {1.5, 2.5}), cat("h1", {"x", "y"})});
    EXPECT_TRUE(validate(basic_config(), c, c).has_error("invariant_not_categorical"));
    const Dataset b("b", {bin("fail", {0, 1}), bin("os", {0, 1}), cat("h1", {"x", "y"})});
    EXPECT_TRUE(validate(basic_config(), b, b).ok());
}

TEST(Validate, Warnings) {
    DiagnosisConfig cfg = basic_config();
    cfg.min_rows = 1000;
    std::vector<Column> cols = {bin("fail", std::vector<std::int8_t>(500, 0)), cat("os", repeat("a", 500))};
    for (int i = 0; i < 201; ++i) {
        cols.push_back(cat("h" + std::to_string(i), repeat("x", 500)));
        if (i != 1) cfg.hypothesis_columns.push_back("h" + std::to_string(i));
    }
    for (int i = 0; i < 10; ++i) {
        cols.push_back(cat("inv" + std::to_string(i), repeat("a", 500)));
        cfg.invariant_columns.push_back("inv" + std::to_string(i));
    }
    const Dataset d("d", std::move(cols));
    const ValidationReport r = validate(cfg, d, d);
    EXPECT_TRUE(r.ok());
    EXPECT_TRUE(r.has_warning("insufficient_rows"));
    EXPECT_TRUE(r.has_warning("too_many_invariants"));
    EXPECT_TRUE(r.has_warning("too_many_hypotheses"));
}

TEST(Validate, TenInvariantsDoNotWarn) {
    DiagnosisConfig cfg = basic_config();
    cfg.invariant_columns.clear();
    std::vector<Column> cols = {bin("fail", {0, 1}), cat("h1", {"x", "y"})};
    for (int i = 0; i < 10; ++i) {
        cols.push_back(cat("inv" + std::to_string(i), {"a", "b"}));
        cfg.invariant_columns.push_back("inv" + std::to_string(i));
    }
    const Dataset d("d", std::move(cols));
    EXPECT_FALSE(validate(cfg, d, d).has_warning("too_many_invariants"));
}
