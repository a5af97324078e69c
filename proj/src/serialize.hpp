#pragma once

#include <json.hpp>

#include "regdiag/workflow.hpp"

namespace regdiag::detail {

using ojson = nlohmann::ordered_json;

ojson config_json(const DiagnosisConfig& config);
ojson test_json(const TestResult& test);
ojson comparison_json(const MetricComparison& comparison);
ojson bias_json(const BiasReport& report);
ojson log_json(const PreprocessLog& log);
ojson ranking_json(const RankTable& table);
ojson issues_json(const std::vector<Issue>& issues);
ojson report_json(const DiagnosisReport& report);

// Inverses of the above; throw std::invalid_argument on a malformed document.
TestResult parse_test(const ojson& j);
MetricComparison parse_comparison(const ojson& j);
BiasReport parse_bias(const ojson& j);
PreprocessLog parse_log(const ojson& j);
RankTable parse_ranking(const ojson& j);
std::vector<Issue> parse_issues(const ojson& j);
DiagnosisReport parse_report(const ojson& j);

}  // namespace regdiag::detail
