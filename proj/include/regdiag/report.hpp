#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "regdiag/bias.hpp"
#include "regdiag/rank.hpp"
#include "regdiag/workflow.hpp"

namespace regdiag {

enum class Format { json, markdown };

/// "json" or "markdown"; throws std::invalid_argument otherwise.
Format format_from_string(std::string_view s);

/// JSON is the canonical form ("report_version": 1, keys in a fixed order);
/// markdown is for people. Output is a pure function of the report.
std::string render_report(const DiagnosisReport& report, Format format);

/// Inverse of render_report(..., Format::json). Throws std::invalid_argument
/// on malformed input and ConfigError on an invalid config_echo.
DiagnosisReport report_from_json(std::string_view text);

// Single-stage outputs used by the stage commands.
std::string render_bias(const BiasReport& report, Format format);
std::string render_comparison(const MetricComparison& comparison, Format format);
std::string render_ranking(const RankTable& table, const std::vector<Issue>& warnings, Format format);

}  // namespace regdiag
