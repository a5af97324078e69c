#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace regdiag {

enum class Direction { increase, decrease };

std::string_view to_string(Direction direction);

/// Random forest hyperparameters for the propensity model.
struct ForestParams {
    int n_trees = 32;
    int max_depth = 8;
    int min_leaf = 50;

    friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

/// A coded finding, used for both validation errors and warnings.
struct Issue {
    std::string code;
    std::string message;

    friend bool operator==(const Issue&, const Issue&) = default;
};

struct DiagnosisConfig {
    std::string target_column;
    std::vector<std::string> invariant_columns;
    std::vector<std::string> hypothesis_columns;

    double metric_p_threshold = 0.05;
    double bias_p_threshold = 0.05;
    double bias_deviation_threshold_pct = 2.0;
    double ranking_p_threshold = 0.05;
    int max_bins = 10;
    int numeric_hypothesis_bins = 4;
    double prune_p_threshold = 0.95;
    bool add_is_null = true;
    double caliper_coefficient = 0.2;
    ForestParams forest;
    std::int64_t min_rows = 1000;
    double min_matched_fraction = 0.5;
    Direction direction = Direction::increase;
    std::uint64_t seed = 0;

    friend bool operator==(const DiagnosisConfig&, const DiagnosisConfig&) = default;
};

// Feature-count guidance; exceeding either only warns.
inline constexpr std::size_t kMaxAdvisedInvariants = 10;
inline constexpr std::size_t kMaxAdvisedHypotheses = 200;

/// Parses the JSON config. Missing optional keys keep their defaults; unknown
/// keys are reported through `warnings` as "unknown_key". Throws ConfigError
/// on malformed JSON, missing required keys, wrong types, out-of-range values,
/// or overlapping column roles.
DiagnosisConfig parse_config(std::string_view json_text, std::vector<Issue>* warnings = nullptr);
DiagnosisConfig parse_config(std::istream& source, std::vector<Issue>* warnings = nullptr);

/// Range and disjointness checks shared by the parser and programmatic callers.
void check_config(const DiagnosisConfig& config);

/// Canonical JSON form (the same keys `parse_config` accepts).
std::string config_to_json(const DiagnosisConfig& config);

}  // namespace regdiag
