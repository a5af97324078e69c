#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "regdiag/bias.hpp"
#include "regdiag/config.hpp"
#include "regdiag/dataset.hpp"
#include "regdiag/preprocess.hpp"
#include "regdiag/rank.hpp"
#include "regdiag/stats.hpp"

namespace regdiag {

struct MetricComparison {
    double mean_c = 0.0;  // failure rate over non-null target rows
    double mean_t = 0.0;
    double delta = 0.0;   // mean_t - mean_c
    TestResult test;

    friend bool operator==(const MetricComparison&, const MetricComparison&) = default;
};

/// Two-proportion chi-squared test on the target's failure counts. Throws
/// std::domain_error when either side has no non-null target rows.
MetricComparison compare_metric(const Dataset& control, const Dataset& treatment, std::string_view target,
                                double p_threshold);

enum class Classification { NoChange, TypeB, TypeS, InsufficientData };

std::string_view to_string(Classification c);
Classification classification_from_string(std::string_view s);

/// Matching diagnostics kept in the report (the index lists are not).
struct NormalizationSummary {
    std::size_t n_pairs = 0;
    double bin_width = 0.0;
    double matched_fraction = 0.0;
    BiasReport residual_bias;

    friend bool operator==(const NormalizationSummary&, const NormalizationSummary&) = default;
};

struct DiagnosisReport {
    Classification classification = Classification::NoChange;
    MetricComparison comparison_raw;
    std::optional<MetricComparison> comparison_normalized;
    std::optional<BiasReport> bias;
    std::optional<NormalizationSummary> normalization;
    bool residual_bias_warning = false;
    std::optional<RankTable> ranking;
    PreprocessLog preprocess_log;
    DiagnosisConfig config_echo;
    std::vector<Issue> warnings;

    friend bool operator==(const DiagnosisReport&, const DiagnosisReport&) = default;
};

/// End-to-end diagnosis:
///   either side below min_rows            -> InsufficientData, no ranking
///   raw comparison not significant        -> NoChange
///   significant, biased, normalized not   -> TypeB (population bias)
///   significant, biased, normalized still -> rank on matched rows, TypeS
///   significant, unbiased                 -> rank on all rows, TypeS
/// Throws DiagnosisError "non_comparable_populations" when matching finds no
/// overlap. Pure in (control, treatment, config).
DiagnosisReport diagnose(const Dataset& control, const Dataset& treatment, const DiagnosisConfig& config);

}  // namespace regdiag
