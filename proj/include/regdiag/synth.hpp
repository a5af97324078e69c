#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "regdiag/config.hpp"
#include "regdiag/dataset.hpp"
#include "regdiag/workflow.hpp"

namespace regdiag {

/// One population segment: a combination of invariant values with its own
/// failure rate and its share of each side.
struct Segment {
    std::vector<std::string> values;  // one per invariant column
    double base_fail_rate = 0.0;
    double weight_c = 0.0;
    double weight_t = 0.0;

    friend bool operator==(const Segment&, const Segment&) = default;
};

/// A binary hypothesis feature. `occurrence` is per segment (a single entry
/// applies to all segments). Where the feature fires in treatment, the failure
/// probability is multiplied by `multiplier_t`.
struct HypothesisSpec {
    std::string name;
    std::vector<double> occurrence;
    double multiplier_t = 1.0;

    friend bool operator==(const HypothesisSpec&, const HypothesisSpec&) = default;
};

struct ScenarioSpec {
    std::vector<std::string> invariant_names;
    std::vector<Segment> segments;
    std::vector<HypothesisSpec> hypotheses;
    std::int64_t n_rows_c = 0;
    std::int64_t n_rows_t = 0;
    std::uint64_t seed = 0;
    std::string target_column = "fail";
    // Extra hypothesis columns unrelated to failure: "noise_cat_<i>" with five
    // labels, "noise_num_<i>" standard normal; each value is null with
    // probability null_rate.
    int noise_categorical = 0;
    int noise_numeric = 0;
    double null_rate = 0.0;

    /// Hypothesis names followed by the noise column names.
    std::vector<std::string> hypothesis_columns() const;

    friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

enum class TruthKind { Null, BiasOnly, Systemic, Mixed };

std::string_view to_string(TruthKind kind);
TruthKind truth_kind_from_string(std::string_view s);

struct GroundTruth {
    TruthKind kind = TruthKind::Null;
    std::vector<std::string> injected_features;  // hypotheses with multiplier != 1

    friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

/// Label rule: weights shifted and no multiplier -> BiasOnly; multipliers and
/// equal weights -> Systemic; both -> Mixed; neither -> Null.
GroundTruth ground_truth(const ScenarioSpec& spec);

/// Throws SpecError on a spec that violates its invariants: weights summing
/// to 1 per side, rates in [0, 1], consistent sizes, positive multipliers,
/// unique column names, and no reachable failure probability above 1.
void check_spec(const ScenarioSpec& spec);

ScenarioSpec spec_from_json(std::string_view text);
std::string spec_to_json(const ScenarioSpec& spec);
std::string truth_to_json(const GroundTruth& truth);

struct Scenario {
    Dataset control;
    Dataset treatment;
    GroundTruth truth;
};

/// Samples rows i.i.d.; deterministic in spec.seed. Columns are the
/// invariants, the hypotheses (binary), the noise columns, then the target.
Scenario generate_scenario(const ScenarioSpec& spec);

/// Copies the column roles of `spec` into `base` (target, invariants,
/// hypotheses); every other setting is kept.
DiagnosisConfig config_for(const ScenarioSpec& spec, DiagnosisConfig base);

/// Treatment = rows dated anomaly_date; control = rows dated anomaly_date - 7k
/// days for k = 1..lookback_weeks. Dates are YYYY-MM-DD. Throws WindowError on
/// an unparseable date or an empty side.
std::pair<Dataset, Dataset> select_windows(const Dataset& timeseries, std::string_view date_column,
                                           std::string_view anomaly_date, int lookback_weeks = 4);

inline constexpr std::string_view kErrorOutcome = "Error";

struct ScenarioOutcome {
    TruthKind truth = TruthKind::Null;
    std::string outcome;  // a classification name or "Error"
    std::string error;    // DiagnosisError code or exception text
    std::optional<bool> normalized_significant;
    std::optional<std::size_t> injected_rank;  // 1-based best rank of an injected feature

    friend bool operator==(const ScenarioOutcome&, const ScenarioOutcome&) = default;
};

struct EvalSummary {
    std::size_t n_scenarios = 0;
    int k = 3;
    // truth kind -> outcome -> count; every kind and outcome is present.
    std::map<std::string, std::map<std::string, std::size_t>> confusion;
    // Fraction of Null + BiasOnly scenarios not classified TypeS (errors
    // count as not filtered); absent without such scenarios.
    std::optional<double> filter_rate;
    // Fractions of Systemic scenarios with an injected feature in the top k,
    // and ranked first; absent without Systemic scenarios.
    std::optional<double> top_k_hit_rate;
    std::optional<double> top_1_hit_rate;
    std::vector<ScenarioOutcome> outcomes;

    friend bool operator==(const EvalSummary&, const EvalSummary&) = default;
};

ScenarioOutcome evaluate_scenario(const ScenarioSpec& spec, const DiagnosisConfig& base);

/// Generates and diagnoses every scenario in order. Throws std::invalid_argument
/// on an empty list.
EvalSummary evaluate_pipeline(std::span<const ScenarioSpec> specs, const DiagnosisConfig& base, int k = 3);

std::string render_eval(const EvalSummary& summary, bool markdown);

/// Scenario presets. Each draws its parameters from `seed`.
ScenarioSpec null_scenario(std::uint64_t seed, std::int64_t n_rows);
ScenarioSpec bias_only_scenario(std::uint64_t seed, std::int64_t n_rows);
ScenarioSpec systemic_scenario(std::uint64_t seed, std::int64_t n_rows);
/// 90% Null / BiasOnly (one third Null), 10% Systemic, interleaved.
std::vector<ScenarioSpec> paperlike_profile(std::size_t n_scenarios, std::uint64_t seed, std::int64_t n_rows);
/// Wide scenario: n_invariants invariant columns, n_hypotheses binary
/// hypotheses (one injected), bias on the first invariant.
ScenarioSpec wide_scenario(std::uint64_t seed, std::int64_t n_rows, int n_invariants, int n_hypotheses);

/// Detection power of the two-proportion test at n rows per side.
struct PowerReport {
    std::int64_t n_rows = 0;
    double rate_c = 0.0;
    double rate_t = 0.0;
    double alpha = 0.05;
    int n_seeds = 0;
    int detections = 0;
    double empirical = 0.0;
    double analytic = 0.0;
};

/// Normal-approximation power of the two-sided pooled two-proportion test.
double analytic_power(double rate_c, double rate_t, std::int64_t n_rows, double alpha);

/// Monte Carlo power: n_seeds generated scenarios compared with compare_metric.
PowerReport measure_power(std::int64_t n_rows, double rate_c, double rate_t, int n_seeds, double alpha,
                          std::uint64_t seed);

}  // namespace regdiag
