#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "regdiag/config.hpp"
#include "regdiag/dataset.hpp"
#include "regdiag/stats.hpp"

namespace regdiag {

/// Category used for null invariant values.
inline constexpr std::string_view kNullBin = "__null__";

struct BinOccurrence {
    std::string bin;
    double occurrence_pct_c = 0.0;
    double occurrence_pct_t = 0.0;

    friend bool operator==(const BinOccurrence&, const BinOccurrence&) = default;
};

struct FeatureBias {
    std::string feature;
    TestResult test;
    double deviation_pct = 0.0;
    bool biased = false;
    // Sorted by |occurrence_pct_c - occurrence_pct_t| descending, then bin.
    std::vector<BinOccurrence> bins;

    friend bool operator==(const FeatureBias&, const FeatureBias&) = default;
};

struct BiasReport {
    // Sorted by deviation_pct descending, then feature name.
    std::vector<FeatureBias> entries;
    bool any_bias = false;

    std::vector<std::string> biased_features() const;

    friend bool operator==(const BiasReport&, const BiasReport&) = default;
};

/// Per invariant column: chi-squared test and percent deviation over the
/// category histograms (nulls counted as "__null__"). A feature is biased iff
/// the test is significant and the deviation exceeds the threshold.
/// Throws std::domain_error on an empty column list or an empty dataset.
BiasReport bias_check(const Dataset& control, const Dataset& treatment, std::span<const std::string> invariant_columns,
                      double p_threshold, double deviation_threshold_pct);

/// One node of a fitted propensity tree. A split sends rows whose `column`
/// takes category `category` right and the others left; rows with a category
/// never seen at fit time follow `default_right`.
struct TreeNode {
    int column = -1;  // -1 marks a leaf
    std::int32_t category = -1;
    int left = -1;
    int right = -1;
    bool default_right = false;
    double value = 0.0;  // control fraction among in-bag training samples

    bool is_leaf() const noexcept { return column < 0; }
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
};

/// Category layout of the features a model was fitted on.
struct FeatureLayout {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> categories;  // per column, sorted
};

/// Random-forest estimate of P(row belongs to control | invariant features).
class PropensityModel {
public:
    PropensityModel(FeatureLayout layout, std::vector<DecisionTree> trees, std::vector<double> oob_scores = {});

    const FeatureLayout& layout() const noexcept { return layout_; }
    const std::vector<DecisionTree>& trees() const noexcept { return trees_; }

    /// Out-of-bag scores of the training rows (control rows, then treatment
    /// rows); rows that were in-bag for every tree get the in-bag score.
    std::span<const double> oob_scores() const noexcept { return oob_scores_; }

    /// Per-row mean over trees of the reached leaf's control fraction.
    std::vector<double> score(const Dataset& dataset) const;

private:
    FeatureLayout layout_;
    std::vector<DecisionTree> trees_;
    std::vector<double> oob_scores_;
};

/// Fits n_trees CART trees on bootstrap samples of control + treatment (label
/// = membership in control): Gini splits on one-hot category indicators,
/// about sqrt(d) candidate indicators per node, stopping at max_depth or when
/// a child would hold fewer than min_leaf samples. Tree t draws from the seed
/// derive_seed(seed, t), so results do not depend on evaluation order.
/// Throws std::domain_error when the pooled row count is below 2 * min_leaf.
PropensityModel fit_propensity(const Dataset& control, const Dataset& treatment, std::span<const std::string> features,
                               const ForestParams& params, std::uint64_t seed);

std::vector<double> score(const PropensityModel& model, const Dataset& dataset);

struct MatchResult {
    std::vector<std::size_t> control_idx;
    std::vector<std::size_t> treatment_idx;
    double bin_width = 0.0;
    double matched_fraction = 0.0;
};

/// Histogram matching on propensity scores. Bin width is caliper_coefficient
/// times the population standard deviation of the pooled scores, bins are
/// [i*w, (i+1)*w); a zero deviation puts everything in one bin. Each bin keeps
/// min(count_c, count_t) rows from each side, sampled without replacement.
/// Index lists are returned in ascending order. Throws DiagnosisError
/// "no_overlap" when nothing matches.
MatchResult match_on_bins(std::span<const double> scores_c, std::span<const double> scores_t,
                          double caliper_coefficient, std::uint64_t seed);

struct NormalizedPair {
    std::vector<std::size_t> control_idx;
    std::vector<std::size_t> treatment_idx;
    double bin_width = 0.0;
    double matched_fraction = 0.0;
    std::optional<BiasReport> residual_bias;
    std::vector<Issue> warnings;
};

/// Propensity-score matching on the biased invariant features, followed by a
/// residual bias check over all invariant columns of the matched subsets.
/// Requires bias_report.any_bias (std::invalid_argument otherwise).
NormalizedPair normalize(const Dataset& control, const Dataset& treatment, const BiasReport& bias_report,
                         const DiagnosisConfig& config);

}  // namespace regdiag
