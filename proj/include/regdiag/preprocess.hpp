#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "regdiag/config.hpp"
#include "regdiag/dataset.hpp"

namespace regdiag {

/// Reserved label for values folded together by tail binning.
inline constexpr std::string_view kOtherBin = "__other__";

enum class Side { control, treatment };

/// A hypothesis feature pooled over control rows followed by treatment rows.
/// Labels are sorted; codes index into them, -1 = null.
struct BinnedFeature {
    std::string name;
    std::vector<std::string> labels;
    std::vector<std::int32_t> codes;
    std::size_t n_control = 0;

    std::vector<std::int64_t> label_counts() const;
};

struct BinnedEntry {
    std::string name;
    int kept_bins = 0;
    std::int64_t other_count = 0;

    friend bool operator==(const BinnedEntry&, const BinnedEntry&) = default;
};

/// Audit trail of the hypothesis-feature preprocessing.
struct PreprocessLog {
    std::vector<std::string> dropped_constant;
    std::vector<std::pair<std::string, double>> dropped_uninformative;
    std::vector<BinnedEntry> binned;

    friend bool operator==(const PreprocessLog&, const PreprocessLog&) = default;
};

/// True iff the values over both columns together take exactly one distinct
/// value, counting null as a value.
bool is_constant(const Column& control, const Column& treatment);

/// Step 1: keeps the features that are not constant over control and treatment.
std::vector<std::string> drop_constant(std::span<const std::string> features, const Dataset& control,
                                       const Dataset& treatment, PreprocessLog& log);

/// Pools a categorical or binary column pair into one labelled feature.
BinnedFeature pool_categorical(const Column& control, const Column& treatment);

/// Quantile binning of a numeric column pair into at most k bins "q1".."qk".
/// Edges are the nearest-rank i/k quantiles of the pooled non-null values;
/// bin j holds values in (edge[j-1], edge[j]]. Duplicate edges and an edge at
/// the maximum are merged away, so every bin is non-empty. An all-null input
/// yields an all-null feature with no labels.
BinnedFeature binarize_numeric(const Column& control, const Column& treatment, int k);

/// Step 2: keeps the max_bins - 1 most frequent labels (pooled count, ties
/// lexicographic) and maps the rest to "__other__". Nulls are left alone.
BinnedFeature bin_tail(const BinnedFeature& feature, int max_bins, std::int64_t* other_count = nullptr);

/// Chi-squared p-value of feature bins against the target over pooled rows
/// where both are non-null. Returns 1 when either target value never occurs.
double informativeness_p(const BinnedFeature& feature, std::span<const std::int8_t> pooled_target);

/// Step 3: drops features whose informativeness p-value exceeds the threshold.
std::vector<BinnedFeature> prune_uninformative(std::vector<BinnedFeature> features,
                                               std::span<const std::int8_t> pooled_target, double threshold,
                                               PreprocessLog& log);

/// Control target values followed by treatment target values (-1 = null).
std::vector<std::int8_t> pool_target(const Column& control, const Column& treatment);

/// Bin codes for one hypothesis source, shared by all features derived from it.
struct EncodedSource {
    std::string name;
    std::vector<std::string> labels;
    std::vector<std::int16_t> codes;  // control rows then treatment rows; -1 = null
    std::size_t n_control = 0;
};

/// One binary feature: "<source>=<bin>" or "<source>.is_null".
class EncodedFeature {
public:
    /// bin < 0 selects the is-null indicator.
    EncodedFeature(std::shared_ptr<const EncodedSource> source, int bin);

    const std::string& name() const noexcept { return name_; }
    const std::string& source() const noexcept { return source_->name; }
    bool is_null_indicator() const noexcept { return bin_ < 0; }

    std::size_t size(Side side) const noexcept;
    std::uint8_t value(Side side, std::size_t row) const {
        const auto code = source_->codes[offset(side) + row];
        return bin_ < 0 ? code < 0 : code == bin_;
    }
    std::vector<std::uint8_t> values(Side side) const;

private:
    std::size_t offset(Side side) const noexcept { return side == Side::control ? 0 : source_->n_control; }

    std::shared_ptr<const EncodedSource> source_;
    int bin_;
    std::string name_;
};

struct Encoding {
    std::vector<EncodedFeature> features;
    PreprocessLog log;
    std::vector<Issue> warnings;
};

/// Runs the whole pipeline on the raw hypothesis columns: drop constants,
/// quantile-bin numerics, tail-bin, prune uninformative, one-hot, then is-null
/// indicators (one per non-constant source with a null anywhere, including
/// pruned sources, when config.add_is_null). Output is ordered by source name,
/// then bin label, with the is-null indicator last. Deterministic.
Encoding encode(const Dataset& control, const Dataset& treatment, const DiagnosisConfig& config);

}  // namespace regdiag
