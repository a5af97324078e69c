#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "regdiag/config.hpp"
#include "regdiag/preprocess.hpp"

namespace regdiag {

struct RankRow {
    std::string feature;
    std::int64_t fail_count_t = 0;   // treatment failures with the feature present
    double expected_fail_t = 0.0;    // N_fail_T * P_C(feature | fail)
    double abs_diff = 0.0;           // fail_count_t - expected_fail_t (signed)
    std::optional<double> pct_diff;  // abs_diff / expected_fail_t * 100; absent when expected is 0
    double hazard_score = 0.0;       // P_T(feature | fail) - P_C(feature | fail)
    double p_value = 1.0;

    friend bool operator==(const RankRow&, const RankRow&) = default;
};

struct RankTable {
    std::vector<RankRow> rows;
    Direction direction = Direction::increase;

    friend bool operator==(const RankTable&, const RankTable&) = default;
};

/// The rows of one dataset that take part in ranking. `target` covers every
/// row of the dataset (-1 = null); `rows` selects the participating subset
/// (e.g. the matched rows after normalization).
struct RankSide {
    Side side = Side::control;
    std::span<const std::int8_t> target;
    std::span<const std::size_t> rows;
};

/// Univariate ranking. A feature is kept iff the joint rate P(feature and
/// fail) differs between the sides under a two-proportion test with
/// p < p_threshold. Rows with a null target are ignored. Increase order is
/// hazard descending, then |abs_diff| descending, then name; decrease is the
/// exact reverse. With no control (or treatment) failures the table is empty
/// and a "no_control_failures" ("no_treatment_failures") warning is added.
RankTable rank_features(std::span<const EncodedFeature> features, const RankSide& control, const RankSide& treatment,
                        double p_threshold, Direction direction, std::vector<Issue>* warnings = nullptr);

/// P_T(feature | fail) - P_C(feature | fail). Throws std::domain_error when
/// either side has no failures.
double hazard_score(const EncodedFeature& feature, const RankSide& control, const RankSide& treatment);

/// 0, 1, ..., n - 1.
std::vector<std::size_t> all_rows(std::size_t n);

}  // namespace regdiag
