#include "regdiag/rank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "regdiag/stats.hpp"

namespace regdiag {

namespace {

struct SideCounts {
    std::int64_t n = 0;          // rows with a non-null target
    std::int64_t failures = 0;   // rows with target = 1
};

SideCounts count_side(const RankSide& s) {
    SideCounts c;
    for (auto r : s.rows) {
        const auto y = s.target[r];
        if (y < 0) continue;
        ++c.n;
        c.failures += y;
    }
    return c;
}

// Failures where the feature is present.
std::int64_t joint_failures(const EncodedFeature& f, const RankSide& s) {
    std::int64_t k = 0;
    for (auto r : s.rows) {
        if (s.target[r] == 1 && f.value(s.side, r)) ++k;
    }
    return k;
}

}  // namespace

std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return rows;
}

double hazard_score(const EncodedFeature& feature, const RankSide& control, const RankSide& treatment) {
    const auto c = count_side(control);
    const auto t = count_side(treatment);
    if (c.failures == 0 || t.failures == 0) throw std::domain_error("hazard_score needs failures on both sides");
    return static_cast<double>(joint_failures(feature, treatment)) / static_cast<double>(t.failures) -
           static_cast<double>(joint_failures(feature, control)) / static_cast<double>(c.failures);
}

RankTable rank_features(std::span<const EncodedFeature> features, const RankSide& control, const RankSide& treatment,
                        double p_threshold, Direction direction, std::vector<Issue>* warnings) {
    RankTable table;
    table.direction = direction;
    const auto c = count_side(control);
    const auto t = count_side(treatment);
    if (c.failures == 0) {
        if (warnings) warnings->push_back({"no_control_failures", "control has no failures; hazard baseline undefined"});
        return table;
    }
    if (t.failures == 0) {
        if (warnings) warnings->push_back({"no_treatment_failures", "treatment has no failures; nothing to rank"});
        return table;
    }

    for (const auto& f : features) {
        const auto kc = joint_failures(f, control);
        const auto kt = joint_failures(f, treatment);
        const TestResult test = two_proportion_test(kc, c.n, kt, t.n, p_threshold);
        if (!test.significant) continue;

        const double cond_c = static_cast<double>(kc) / static_cast<double>(c.failures);
        const double cond_t = static_cast<double>(kt) / static_cast<double>(t.failures);
        RankRow row;
        row.feature = f.name();
        row.fail_count_t = kt;
        row.expected_fail_t = static_cast<double>(t.failures) * cond_c;
        row.abs_diff = static_cast<double>(kt) - row.expected_fail_t;
        if (row.expected_fail_t > 0.0) row.pct_diff = row.abs_diff / row.expected_fail_t * 100.0;
        row.hazard_score = cond_t - cond_c;
        row.p_value = test.p_value;
        table.rows.push_back(std::move(row));
    }

    std::sort(table.rows.begin(), table.rows.end(), [](const RankRow& a, const RankRow& b) {
        if (a.hazard_score != b.hazard_score) return a.hazard_score > b.hazard_score;
        const double da = std::fabs(a.abs_diff);
        const double db = std::fabs(b.abs_diff);
        if (da != db) return da > db;
        return a.feature < b.feature;
    });
    if (direction == Direction::decrease) std::reverse(table.rows.begin(), table.rows.end());
    return table;
}

}  // namespace regdiag
