#include "regdiag/bias.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "regdiag/random.hpp"

namespace regdiag {

namespace {

Histogram histogram(const Column& col) {
    Histogram h;
    if (col.kind() == ColumnKind::numeric) {
        for (std::size_t i = 0; i < col.size(); ++i) ++h[col.token(i).value_or(std::string(kNullBin))];
        return h;
    }
    const Column cat = col.as_categorical();
    const auto& dict = cat.dictionary();
    std::vector<std::int64_t> counts(dict.size(), 0);
    std::int64_t nulls = 0;
    for (auto code : cat.codes()) {
        if (code < 0)
            ++nulls;
        else
            ++counts[static_cast<std::size_t>(code)];
    }
    for (std::size_t i = 0; i < dict.size(); ++i) {
        if (counts[i] > 0) h[dict[i]] += counts[i];
    }
    if (nulls > 0) h[std::string(kNullBin)] += nulls;
    return h;
}

FeatureBias check_feature(const Column& control, const Column& treatment, double p_threshold,
                          double deviation_threshold_pct) {
    const Histogram hc = histogram(control);
    const Histogram ht = histogram(treatment);
    const double total_c = static_cast<double>(control.size());
    const double total_t = static_cast<double>(treatment.size());

    Histogram bins = hc;
    for (const auto& [bin, n] : ht) bins.try_emplace(bin, 0);

    std::vector<std::array<std::int64_t, 2>> table;
    FeatureBias fb;
    fb.feature = control.name();
    for (const auto& [bin, unused] : bins) {
        const auto c = hc.contains(bin) ? hc.at(bin) : 0;
        const auto t = ht.contains(bin) ? ht.at(bin) : 0;
        table.push_back({c, t});
        fb.bins.push_back({bin, 100.0 * static_cast<double>(c) / total_c, 100.0 * static_cast<double>(t) / total_t});
    }
    fb.test = table.size() >= 2 ? contingency_test(table, p_threshold) : TestResult{0.0, 1, 1.0, false};
    fb.deviation_pct = percent_deviation(hc, ht);
    fb.biased = fb.test.significant && fb.deviation_pct > deviation_threshold_pct;
    std::stable_sort(fb.bins.begin(), fb.bins.end(), [](const BinOccurrence& a, const BinOccurrence& b) {
        return std::fabs(a.occurrence_pct_c - a.occurrence_pct_t) > std::fabs(b.occurrence_pct_c - b.occurrence_pct_t);
    });
    return fb;
}

}  // namespace

std::vector<std::string> BiasReport::biased_features() const {
    std::vector<std::string> names;
    for (const auto& e : entries) {
        if (e.biased) names.push_back(e.feature);
    }
    return names;
}

BiasReport bias_check(const Dataset& control, const Dataset& treatment, std::span<const std::string> invariant_columns,
                      double p_threshold, double deviation_threshold_pct) {
    if (invariant_columns.empty()) throw std::domain_error("bias_check requires at least one invariant column");
    if (control.row_count() == 0 || treatment.row_count() == 0)
        throw std::domain_error("bias_check requires nonempty datasets");

    BiasReport report;
    for (const auto& name : invariant_columns) {
        report.entries.push_back(
            check_feature(control.column(name), treatment.column(name), p_threshold, deviation_threshold_pct));
    }
    std::sort(report.entries.begin(), report.entries.end(), [](const FeatureBias& a, const FeatureBias& b) {
        if (a.deviation_pct != b.deviation_pct) return a.deviation_pct > b.deviation_pct;
        return a.feature < b.feature;
    });
    report.any_bias = std::any_of(report.entries.begin(), report.entries.end(), [](const auto& e) { return e.biased; });
    return report;
}

NormalizedPair normalize(const Dataset& control, const Dataset& treatment, const BiasReport& bias_report,
                         const DiagnosisConfig& config) {
    if (!bias_report.any_bias) throw std::invalid_argument("normalize requires a bias report with biased features");

    const auto features = bias_report.biased_features();
    const PropensityModel model =
        fit_propensity(control, treatment, features, config.forest, derive_seed(config.seed, 1));
    const auto scores_c = model.score(control);
    const auto scores_t = model.score(treatment);
    MatchResult m = match_on_bins(scores_c, scores_t, config.caliper_coefficient, derive_seed(config.seed, 2));

    NormalizedPair pair;
    pair.control_idx = std::move(m.control_idx);
    pair.treatment_idx = std::move(m.treatment_idx);
    pair.bin_width = m.bin_width;
    pair.matched_fraction = m.matched_fraction;

    const Dataset matched_c = control.select(config.invariant_columns).take(pair.control_idx);
    const Dataset matched_t = treatment.select(config.invariant_columns).take(pair.treatment_idx);
    pair.residual_bias = bias_check(matched_c, matched_t, config.invariant_columns, config.bias_p_threshold,
                                    config.bias_deviation_threshold_pct);

    if (pair.matched_fraction < config.min_matched_fraction) {
        pair.warnings.push_back({"low_matched_fraction", "only " + std::to_string(pair.matched_fraction) +
                                                             " of the smaller dataset was matched"});
    }
    if (pair.residual_bias->any_bias) {
        pair.warnings.push_back({"residual_bias",
                                 "bias remains after normalization; consider a smaller caliper_coefficient or "
                                 "more invariant features"});
    }
    return pair;
}

}  // namespace regdiag
