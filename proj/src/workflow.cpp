#include "regdiag/workflow.hpp"

#include <stdexcept>

#include "regdiag/errors.hpp"

namespace regdiag {

namespace {

struct Rate {
    std::int64_t n = 0;
    std::int64_t failures = 0;
};

Rate failure_rate(const Column& target) {
    Rate r;
    for (auto y : target.bits()) {
        if (y < 0) continue;
        ++r.n;
        r.failures += y;
    }
    return r;
}

}  // namespace

std::string_view to_string(Classification c) {
    switch (c) {
        case Classification::NoChange: return "NoChange";
        case Classification::TypeB: return "TypeB";
        case Classification::TypeS: return "TypeS";
        case Classification::InsufficientData: return "InsufficientData";
    }
    return "unknown";
}

Classification classification_from_string(std::string_view s) {
    for (auto c : {Classification::NoChange, Classification::TypeB, Classification::TypeS,
                   Classification::InsufficientData}) {
        if (to_string(c) == s) return c;
    }
    throw std::invalid_argument("unknown classification " + std::string(s));
}

MetricComparison compare_metric(const Dataset& control, const Dataset& treatment, std::string_view target,
                                double p_threshold) {
    const Rate c = failure_rate(control.column(target));
    const Rate t = failure_rate(treatment.column(target));
    if (c.n == 0 || t.n == 0) throw std::domain_error("compare_metric needs non-null target rows on both sides");
    MetricComparison m;
    m.mean_c = static_cast<double>(c.failures) / static_cast<double>(c.n);
    m.mean_t = static_cast<double>(t.failures) / static_cast<double>(t.n);
    m.delta = m.mean_t - m.mean_c;
    m.test = two_proportion_test(c.failures, c.n, t.failures, t.n, p_threshold);
    return m;
}

DiagnosisReport diagnose(const Dataset& control, const Dataset& treatment, const DiagnosisConfig& config) {
    DiagnosisReport report;
    report.config_echo = config;
    const auto min_rows = static_cast<std::size_t>(config.min_rows);
    if (control.row_count() < min_rows || treatment.row_count() < min_rows) {
        report.classification = Classification::InsufficientData;
        try {
            report.comparison_raw =
                compare_metric(control, treatment, config.target_column, config.metric_p_threshold);
        } catch (const std::domain_error&) {
            report.comparison_raw = MetricComparison{};
        }
        report.warnings.push_back({"insufficient_rows", "not enough data to follow up: need " +
                                                            std::to_string(config.min_rows) + " rows per dataset"});
        return report;
    }
    report.comparison_raw = compare_metric(control, treatment, config.target_column, config.metric_p_threshold);

    if (!report.comparison_raw.test.significant) {
        report.classification = Classification::NoChange;
        return report;
    }

    report.bias = bias_check(control, treatment, config.invariant_columns, config.bias_p_threshold,
                             config.bias_deviation_threshold_pct);

    const auto& target_c = control.column(config.target_column).bits();
    const auto& target_t = treatment.column(config.target_column).bits();
    std::vector<std::size_t> rows_c;
    std::vector<std::size_t> rows_t;

    if (report.bias->any_bias) {
        NormalizedPair pair;
        try {
            pair = normalize(control, treatment, *report.bias, config);
        } catch (const DiagnosisError& e) {
            if (e.code() == "no_overlap")
                throw DiagnosisError("non_comparable_populations",
                                     "populations are too different to compare fairly: " + std::string(e.what()));
            throw;
        }
        report.warnings.insert(report.warnings.end(), pair.warnings.begin(), pair.warnings.end());

        const std::vector<std::string> target_only{config.target_column};
        report.comparison_normalized =
            compare_metric(control.select(target_only).take(pair.control_idx),
                           treatment.select(target_only).take(pair.treatment_idx), config.target_column,
                           config.metric_p_threshold);
        report.normalization = NormalizationSummary{pair.control_idx.size(), pair.bin_width, pair.matched_fraction,
                                                    *pair.residual_bias};
        if (!report.comparison_normalized->test.significant) {
            report.classification = Classification::TypeB;
            return report;
        }
        report.residual_bias_warning = pair.residual_bias->any_bias;
        rows_c = std::move(pair.control_idx);
        rows_t = std::move(pair.treatment_idx);
    } else {
        rows_c = all_rows(control.row_count());
        rows_t = all_rows(treatment.row_count());
    }

    Encoding encoding = encode(control, treatment, config);
    report.preprocess_log = std::move(encoding.log);
    report.warnings.insert(report.warnings.end(), encoding.warnings.begin(), encoding.warnings.end());

    const RankSide side_c{Side::control, target_c, rows_c};
    const RankSide side_t{Side::treatment, target_t, rows_t};
    report.ranking = rank_features(encoding.features, side_c, side_t, config.ranking_p_threshold, config.direction,
                                   &report.warnings);
    report.classification = Classification::TypeS;
    return report;
}

}  // namespace regdiag
