#include "regdiag/validate.hpp"

#include <algorithm>

namespace regdiag {

namespace {

bool contains(const std::vector<Issue>& issues, std::string_view code) {
    return std::any_of(issues.begin(), issues.end(), [&](const Issue& i) { return i.code == code; });
}

}  // namespace

bool ValidationReport::has_error(std::string_view code) const { return contains(errors, code); }
bool ValidationReport::has_warning(std::string_view code) const { return contains(warnings, code); }

ValidationReport validate(const DiagnosisConfig& config, const Dataset& control, const Dataset& treatment) {
    ValidationReport report;

    std::vector<const std::string*> named{&config.target_column};
    for (const auto& n : config.invariant_columns) named.push_back(&n);
    for (const auto& n : config.hypothesis_columns) named.push_back(&n);

    for (const Dataset* ds : {&control, &treatment}) {
        for (const auto* n : named) {
            if (!ds->has_column(*n))
                report.errors.push_back({"missing_column", "column '" + *n + "' is missing from dataset '" +
                                                               ds->name() + "'"});
        }
    }

    for (const Dataset* ds : {&control, &treatment}) {
        if (const auto* target = ds->find(config.target_column); target && target->kind() != ColumnKind::binary) {
            report.errors.push_back({"target_not_binary", "target column '" + config.target_column + "' in '" +
                                                              ds->name() + "' is " +
                                                              std::string(to_string(target->kind())) +
                                                              ", expected binary"});
        }
        // Binary columns are two-category data and are accepted as invariants.
        for (const auto& n : config.invariant_columns) {
            if (const auto* col = ds->find(n); col && col->kind() == ColumnKind::numeric) {
                report.errors.push_back({"invariant_not_categorical",
                                         "invariant column '" + n + "' in '" + ds->name() + "' is numeric"});
            }
        }
    }

    for (const Dataset* ds : {&control, &treatment}) {
        if (ds->row_count() < static_cast<std::size_t>(config.min_rows)) {
            report.warnings.push_back({"insufficient_rows", "dataset '" + ds->name() + "' has " +
                                                                std::to_string(ds->row_count()) +
                                                                " rows, fewer than min_rows " +
                                                                std::to_string(config.min_rows)});
        }
    }
    if (config.invariant_columns.size() > kMaxAdvisedInvariants) {
        report.warnings.push_back({"too_many_invariants", std::to_string(config.invariant_columns.size()) +
                                                              " invariant columns; at most " +
                                                              std::to_string(kMaxAdvisedInvariants) +
                                                              " are advised"});
    }
    if (config.hypothesis_columns.size() > kMaxAdvisedHypotheses) {
        report.warnings.push_back({"too_many_hypotheses", std::to_string(config.hypothesis_columns.size()) +
                                                              " hypothesis columns; at most " +
                                                              std::to_string(kMaxAdvisedHypotheses) +
                                                              " are advised"});
    }
    return report;
}

}  // namespace regdiag
