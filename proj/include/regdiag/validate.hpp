#pragma once

#include <vector>

#include "regdiag/config.hpp"
#include "regdiag/dataset.hpp"

namespace regdiag {

/// Findings from checking a config against a control/treatment pair.
/// Errors empty means the workflow can run on these inputs.
struct ValidationReport {
    std::vector<Issue> errors;
    std::vector<Issue> warnings;

    bool ok() const noexcept { return errors.empty(); }
    bool has_error(std::string_view code) const;
    bool has_warning(std::string_view code) const;
};

/// Error codes: missing_column, target_not_binary, invariant_not_categorical.
/// Warning codes: insufficient_rows, too_many_invariants, too_many_hypotheses.
/// Never throws on data problems; everything lands in the report.
ValidationReport validate(const DiagnosisConfig& config, const Dataset& control, const Dataset& treatment);

}  // namespace regdiag
