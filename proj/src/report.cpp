#include "regdiag/report.hpp"

#include <stdexcept>

#include <fmt/format.h>

#include "serialize.hpp"

namespace regdiag {

namespace {

using detail::ojson;

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

std::string pct(double fraction) { return fmt::format("{:.2f}%", 100.0 * fraction); }

std::string pvalue(double p) { return p < 1e-4 ? fmt::format("{:.2e}", p) : fmt::format("{:.4f}", p); }

std::string yes_no(bool b) { return b ? "yes" : "no"; }

// Pipes inside names would break the table layout.
std::string cell(std::string_view s) {
    std::string out;
    for (char ch : s) {
        if (ch == '|') out += '\\';
        out += ch;
    }
    return out;
}

std::string_view headline(Classification c) {
    switch (c) {
        case Classification::NoChange:
            return "No statistically significant change in the target metric.";
        case Classification::TypeB:
            return "The regression is explained by population bias: after normalizing the invariant features the "
                   "difference is no longer significant.";
        case Classification::TypeS:
            return "The regression persists after accounting for population bias and points to a systemic issue.";
        case Classification::InsufficientData:
            return "Not enough data to follow up on this regression.";
    }
    return "";
}

void comparison_table_header(std::string& out) {
    out += "| Comparison | Control | Treatment | Delta | Statistic | p-value | Significant |\n";
    out += "|---|---|---|---|---|---|---|\n";
}

void comparison_row(std::string& out, std::string_view label, const MetricComparison& m) {
    out += fmt::format("| {} | {} | {} | {:+.3f} pp | {:.4f} | {} | {} |\n", label, pct(m.mean_c), pct(m.mean_t),
                       100.0 * m.delta, m.test.statistic, pvalue(m.test.p_value), yes_no(m.test.significant));
}

void bias_tables(std::string& out, const BiasReport& report) {
    out += "| Feature | Deviation | Statistic | p-value | Biased |\n|---|---|---|---|---|\n";
    for (const auto& e : report.entries) {
        out += fmt::format("| {} | {:.2f}% | {:.4f} | {} | {} |\n", cell(e.feature), e.deviation_pct, e.test.statistic,
                           pvalue(e.test.p_value), yes_no(e.biased));
    }
    if (!report.any_bias) {
        out += "\nNo invariant feature is biased.\n";
        return;
    }
    out += "\n| Feature | Bin | Occurrence in control | Occurrence in treatment |\n|---|---|---|---|\n";
    for (const auto& e : report.entries) {
        if (!e.biased) continue;
        for (const auto& b : e.bins) {
            out += fmt::format("| {} | {} | {:.2f}% | {:.2f}% |\n", cell(e.feature), cell(b.bin), b.occurrence_pct_c,
                               b.occurrence_pct_t);
        }
    }
}

void ranking_table(std::string& out, const RankTable& table) {
    if (table.rows.empty()) {
        out += "No hypothesis feature differs significantly between control and treatment.\n";
        return;
    }
    out += "| Rank | Feature | Failures (T) | Expected failures (T) | Abs. difference | % difference | Hazard score | "
           "p-value |\n|---|---|---|---|---|---|---|---|\n";
    int rank = 0;
    for (const auto& r : table.rows) {
        out += fmt::format("| {} | {} | {} | {:.1f} | {:+.1f} | {} | {:+.4f} | {} |\n", ++rank, cell(r.feature),
                           r.fail_count_t, r.expected_fail_t, r.abs_diff,
                           r.pct_diff ? fmt::format("{:+.1f}%", *r.pct_diff) : std::string("n/a"), r.hazard_score,
                           pvalue(r.p_value));
    }
}

void warning_list(std::string& out, const std::vector<Issue>& warnings) {
    if (warnings.empty()) return;
    out += "\n## Warnings\n\n";
    for (const auto& w : warnings) out += fmt::format("- `{}`: {}\n", w.code, w.message);
}

std::string markdown(const DiagnosisReport& r) {
    std::string out = fmt::format("# Regression diagnosis: {}\n\n{}\n", to_string(r.classification),
                                  headline(r.classification));
    if (r.classification == Classification::TypeB) {
        out += "\nRoot cause: population bias in ";
        const auto names = r.bias ? r.bias->biased_features() : std::vector<std::string>{};
        for (std::size_t i = 0; i < names.size(); ++i) out += (i ? ", `" : "`") + names[i] + "`";
        out += ".\n";
    }

    out += "\n## Target metric `" + cell(r.config_echo.target_column) + "`\n\n";
    comparison_table_header(out);
    comparison_row(out, "Raw", r.comparison_raw);
    if (r.comparison_normalized) comparison_row(out, "Normalized", *r.comparison_normalized);

    if (r.bias) {
        out += "\n## Population bias\n\n";
        bias_tables(out, *r.bias);
    }
    if (r.normalization) {
        const auto& n = *r.normalization;
        out += fmt::format(
            "\n## Normalization\n\nMatched {} pairs ({} of the smaller dataset), propensity bin width {:.4g}.\n",
            n.n_pairs, pct(n.matched_fraction), n.bin_width);
        if (r.residual_bias_warning) {
            out += "\nResidual bias remains after matching:\n\n";
            bias_tables(out, n.residual_bias);
        }
    }
    if (r.ranking) {
        out += fmt::format("\n## Feature ranking ({})\n\n", to_string(r.ranking->direction));
        ranking_table(out, *r.ranking);
    }

    const auto& log = r.preprocess_log;
    if (!log.dropped_constant.empty() || !log.dropped_uninformative.empty() || !log.binned.empty()) {
        out += "\n## Preprocessing\n\n";
        for (const auto& name : log.dropped_constant) out += fmt::format("- dropped constant `{}`\n", name);
        for (const auto& [name, p] : log.dropped_uninformative)
            out += fmt::format("- dropped uninformative `{}` (p = {})\n", name, pvalue(p));
        for (const auto& b : log.binned) {
            out += fmt::format("- binned `{}`: kept {} values, {} rows in {}\n", b.name, b.kept_bins, b.other_count,
                               kOtherBin);
        }
    }
    warning_list(out, r.warnings);
    return out;
}

}  // namespace

Format format_from_string(std::string_view s) {
    if (s == "json") return Format::json;
    if (s == "markdown") return Format::markdown;
    throw std::invalid_argument("unknown format '" + std::string(s) + "' (expected json or markdown)");
}

std::string render_report(const DiagnosisReport& report, Format format) {
    return format == Format::json ? dump(detail::report_json(report)) : markdown(report);
}

DiagnosisReport report_from_json(std::string_view text) {
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("report is not valid JSON: ") + e.what());
    }
    return detail::parse_report(j);
}

std::string render_bias(const BiasReport& report, Format format) {
    if (format == Format::json) return dump(detail::bias_json(report));
    std::string out = "# Population bias\n\n";
    bias_tables(out, report);
    return out;
}

std::string render_comparison(const MetricComparison& comparison, Format format) {
    if (format == Format::json) return dump(detail::comparison_json(comparison));
    std::string out = "# Target metric comparison\n\n";
    comparison_table_header(out);
    comparison_row(out, "Raw", comparison);
    return out;
}

std::string render_ranking(const RankTable& table, const std::vector<Issue>& warnings, Format format) {
    if (format == Format::json) {
        ojson j = detail::ranking_json(table);
        j["warnings"] = detail::issues_json(warnings);
        return dump(j);
    }
    std::string out = fmt::format("# Feature ranking ({})\n\n", to_string(table.direction));
    ranking_table(out, table);
    warning_list(out, warnings);
    return out;
}

}  // namespace regdiag
