#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>

namespace regdiag {

/// Outcome of a chi-squared test; `significant` is p_value < threshold (strict).
struct TestResult {
    double statistic = 0.0;
    int dof = 1;
    double p_value = 1.0;
    bool significant = false;

    friend bool operator==(const TestResult&, const TestResult&) = default;
};

/// Survival function 1 - F(x; dof) of the chi-squared distribution.
/// Throws std::domain_error for dof < 1 or x < 0 (or NaN).
double chi2_sf(double x, int dof);

/// Regularized upper incomplete gamma Q(a, z) for a > 0, z >= 0.
double gamma_q(double a, double z);

/// Pearson chi-squared on the 2x2 table (successes, failures) x (control,
/// treatment), without continuity correction. A zero expected cell (pooled
/// proportion 0 or 1) yields statistic 0 and p 1.
TestResult two_proportion_test(std::int64_t successes_c, std::int64_t n_c, std::int64_t successes_t,
                               std::int64_t n_t, double threshold);

/// Pearson chi-squared on a k x 2 table of (control, treatment) counts per bin.
/// Rows with zero combined count are dropped first; dof = remaining rows - 1.
/// Fewer than two remaining rows yields statistic 0, p 1.
TestResult contingency_test(std::span<const std::array<std::int64_t, 2>> table, double threshold);

using Histogram = std::map<std::string, std::int64_t>;

/// 100 x total-variation distance between the two empirical distributions,
/// over the union of bins. Throws std::domain_error on a zero total.
double percent_deviation(const Histogram& control, const Histogram& treatment);

/// Standard normal upper tail P(Z > z).
double normal_sf(double z);
/// Standard normal quantile: z with P(Z <= z) = p, for p in (0, 1).
double normal_quantile(double p);

}  // namespace regdiag
