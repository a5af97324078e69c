#include "regdiag/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace regdiag {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIterations = 100000;

// Lower regularized gamma P(a, z) by its power series; converges fast for z < a + 1.
double gamma_p_series(double a, double z) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < kMaxIterations; ++n) {
        term *= z / (a + n);
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(-z + a * std::log(z) - std::lgamma(a));
}

// Upper regularized gamma Q(a, z) by modified Lentz continued fraction; z >= a + 1.
double gamma_q_fraction(double a, double z) {
    constexpr double tiny = 1e-300;
    double b = z + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) break;
    }
    return std::exp(-z + a * std::log(z) - std::lgamma(a)) * h;
}

TestResult finish(double statistic, int dof, double threshold) {
    TestResult r;
    r.statistic = std::max(0.0, statistic);
    r.dof = dof;
    r.p_value = std::clamp(chi2_sf(r.statistic, dof), 0.0, 1.0);
    r.significant = r.p_value < threshold;
    return r;
}

}  // namespace

double gamma_q(double a, double z) {
    if (!(a > 0.0)) throw std::domain_error("gamma_q requires a > 0");
    if (!(z >= 0.0)) throw std::domain_error("gamma_q requires z >= 0");
    if (z == 0.0) return 1.0;
    if (std::isinf(z)) return 0.0;
    if (z < a + 1.0) return std::clamp(1.0 - gamma_p_series(a, z), 0.0, 1.0);
    return std::clamp(gamma_q_fraction(a, z), 0.0, 1.0);
}

double chi2_sf(double x, int dof) {
    if (dof < 1) throw std::domain_error("chi2_sf requires dof >= 1");
    if (!(x >= 0.0)) throw std::domain_error("chi2_sf requires x >= 0");
    return gamma_q(0.5 * dof, 0.5 * x);
}

TestResult two_proportion_test(std::int64_t successes_c, std::int64_t n_c, std::int64_t successes_t,
                               std::int64_t n_t, double threshold) {
    if (n_c < 1 || n_t < 1) throw std::domain_error("two_proportion_test requires n >= 1 on both sides");
    if (successes_c < 0 || successes_t < 0 || successes_c > n_c || successes_t > n_t)
        throw std::domain_error("two_proportion_test requires 0 <= successes <= n");
    const std::array<std::array<std::int64_t, 2>, 2> table{{{successes_c, successes_t},
                                                            {n_c - successes_c, n_t - successes_t}}};
    return contingency_test(table, threshold);
}

TestResult contingency_test(std::span<const std::array<std::int64_t, 2>> table, double threshold) {
    std::array<double, 2> col_total{0.0, 0.0};
    std::vector<std::array<double, 2>> rows;
    rows.reserve(table.size());
    for (const auto& row : table) {
        if (row[0] < 0 || row[1] < 0) throw std::domain_error("contingency_test requires nonnegative counts");
        col_total[0] += static_cast<double>(row[0]);
        col_total[1] += static_cast<double>(row[1]);
        if (row[0] + row[1] > 0) rows.push_back({static_cast<double>(row[0]), static_cast<double>(row[1])});
    }
    if (col_total[0] < 1.0 || col_total[1] < 1.0)
        throw std::domain_error("contingency_test requires a positive total on both sides");
    if (rows.size() < 2) return TestResult{0.0, 1, 1.0, false};

    const double total = col_total[0] + col_total[1];
    double statistic = 0.0;
    for (const auto& row : rows) {
        const double row_total = row[0] + row[1];
        for (int j = 0; j < 2; ++j) {
            const double expected = row_total * col_total[j] / total;
            const double diff = row[j] - expected;
            statistic += diff * diff / expected;
        }
    }
    return finish(statistic, static_cast<int>(rows.size()) - 1, threshold);
}

double percent_deviation(const Histogram& control, const Histogram& treatment) {
    double total_c = 0.0;
    double total_t = 0.0;
    for (const auto& [bin, n] : control) {
        if (n < 0) throw std::domain_error("percent_deviation requires nonnegative counts");
        total_c += static_cast<double>(n);
    }
    for (const auto& [bin, n] : treatment) {
        if (n < 0) throw std::domain_error("percent_deviation requires nonnegative counts");
        total_t += static_cast<double>(n);
    }
    if (total_c <= 0.0 || total_t <= 0.0) throw std::domain_error("percent_deviation requires positive totals");

    // Merge-walk the two sorted maps over the union of bins.
    double sum = 0.0;
    auto c = control.begin();
    auto t = treatment.begin();
    while (c != control.end() || t != treatment.end()) {
        double pc = 0.0;
        double pt = 0.0;
        if (t == treatment.end() || (c != control.end() && c->first < t->first)) {
            pc = static_cast<double>(c->second) / total_c;
            ++c;
        } else if (c == control.end() || t->first < c->first) {
            pt = static_cast<double>(t->second) / total_t;
            ++t;
        } else {
            pc = static_cast<double>(c->second) / total_c;
            pt = static_cast<double>(t->second) / total_t;
            ++c;
            ++t;
        }
        sum += std::fabs(pc - pt);
    }
    return std::clamp(50.0 * sum, 0.0, 100.0);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile requires p in (0, 1)");
    // Bracketed bisection on the complementary error function; 200 halvings
    // of [-40, 40] reach double resolution.
    double lo = -40.0;
    double hi = 40.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (normal_sf(-mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace regdiag
