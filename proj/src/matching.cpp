#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "regdiag/bias.hpp"
#include "regdiag/errors.hpp"
#include "regdiag/random.hpp"

namespace regdiag {

namespace {

double population_std(std::span<const double> a, std::span<const double> b) {
    const double first = a.front();
    const auto same = [first](double v) { return v == first; };
    if (std::all_of(a.begin(), a.end(), same) && std::all_of(b.begin(), b.end(), same)) return 0.0;
    const double n = static_cast<double>(a.size() + b.size());
    double sum = 0.0;
    for (double v : a) sum += v;
    for (double v : b) sum += v;
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : a) ss += (v - mean) * (v - mean);
    for (double v : b) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / n);
}

// Uniform sample of m indices without replacement (partial Fisher-Yates).
void sample_into(std::vector<std::size_t>& pool, std::size_t m, Rng& rng, std::vector<std::size_t>& out) {
    for (std::size_t i = 0; i < m; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
        out.push_back(pool[i]);
    }
}

}  // namespace

MatchResult match_on_bins(std::span<const double> scores_c, std::span<const double> scores_t,
                          double caliper_coefficient, std::uint64_t seed) {
    if (scores_c.empty() || scores_t.empty()) throw std::domain_error("match_on_bins requires nonempty score vectors");
    if (!(caliper_coefficient > 0.0)) throw std::domain_error("caliper_coefficient must be positive");

    MatchResult result;
    const double sd = population_std(scores_c, scores_t);
    result.bin_width = caliper_coefficient * sd;
    const bool single_bin = !(result.bin_width > 0.0);

    auto bin_of = [&](double s) -> std::int64_t {
        return single_bin ? 0 : static_cast<std::int64_t>(std::floor(s / result.bin_width));
    };
    std::map<std::int64_t, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> bins;
    for (std::size_t i = 0; i < scores_c.size(); ++i) bins[bin_of(scores_c[i])].first.push_back(i);
    for (std::size_t i = 0; i < scores_t.size(); ++i) bins[bin_of(scores_t[i])].second.push_back(i);

    Rng rng(seed);
    for (auto& [bin, members] : bins) {
        auto& [c, t] = members;
        const std::size_t m = std::min(c.size(), t.size());
        if (m == 0) continue;
        sample_into(c, m, rng, result.control_idx);
        sample_into(t, m, rng, result.treatment_idx);
    }
    if (result.control_idx.empty())
        throw DiagnosisError("no_overlap", "propensity score distributions do not overlap; populations are not comparable");

    std::sort(result.control_idx.begin(), result.control_idx.end());
    std::sort(result.treatment_idx.begin(), result.treatment_idx.end());
    result.matched_fraction = static_cast<double>(result.control_idx.size()) /
                              static_cast<double>(std::min(scores_c.size(), scores_t.size()));
    return result;
}

}  // namespace regdiag
