#pragma once

// Builders and brute-force reference implementations shared by the unit
// tests and the acceptance runner. The references deliberately use the
// simplest possible formulation (string maps, full sorts, linear scans) so
// they share no code paths with the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "regdiag/dataset.hpp"
#include "regdiag/preprocess.hpp"
#include "regdiag/random.hpp"

namespace support {

using regdiag::Column;
using regdiag::Dataset;

inline Column cat(std::string name, const std::vector<std::string>& values) {
    std::vector<std::optional<std::string>> v;
    for (const auto& s : values) v.push_back(s.empty() ? std::nullopt : std::optional<std::string>(s));
    return Column::categorical(std::move(name), v);
}

inline Column bin(std::string name, std::vector<std::int8_t> values) {
    return Column::binary(std::move(name), std::move(values));
}

inline Column num(std::string name, std::vector<double> values) {
    return Column::numeric(std::move(name), std::move(values));
}

inline std::vector<std::string> repeat(const std::string& value, std::size_t n) {
    return std::vector<std::string>(n, value);
}

inline std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

// Reference nearest-rank quantile binning: edge_i is the ceil(i*n/k)-th
// smallest value; duplicate edges and an edge equal to the maximum vanish.
// Returns one label per value ("" for null).
inline std::vector<std::string> ref_quantile_bins(const std::vector<double>& values, int k) {
    std::vector<double> sorted;
    for (double v : values) {
        if (!std::isnan(v)) sorted.push_back(v);
    }
    std::vector<std::string> out(values.size());
    if (sorted.empty()) return out;
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<long long>(sorted.size());
    std::set<double> edge_set;
    for (int i = 1; i < k; ++i) {
        const long long rank = (static_cast<long long>(i) * n + k - 1) / k;  // ceil(i*n/k)
        const double e = sorted[static_cast<std::size_t>(std::max(1LL, rank) - 1)];
        if (e < sorted.back()) edge_set.insert(e);
    }
    const std::vector<double> edges(edge_set.begin(), edge_set.end());
    for (std::size_t r = 0; r < values.size(); ++r) {
        if (std::isnan(values[r])) continue;
        std::size_t b = 0;
        while (b < edges.size() && values[r] > edges[b]) ++b;
        out[r] = "q" + std::to_string(b + 1);
    }
    return out;
}

// Reference tail binning: keep the max_bins - 1 most frequent labels (ties by
// label), everything else becomes "__other__"; "" (null) passes through.
inline std::vector<std::string> ref_tail_bins(const std::vector<std::string>& values, int max_bins) {
    std::map<std::string, long long> counts;
    for (const auto& v : values) {
        if (!v.empty()) ++counts[v];
    }
    std::vector<std::pair<std::string, long long>> order(counts.begin(), counts.end());
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    std::set<std::string> keep;
    if (static_cast<int>(order.size()) <= max_bins - 1) {
        for (const auto& [label, c] : order) keep.insert(label);
    } else {
        for (int i = 0; i < max_bins - 1; ++i) keep.insert(order[static_cast<std::size_t>(i)].first);
    }
    std::vector<std::string> out;
    for (const auto& v : values) out.push_back(v.empty() || keep.contains(v) ? v : std::string(regdiag::kOtherBin));
    return out;
}

// Reference P_T(f | fail) - P_C(f | fail) from plain vectors.
inline double ref_hazard(const std::vector<int>& f_c, const std::vector<int>& y_c, const std::vector<int>& f_t,
                         const std::vector<int>& y_t) {
    auto cond = [](const std::vector<int>& f, const std::vector<int>& y) {
        long long fails = 0;
        long long joint = 0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (y[i] == 1) {
                ++fails;
                if (f[i] == 1) ++joint;
            }
        }
        return static_cast<double>(joint) / static_cast<double>(fails);
    };
    return cond(f_t, y_t) - cond(f_c, y_c);
}

// Shorthand for a pair of random categorical columns used by property tests.
inline std::vector<std::string> random_labels(regdiag::Rng& rng, std::size_t n, int n_labels, double null_rate) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (rng.bernoulli(null_rate))
            out.emplace_back();
        else
            out.push_back("l" + std::to_string(rng.below(static_cast<std::uint64_t>(n_labels))));
    }
    return out;
}

// Labels of a binned feature per pooled row ("" for null).
inline std::vector<std::string> decode(const regdiag::BinnedFeature& f) {
    std::vector<std::string> out;
    for (auto code : f.codes) out.push_back(code < 0 ? "" : f.labels[static_cast<std::size_t>(code)]);
    return out;
}

// Brute-force Pearson statistic of labels x target (both non-null) and its p-value.
inline double ref_informativeness(const std::vector<std::string>& labels, const std::vector<int>& y) {
    std::map<std::string, std::array<double, 2>> table;
    double col[2] = {0, 0};
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i].empty() || y[i] < 0) continue;
        table[labels[i]][static_cast<std::size_t>(y[i])] += 1;
        col[y[i]] += 1;
    }
    if (col[0] == 0 || col[1] == 0 || table.size() < 2) return 1.0;
    const double total = col[0] + col[1];
    double stat = 0.0;
    for (const auto& [label, row] : table) {
        const double rt = row[0] + row[1];
        for (int j = 0; j < 2; ++j) {
            const double e = rt * col[j] / total;
            stat += (row[static_cast<std::size_t>(j)] - e) * (row[static_cast<std::size_t>(j)] - e) / e;
        }
    }
    if (stat <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * static_cast<double>(table.size() - 1), 0.5 * stat);
}

}  // namespace support
