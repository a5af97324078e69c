#include "regdiag/preprocess.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "regdiag/stats.hpp"

namespace regdiag {

namespace {

std::string shortest(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, end);
}

// Kind used when the two sides of a hypothesis column were inferred differently.
ColumnKind pooled_kind(const Column& c, const Column& t) {
    if (c.kind() == t.kind()) return c.kind();
    if (c.kind() == ColumnKind::categorical || t.kind() == ColumnKind::categorical) return ColumnKind::categorical;
    return ColumnKind::numeric;
}

std::vector<double> numeric_values(const Column& col) {
    if (col.kind() == ColumnKind::numeric) return {col.numbers().begin(), col.numbers().end()};
    if (col.kind() == ColumnKind::binary) {
        std::vector<double> out;
        out.reserve(col.size());
        for (auto b : col.bits()) out.push_back(b < 0 ? std::nan("") : static_cast<double>(b));
        return out;
    }
    throw std::logic_error(col.name() + " is categorical and cannot be binned numerically");
}

Column categorical_view(const Column& col) {
    if (col.kind() != ColumnKind::numeric) return col.as_categorical();
    std::vector<std::optional<std::string>> tokens;
    tokens.reserve(col.size());
    for (std::size_t i = 0; i < col.size(); ++i) tokens.push_back(col.token(i));
    return Column::categorical(col.name(), tokens);
}

// Summary used by is_constant: nullopt = several distinct values.
struct Single {
    bool empty = true;
    std::optional<std::string> value;  // nullopt = null
};

std::optional<Single> single_value(const Column& col) {
    Single s;
    if (col.size() == 0) return s;
    s.empty = false;
    switch (col.kind()) {
        case ColumnKind::categorical: {
            const auto codes = col.codes();
            const auto first = codes[0];
            // Distinct codes can still share a label only if the dictionary
            // has duplicates, which the constructors never produce.
            if (std::any_of(codes.begin(), codes.end(), [&](auto c) { return c != first; })) return std::nullopt;
            if (first >= 0) s.value = col.dictionary()[static_cast<std::size_t>(first)];
            return s;
        }
        case ColumnKind::binary: {
            const auto bits = col.bits();
            const auto first = bits[0];
            if (std::any_of(bits.begin(), bits.end(), [&](auto b) { return b != first; })) return std::nullopt;
            if (first >= 0) s.value = first ? "1" : "0";
            return s;
        }
        case ColumnKind::numeric: {
            const auto nums = col.numbers();
            const double first = nums[0];
            const bool first_null = std::isnan(first);
            for (double v : nums) {
                if (std::isnan(v) != first_null || (!first_null && v != first)) return std::nullopt;
            }
            if (!first_null) s.value = shortest(first);
            return s;
        }
    }
    return std::nullopt;
}

// Sorts labels lexicographically and rewrites codes to match.
void canonicalize(BinnedFeature& f) {
    std::vector<std::int32_t> order(f.labels.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return f.labels[a] < f.labels[b]; });
    std::vector<std::int32_t> remap(f.labels.size());
    std::vector<std::string> sorted;
    sorted.reserve(f.labels.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        remap[static_cast<std::size_t>(order[i])] = static_cast<std::int32_t>(i);
        sorted.push_back(std::move(f.labels[static_cast<std::size_t>(order[i])]));
    }
    f.labels = std::move(sorted);
    for (auto& c : f.codes) {
        if (c >= 0) c = remap[static_cast<std::size_t>(c)];
    }
}

}  // namespace

std::vector<std::int64_t> BinnedFeature::label_counts() const {
    std::vector<std::int64_t> counts(labels.size(), 0);
    for (auto c : codes) {
        if (c >= 0) ++counts[static_cast<std::size_t>(c)];
    }
    return counts;
}

bool is_constant(const Column& control, const Column& treatment) {
    const auto a = single_value(control);
    const auto b = single_value(treatment);
    if (!a || !b) return false;
    if (a->empty || b->empty) return true;
    return a->value == b->value;
}

std::vector<std::string> drop_constant(std::span<const std::string> features, const Dataset& control,
                                       const Dataset& treatment, PreprocessLog& log) {
    std::vector<std::string> kept;
    for (const auto& name : features) {
        if (is_constant(control.column(name), treatment.column(name)))
            log.dropped_constant.push_back(name);
        else
            kept.push_back(name);
    }
    return kept;
}

BinnedFeature pool_categorical(const Column& control, const Column& treatment) {
    BinnedFeature f;
    f.name = control.name();
    f.n_control = control.size();
    f.codes.assign(control.size() + treatment.size(), -1);

    std::map<std::string, std::int32_t, std::less<>> ids;
    std::size_t offset = 0;
    for (const Column* side : {&control, &treatment}) {
        const Column cat = categorical_view(*side);
        const auto& dict = cat.dictionary();
        std::vector<std::int32_t> remap(dict.size(), -1);
        const auto codes = cat.codes();
        for (std::size_t i = 0; i < codes.size(); ++i) {
            const auto code = codes[i];
            if (code < 0) continue;
            auto& r = remap[static_cast<std::size_t>(code)];
            if (r < 0) {
                const auto& label = dict[static_cast<std::size_t>(code)];
                r = ids.try_emplace(label, static_cast<std::int32_t>(ids.size())).first->second;
            }
            f.codes[offset + i] = r;
        }
        offset += codes.size();
    }
    f.labels.resize(ids.size());
    for (const auto& [label, id] : ids) f.labels[static_cast<std::size_t>(id)] = label;
    canonicalize(f);
    return f;
}

BinnedFeature binarize_numeric(const Column& control, const Column& treatment, int k) {
    if (k < 2) throw std::invalid_argument("binarize_numeric requires k >= 2");
    BinnedFeature f;
    f.name = control.name();
    f.n_control = control.size();

    std::vector<double> pooled = numeric_values(control);
    const auto tv = numeric_values(treatment);
    pooled.insert(pooled.end(), tv.begin(), tv.end());

    std::vector<double> sorted;
    sorted.reserve(pooled.size());
    for (double v : pooled) {
        if (!std::isnan(v)) sorted.push_back(v);
    }
    f.codes.assign(pooled.size(), -1);
    if (sorted.empty()) return f;
    std::sort(sorted.begin(), sorted.end());

    const std::size_t n = sorted.size();
    const double max_value = sorted.back();
    std::vector<double> edges;
    for (std::size_t i = 1; i < static_cast<std::size_t>(k); ++i) {
        const std::size_t rank = (i * n + static_cast<std::size_t>(k) - 1) / static_cast<std::size_t>(k);
        const double edge = sorted[std::max<std::size_t>(rank, 1) - 1];
        if (edge < max_value && (edges.empty() || edge > edges.back())) edges.push_back(edge);
    }

    const std::size_t bins = edges.size() + 1;
    for (std::size_t i = 1; i <= bins; ++i) f.labels.push_back("q" + std::to_string(i));
    for (std::size_t i = 0; i < pooled.size(); ++i) {
        if (std::isnan(pooled[i])) continue;
        const auto it = std::lower_bound(edges.begin(), edges.end(), pooled[i]);
        f.codes[i] = static_cast<std::int32_t>(it - edges.begin());
    }
    canonicalize(f);
    return f;
}

BinnedFeature bin_tail(const BinnedFeature& feature, int max_bins, std::int64_t* other_count) {
    if (max_bins < 2) throw std::invalid_argument("bin_tail requires max_bins >= 2");
    if (other_count) *other_count = 0;
    const auto keep = static_cast<std::size_t>(max_bins - 1);
    if (feature.labels.size() <= keep) return feature;

    const auto counts = feature.label_counts();
    std::vector<std::size_t> order(feature.labels.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) {
        if (counts[a] != counts[b]) return counts[a] > counts[b];
        return feature.labels[a] < feature.labels[b];
    });

    BinnedFeature out;
    out.name = feature.name;
    out.n_control = feature.n_control;
    std::vector<std::int32_t> remap(feature.labels.size(), static_cast<std::int32_t>(keep));
    std::int64_t folded = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i < keep) {
            remap[order[i]] = static_cast<std::int32_t>(i);
            out.labels.push_back(feature.labels[order[i]]);
        } else {
            folded += counts[order[i]];
        }
    }
    out.labels.emplace_back(kOtherBin);
    out.codes.reserve(feature.codes.size());
    for (auto c : feature.codes) out.codes.push_back(c < 0 ? -1 : remap[static_cast<std::size_t>(c)]);
    canonicalize(out);
    if (other_count) *other_count = folded;
    return out;
}

double informativeness_p(const BinnedFeature& feature, std::span<const std::int8_t> pooled_target) {
    if (pooled_target.size() != feature.codes.size())
        throw std::invalid_argument("target length does not match feature " + feature.name);
    std::vector<std::array<std::int64_t, 2>> table(feature.labels.size(), {0, 0});
    std::array<std::int64_t, 2> totals{0, 0};
    for (std::size_t i = 0; i < feature.codes.size(); ++i) {
        const auto code = feature.codes[i];
        const auto y = pooled_target[i];
        if (code < 0 || y < 0) continue;
        ++table[static_cast<std::size_t>(code)][static_cast<std::size_t>(y)];
        ++totals[static_cast<std::size_t>(y)];
    }
    if (totals[0] == 0 || totals[1] == 0 || table.size() < 2) return 1.0;
    return contingency_test(table, 0.5).p_value;
}

std::vector<BinnedFeature> prune_uninformative(std::vector<BinnedFeature> features,
                                               std::span<const std::int8_t> pooled_target, double threshold,
                                               PreprocessLog& log) {
    std::vector<BinnedFeature> kept;
    for (auto& f : features) {
        const double p = informativeness_p(f, pooled_target);
        if (p > threshold)
            log.dropped_uninformative.emplace_back(f.name, p);
        else
            kept.push_back(std::move(f));
    }
    return kept;
}

std::vector<std::int8_t> pool_target(const Column& control, const Column& treatment) {
    std::vector<std::int8_t> out(control.bits().begin(), control.bits().end());
    out.insert(out.end(), treatment.bits().begin(), treatment.bits().end());
    return out;
}

EncodedFeature::EncodedFeature(std::shared_ptr<const EncodedSource> source, int bin)
    : source_(std::move(source)), bin_(bin) {
    if (bin_ >= static_cast<int>(source_->labels.size()))
        throw std::out_of_range("bin index out of range for " + source_->name);
    name_ = bin_ < 0 ? source_->name + ".is_null"
                     : source_->name + "=" + source_->labels[static_cast<std::size_t>(bin_)];
}

std::size_t EncodedFeature::size(Side side) const noexcept {
    return side == Side::control ? source_->n_control : source_->codes.size() - source_->n_control;
}

std::vector<std::uint8_t> EncodedFeature::values(Side side) const {
    std::vector<std::uint8_t> out(size(side));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = value(side, i);
    return out;
}

Encoding encode(const Dataset& control, const Dataset& treatment, const DiagnosisConfig& config) {
    Encoding enc;
    std::vector<std::string> sources = config.hypothesis_columns;
    std::sort(sources.begin(), sources.end());

    const auto survivors = drop_constant(sources, control, treatment, enc.log);
    const auto target = pool_target(control.column(config.target_column), treatment.column(config.target_column));

    for (const auto& name : survivors) {
        const Column& c = control.column(name);
        const Column& t = treatment.column(name);
        BinnedFeature binned = pooled_kind(c, t) == ColumnKind::numeric
                                   ? binarize_numeric(c, t, config.numeric_hypothesis_bins)
                                   : pool_categorical(c, t);
        std::int64_t other = 0;
        binned = bin_tail(binned, config.max_bins, &other);
        if (other > 0) enc.log.binned.push_back({name, config.max_bins - 1, other});

        const bool has_null = std::any_of(binned.codes.begin(), binned.codes.end(), [](auto x) { return x < 0; });
        const double p = informativeness_p(binned, target);
        const bool informative = p <= config.prune_p_threshold;
        if (!informative) enc.log.dropped_uninformative.emplace_back(name, p);
        const bool want_null = config.add_is_null && has_null;
        if (!informative && !want_null) continue;

        auto source = std::make_shared<EncodedSource>();
        source->name = name;
        source->labels = std::move(binned.labels);
        source->n_control = binned.n_control;
        source->codes.reserve(binned.codes.size());
        for (auto code : binned.codes) source->codes.push_back(static_cast<std::int16_t>(code));
        std::shared_ptr<const EncodedSource> shared = std::move(source);

        if (informative) {
            for (std::size_t b = 0; b < shared->labels.size(); ++b)
                enc.features.emplace_back(shared, static_cast<int>(b));
        }
        if (want_null) enc.features.emplace_back(shared, -1);
    }

    if (!config.add_is_null)
        enc.warnings.push_back({"is_null_excluded",
                                "is-null indicators are disabled; missing telemetry can carry diagnostic meaning"});
    if (enc.features.empty())
        enc.warnings.push_back({"no_features", "no hypothesis features survived preprocessing"});
    return enc;
}

}  // namespace regdiag
