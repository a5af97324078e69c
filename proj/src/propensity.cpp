#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "regdiag/bias.hpp"
#include "regdiag/random.hpp"

namespace regdiag {

namespace {

// Label of each row as the bias check sees it: category text, "0"/"1" for
// binary, numeric token otherwise, "__null__" for null.
std::vector<std::string> row_labels_dictionary(const Column& col, std::vector<std::int32_t>& codes) {
    if (col.kind() == ColumnKind::numeric) {
        std::map<std::string, std::int32_t> ids;
        std::vector<std::string> dict;
        codes.resize(col.size());
        for (std::size_t i = 0; i < col.size(); ++i) {
            auto label = col.token(i).value_or(std::string(kNullBin));
            auto [it, inserted] = ids.try_emplace(label, static_cast<std::int32_t>(dict.size()));
            if (inserted) dict.push_back(label);
            codes[i] = it->second;
        }
        return dict;
    }
    const Column cat = col.as_categorical();
    std::vector<std::string> dict = cat.dictionary();
    const auto null_code = static_cast<std::int32_t>(dict.size());
    dict.emplace_back(kNullBin);
    codes.assign(cat.codes().begin(), cat.codes().end());
    for (auto& c : codes) {
        if (c < 0) c = null_code;
    }
    return dict;
}

// Maps a column onto a sorted category list; unseen labels become -1.
std::vector<std::int32_t> layout_codes(const Column& col, const std::vector<std::string>& categories) {
    std::vector<std::int32_t> raw;
    const auto dict = row_labels_dictionary(col, raw);
    std::vector<std::int32_t> remap(dict.size(), -1);
    for (std::size_t i = 0; i < dict.size(); ++i) {
        auto it = std::lower_bound(categories.begin(), categories.end(), dict[i]);
        if (it != categories.end() && *it == dict[i]) remap[i] = static_cast<std::int32_t>(it - categories.begin());
    }
    for (auto& c : raw) c = remap[static_cast<std::size_t>(c)];
    return raw;
}

struct VectorHash {
    std::size_t operator()(const std::vector<std::int32_t>& v) const noexcept {
        std::size_t h = 1469598103934665603ULL;
        for (auto x : v) h = (h ^ static_cast<std::size_t>(static_cast<std::uint32_t>(x))) * 1099511628211ULL;
        return h;
    }
};

double gini_weighted(double wc, double wt) {
    const double w = wc + wt;
    if (w <= 0.0) return 0.0;
    const double pc = wc / w;
    const double pt = wt / w;
    return w * (1.0 - pc * pc - pt * pt);
}

struct Indicator {
    int column;
    std::int32_t category;
};

class TreeBuilder {
public:
    TreeBuilder(const std::vector<std::vector<std::int32_t>>& patterns, const std::vector<double>& wc,
                const std::vector<double>& wt, const std::vector<Indicator>& indicators, const ForestParams& params,
                Rng& rng)
        : patterns_(patterns), wc_(wc), wt_(wt), indicators_(indicators), params_(params), rng_(rng) {
        const auto d = indicators_.size();
        max_features_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(d))));
    }

    DecisionTree build(std::vector<std::size_t> members) {
        DecisionTree tree;
        grow(tree, std::move(members), 0);
        return tree;
    }

private:
    int grow(DecisionTree& tree, std::vector<std::size_t> members, int depth) {
        double wc = 0.0;
        double wt = 0.0;
        for (auto p : members) {
            wc += wc_[p];
            wt += wt_[p];
        }
        const int index = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(TreeNode{});
        tree.nodes[static_cast<std::size_t>(index)].value = wc + wt > 0.0 ? wc / (wc + wt) : 0.5;

        const double min_leaf = params_.min_leaf;
        if (depth >= params_.max_depth || wc + wt < 2.0 * min_leaf || wc == 0.0 || wt == 0.0) return index;

        // Visit indicators in random order until max_features_ of them split
        // the node into two non-empty sides.
        std::vector<std::size_t> order(indicators_.size());
        std::iota(order.begin(), order.end(), 0);
        const double parent = gini_weighted(wc, wt);
        double best_gain = 1e-12;
        std::size_t best = indicators_.size();
        std::size_t visited = 0;
        for (std::size_t i = 0; i < order.size() && visited < max_features_; ++i) {
            const auto j = i + static_cast<std::size_t>(rng_.below(order.size() - i));
            std::swap(order[i], order[j]);
            const Indicator& ind = indicators_[order[i]];
            double rc = 0.0;
            double rt = 0.0;
            for (auto p : members) {
                if (patterns_[p][static_cast<std::size_t>(ind.column)] == ind.category) {
                    rc += wc_[p];
                    rt += wt_[p];
                }
            }
            const double lc = wc - rc;
            const double lt = wt - rt;
            if (rc + rt <= 0.0 || lc + lt <= 0.0) continue;
            ++visited;
            if (rc + rt < min_leaf || lc + lt < min_leaf) continue;
            const double gain = parent - gini_weighted(lc, lt) - gini_weighted(rc, rt);
            if (gain > best_gain) {
                best_gain = gain;
                best = order[i];
            }
        }
        if (best == indicators_.size()) return index;

        const Indicator& ind = indicators_[best];
        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        double right_weight = 0.0;
        for (auto p : members) {
            if (patterns_[p][static_cast<std::size_t>(ind.column)] == ind.category) {
                right.push_back(p);
                right_weight += wc_[p] + wt_[p];
            } else {
                left.push_back(p);
            }
        }
        const bool default_right = right_weight > (wc + wt) - right_weight;
        const int l = grow(tree, std::move(left), depth + 1);
        const int r = grow(tree, std::move(right), depth + 1);
        TreeNode& node = tree.nodes[static_cast<std::size_t>(index)];
        node.column = ind.column;
        node.category = ind.category;
        node.left = l;
        node.right = r;
        node.default_right = default_right;
        return index;
    }

    const std::vector<std::vector<std::int32_t>>& patterns_;
    const std::vector<double>& wc_;
    const std::vector<double>& wt_;
    const std::vector<Indicator>& indicators_;
    const ForestParams& params_;
    Rng& rng_;
    std::size_t max_features_ = 1;
};

double leaf_value(const DecisionTree& tree, std::span<const std::int32_t> codes) {
    const TreeNode* node = &tree.nodes.front();
    while (!node->is_leaf()) {
        const auto code = codes[static_cast<std::size_t>(node->column)];
        const bool go_right = code < 0 ? node->default_right : code == node->category;
        node = &tree.nodes[static_cast<std::size_t>(go_right ? node->right : node->left)];
    }
    return node->value;
}

}  // namespace

PropensityModel::PropensityModel(FeatureLayout layout, std::vector<DecisionTree> trees, std::vector<double> oob_scores)
    : layout_(std::move(layout)), trees_(std::move(trees)), oob_scores_(std::move(oob_scores)) {
    if (trees_.empty()) throw std::invalid_argument("a propensity model needs at least one tree");
    for (const auto& t : trees_) {
        if (t.nodes.empty()) throw std::invalid_argument("a propensity tree needs at least one node");
    }
}

std::vector<double> PropensityModel::score(const Dataset& dataset) const {
    const std::size_t n = dataset.row_count();
    const std::size_t k = layout_.columns.size();
    std::vector<std::int32_t> codes(n * k);
    for (std::size_t j = 0; j < k; ++j) {
        const auto col = layout_codes(dataset.column(layout_.columns[j]), layout_.categories[j]);
        for (std::size_t i = 0; i < n; ++i) codes[i * k + j] = col[i];
    }
    std::vector<double> scores(n, 0.0);
    const std::span<const std::int32_t> all(codes);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (const auto& tree : trees_) sum += leaf_value(tree, all.subspan(i * k, k));
        scores[i] = std::clamp(sum / static_cast<double>(trees_.size()), 0.0, 1.0);
    }
    return scores;
}

std::vector<double> score(const PropensityModel& model, const Dataset& dataset) { return model.score(dataset); }

PropensityModel fit_propensity(const Dataset& control, const Dataset& treatment, std::span<const std::string> features,
                               const ForestParams& params, std::uint64_t seed) {
    if (params.n_trees < 1 || params.max_depth < 1 || params.min_leaf < 1)
        throw std::domain_error("forest parameters must be positive");
    const std::size_t n_c = control.row_count();
    const std::size_t n_t = treatment.row_count();
    const std::size_t n = n_c + n_t;
    if (n < 2 * static_cast<std::size_t>(params.min_leaf))
        throw std::domain_error("propensity fit needs at least 2 * min_leaf rows, got " + std::to_string(n));

    FeatureLayout layout;
    layout.columns.assign(features.begin(), features.end());
    const std::size_t k = layout.columns.size();

    // Pooled per-row category codes, control rows first.
    std::vector<std::vector<std::int32_t>> column_codes(k);
    for (std::size_t j = 0; j < k; ++j) {
        std::set<std::string> cats;
        std::vector<std::int32_t> tmp;
        for (const Dataset* ds : {&control, &treatment}) {
            const auto dict = row_labels_dictionary(ds->column(layout.columns[j]), tmp);
            std::vector<bool> used(dict.size(), false);
            for (auto c : tmp) used[static_cast<std::size_t>(c)] = true;
            for (std::size_t i = 0; i < dict.size(); ++i) {
                if (used[i]) cats.insert(dict[i]);
            }
        }
        layout.categories.emplace_back(cats.begin(), cats.end());
        auto cc = layout_codes(control.column(layout.columns[j]), layout.categories[j]);
        const auto ct = layout_codes(treatment.column(layout.columns[j]), layout.categories[j]);
        cc.insert(cc.end(), ct.begin(), ct.end());
        column_codes[j] = std::move(cc);
    }

    // Rows sharing a category tuple are indistinguishable to the trees, so
    // fitting runs on distinct patterns weighted by bootstrap counts.
    std::vector<std::vector<std::int32_t>> patterns;
    std::vector<std::uint32_t> row_pattern(n);
    {
        std::unordered_map<std::vector<std::int32_t>, std::uint32_t, VectorHash> ids;
        std::vector<std::int32_t> key(k);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < k; ++j) key[j] = column_codes[j][i];
            auto [it, inserted] = ids.try_emplace(key, static_cast<std::uint32_t>(patterns.size()));
            if (inserted) patterns.push_back(key);
            row_pattern[i] = it->second;
        }
    }

    std::vector<Indicator> indicators;
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t c = 0; c < layout.categories[j].size(); ++c)
            indicators.push_back({static_cast<int>(j), static_cast<std::int32_t>(c)});
    }

    std::vector<DecisionTree> trees;
    trees.reserve(static_cast<std::size_t>(params.n_trees));
    std::vector<double> oob_sum(n, 0.0);
    std::vector<std::uint32_t> oob_count(n, 0);
    std::vector<std::uint32_t> in_bag(n);
    for (int t = 0; t < params.n_trees; ++t) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        std::fill(in_bag.begin(), in_bag.end(), 0);
        for (std::size_t draw = 0; draw < n; ++draw) ++in_bag[rng.below(n)];

        std::vector<double> wc(patterns.size(), 0.0);
        std::vector<double> wt(patterns.size(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (!in_bag[i]) continue;
            (i < n_c ? wc : wt)[row_pattern[i]] += in_bag[i];
        }
        std::vector<std::size_t> members;
        for (std::size_t p = 0; p < patterns.size(); ++p) {
            if (wc[p] + wt[p] > 0.0) members.push_back(p);
        }
        TreeBuilder builder(patterns, wc, wt, indicators, params, rng);
        DecisionTree tree = builder.build(std::move(members));

        std::vector<double> pattern_value(patterns.size());
        for (std::size_t p = 0; p < patterns.size(); ++p) pattern_value[p] = leaf_value(tree, patterns[p]);
        for (std::size_t i = 0; i < n; ++i) {
            if (in_bag[i]) continue;
            oob_sum[i] += pattern_value[row_pattern[i]];
            ++oob_count[i];
        }
        trees.push_back(std::move(tree));
    }

    std::vector<double> in_bag_score(patterns.size(), 0.0);
    for (std::size_t p = 0; p < patterns.size(); ++p) {
        double s = 0.0;
        for (const auto& tree : trees) s += leaf_value(tree, patterns[p]);
        in_bag_score[p] = s / static_cast<double>(trees.size());
    }
    std::vector<double> oob(n);
    for (std::size_t i = 0; i < n; ++i)
        oob[i] = oob_count[i] ? oob_sum[i] / oob_count[i] : in_bag_score[row_pattern[i]];

    return PropensityModel(std::move(layout), std::move(trees), std::move(oob));
}

}  // namespace regdiag
