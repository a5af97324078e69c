#include "regdiag/config.hpp"

#include <istream>
#include <iterator>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "regdiag/errors.hpp"
#include "serialize.hpp"

namespace regdiag {

namespace {

using nlohmann::json;

const std::set<std::string, std::less<>> kKnownKeys = {
    "target_column",       "invariant_columns",   "hypothesis_columns",
    "metric_p_threshold",  "bias_p_threshold",    "bias_deviation_threshold_pct",
    "ranking_p_threshold", "max_bins",            "numeric_hypothesis_bins",
    "prune_p_threshold",   "add_is_null",         "caliper_coefficient",
    "forest",              "min_rows",            "min_matched_fraction",
    "direction",           "seed",
};

const std::set<std::string, std::less<>> kForestKeys = {"n_trees", "max_depth", "min_leaf"};

template <typename T>
void read(const json& obj, const char* key, T& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception&) {
        throw ConfigError(key, std::string("config key '") + key + "' has the wrong type");
    }
}

template <typename T>
void read_integer(const json& obj, const char* key, T& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_number_integer())
        throw ConfigError(key, std::string("config key '") + key + "' must be an integer");
    if constexpr (std::is_unsigned_v<T>) {
        if (!it->is_number_unsigned())
            throw ConfigError(key, std::string("config key '") + key + "' must be nonnegative");
    }
    out = it->get<T>();
}

std::vector<std::string> read_names(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(key, std::string("missing required config key '") + key + "'");
    if (!it->is_array()) throw ConfigError(key, std::string("config key '") + key + "' must be a list of names");
    std::vector<std::string> names;
    for (const auto& v : *it) {
        if (!v.is_string() || v.get<std::string>().empty())
            throw ConfigError(key, std::string("config key '") + key + "' must contain nonempty strings");
        names.push_back(v.get<std::string>());
    }
    return names;
}

void require(bool ok, const char* key, const std::string& what) {
    if (!ok) throw ConfigError(key, std::string("config key '") + key + "' " + what);
}

}  // namespace

std::string_view to_string(Direction direction) {
    return direction == Direction::increase ? "increase" : "decrease";
}

void check_config(const DiagnosisConfig& c) {
    require(!c.target_column.empty(), "target_column", "must be a nonempty name");
    require(!c.invariant_columns.empty(), "invariant_columns", "must name at least one column");

    auto open01 = [](double p) { return p > 0.0 && p < 1.0; };
    require(open01(c.metric_p_threshold), "metric_p_threshold", "must lie in (0, 1)");
    require(open01(c.bias_p_threshold), "bias_p_threshold", "must lie in (0, 1)");
    require(open01(c.ranking_p_threshold), "ranking_p_threshold", "must lie in (0, 1)");
    require(c.prune_p_threshold >= 0.0 && c.prune_p_threshold <= 1.0, "prune_p_threshold", "must lie in [0, 1]");
    require(c.bias_deviation_threshold_pct >= 0.0 && c.bias_deviation_threshold_pct <= 100.0,
            "bias_deviation_threshold_pct", "must lie in [0, 100]");
    require(c.max_bins >= 2 && c.max_bins <= 32767, "max_bins", "must lie in [2, 32767]");
    require(c.numeric_hypothesis_bins >= 2 && c.numeric_hypothesis_bins <= 32767, "numeric_hypothesis_bins",
            "must lie in [2, 32767]");
    require(c.caliper_coefficient > 0.0, "caliper_coefficient", "must be positive");
    require(c.min_rows >= 1, "min_rows", "must be positive");
    require(c.min_matched_fraction > 0.0 && c.min_matched_fraction <= 1.0, "min_matched_fraction",
            "must lie in (0, 1]");
    require(c.forest.n_trees >= 1, "forest", "n_trees must be positive");
    require(c.forest.max_depth >= 1, "forest", "max_depth must be positive");
    require(c.forest.min_leaf >= 1, "forest", "min_leaf must be positive");

    std::unordered_set<std::string> seen{c.target_column};
    for (const auto* list : {&c.invariant_columns, &c.hypothesis_columns}) {
        const char* key = list == &c.invariant_columns ? "invariant_columns" : "hypothesis_columns";
        for (const auto& name : *list) {
            if (!seen.insert(name).second)
                throw ConfigError(key, "column '" + name + "' appears in more than one role or twice");
        }
    }
}

DiagnosisConfig parse_config(std::string_view json_text, std::vector<Issue>* warnings) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("", "config must be a JSON object");

    DiagnosisConfig c;
    auto target = root.find("target_column");
    if (target == root.end()) throw ConfigError("target_column", "missing required config key 'target_column'");
    require(target->is_string(), "target_column", "must be a string");
    c.target_column = target->get<std::string>();
    c.invariant_columns = read_names(root, "invariant_columns");
    c.hypothesis_columns = read_names(root, "hypothesis_columns");

    read(root, "metric_p_threshold", c.metric_p_threshold);
    read(root, "bias_p_threshold", c.bias_p_threshold);
    read(root, "bias_deviation_threshold_pct", c.bias_deviation_threshold_pct);
    read(root, "ranking_p_threshold", c.ranking_p_threshold);
    read_integer(root, "max_bins", c.max_bins);
    read_integer(root, "numeric_hypothesis_bins", c.numeric_hypothesis_bins);
    read(root, "prune_p_threshold", c.prune_p_threshold);
    read(root, "add_is_null", c.add_is_null);
    read(root, "caliper_coefficient", c.caliper_coefficient);
    read_integer(root, "min_rows", c.min_rows);
    read(root, "min_matched_fraction", c.min_matched_fraction);
    read_integer(root, "seed", c.seed);

    if (auto it = root.find("direction"); it != root.end()) {
        require(it->is_string(), "direction", "must be \"increase\" or \"decrease\"");
        const auto d = it->get<std::string>();
        if (d == "increase")
            c.direction = Direction::increase;
        else if (d == "decrease")
            c.direction = Direction::decrease;
        else
            throw ConfigError("direction", "config key 'direction' must be \"increase\" or \"decrease\"");
    }

    if (auto it = root.find("forest"); it != root.end()) {
        require(it->is_object(), "forest", "must be an object");
        read_integer(*it, "n_trees", c.forest.n_trees);
        read_integer(*it, "max_depth", c.forest.max_depth);
        read_integer(*it, "min_leaf", c.forest.min_leaf);
        for (const auto& [key, value] : it->items()) {
            if (!kForestKeys.contains(key) && warnings)
                warnings->push_back({"unknown_key", "unknown config key 'forest." + key + "' ignored"});
        }
    }

    for (const auto& [key, value] : root.items()) {
        if (!kKnownKeys.contains(key) && warnings)
            warnings->push_back({"unknown_key", "unknown config key '" + key + "' ignored"});
    }

    check_config(c);
    return c;
}

DiagnosisConfig parse_config(std::istream& source, std::vector<Issue>* warnings) {
    std::string text{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
    return parse_config(std::string_view(text), warnings);
}

std::string config_to_json(const DiagnosisConfig& config) {
    return detail::config_json(config).dump(2);
}

}  // namespace regdiag
