#include "regdiag/synth.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "regdiag/errors.hpp"
#include "regdiag/random.hpp"
#include "regdiag/stats.hpp"

namespace regdiag {

namespace {

using ojson = nlohmann::ordered_json;

constexpr double kWeightTolerance = 1e-9;
constexpr int kNoiseLabels = 5;

constexpr TruthKind kTruthKinds[] = {TruthKind::Null, TruthKind::BiasOnly, TruthKind::Systemic, TruthKind::Mixed};
constexpr std::string_view kOutcomes[] = {"NoChange", "TypeB", "TypeS", "InsufficientData", kErrorOutcome};

constexpr const char* kFeatureNames[] = {"screen_share", "video",          "bluetooth_headset", "wifi",
                                         "vpn",          "cellular",       "external_camera",   "noise_suppression",
                                         "background_blur", "recording"};

double occurrence_at(const HypothesisSpec& h, std::size_t segment) {
    return h.occurrence.size() == 1 ? h.occurrence[0] : h.occurrence[segment];
}

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

std::vector<double> cumulative(const std::vector<Segment>& segments, bool treatment) {
    std::vector<double> cum;
    double total = 0.0;
    for (const auto& s : segments) {
        total += treatment ? s.weight_t : s.weight_c;
        cum.push_back(total);
    }
    return cum;
}

std::size_t pick(const std::vector<double>& cum, const std::vector<Segment>& segments, bool treatment, Rng& rng) {
    const double u = rng.uniform() * cum.back();
    auto i = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
    if (i >= cum.size()) i = cum.size() - 1;
    // Never land on a zero-weight segment through rounding at the boundary.
    while ((treatment ? segments[i].weight_t : segments[i].weight_c) <= 0.0 && i > 0) --i;
    return i;
}

double standard_normal(Rng& rng) {
    const double u1 = 1.0 - rng.uniform();
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Dataset generate_side(const ScenarioSpec& spec, bool treatment, const std::vector<std::vector<std::string>>& dicts,
                      const std::vector<std::vector<std::int32_t>>& segment_codes) {
    const auto n = static_cast<std::size_t>(treatment ? spec.n_rows_t : spec.n_rows_c);
    Rng rng(derive_seed(spec.seed, treatment ? 1 : 0));
    const auto cum = cumulative(spec.segments, treatment);

    const std::size_t n_inv = spec.invariant_names.size();
    const std::size_t n_hyp = spec.hypotheses.size();
    std::vector<std::vector<std::int32_t>> inv(n_inv, std::vector<std::int32_t>(n));
    std::vector<std::vector<std::int8_t>> hyp(n_hyp, std::vector<std::int8_t>(n));
    std::vector<std::vector<std::int32_t>> noise_cat(static_cast<std::size_t>(spec.noise_categorical),
                                                     std::vector<std::int32_t>(n));
    std::vector<std::vector<double>> noise_num(static_cast<std::size_t>(spec.noise_numeric), std::vector<double>(n));
    std::vector<std::int8_t> target(n);

    for (std::size_t row = 0; row < n; ++row) {
        const std::size_t seg = pick(cum, spec.segments, treatment, rng);
        for (std::size_t c = 0; c < n_inv; ++c) inv[c][row] = segment_codes[seg][c];
        double p = spec.segments[seg].base_fail_rate;
        for (std::size_t h = 0; h < n_hyp; ++h) {
            const bool fires = rng.bernoulli(occurrence_at(spec.hypotheses[h], seg));
            hyp[h][row] = fires ? 1 : 0;
            if (fires && treatment) p *= spec.hypotheses[h].multiplier_t;
        }
        target[row] = rng.bernoulli(p) ? 1 : 0;
        for (auto& col : noise_cat) {
            const bool null = rng.bernoulli(spec.null_rate);
            const auto label = static_cast<std::int32_t>(rng.below(kNoiseLabels));
            col[row] = null ? -1 : label;
        }
        for (auto& col : noise_num) {
            const bool null = rng.bernoulli(spec.null_rate);
            const double z = standard_normal(rng);
            col[row] = null ? std::numeric_limits<double>::quiet_NaN() : z;
        }
    }

    std::vector<Column> columns;
    for (std::size_t c = 0; c < n_inv; ++c)
        columns.push_back(Column::categorical(spec.invariant_names[c], dicts[c], std::move(inv[c])));
    for (std::size_t h = 0; h < n_hyp; ++h) columns.push_back(Column::binary(spec.hypotheses[h].name, std::move(hyp[h])));
    std::vector<std::string> noise_dict;
    for (int i = 0; i < kNoiseLabels; ++i) noise_dict.push_back(fmt::format("v{}", i));
    for (std::size_t i = 0; i < noise_cat.size(); ++i)
        columns.push_back(Column::categorical(fmt::format("noise_cat_{}", i), noise_dict, std::move(noise_cat[i])));
    for (std::size_t i = 0; i < noise_num.size(); ++i)
        columns.push_back(Column::numeric(fmt::format("noise_num_{}", i), std::move(noise_num[i])));
    columns.push_back(Column::binary(spec.target_column, std::move(target)));
    return Dataset(treatment ? "treatment" : "control", std::move(columns));
}

// Random positive weights summing to 1.
std::vector<double> random_simplex(std::size_t k, Rng& rng) {
    std::vector<double> w(k);
    double total = 0.0;
    for (auto& x : w) total += (x = 0.5 + rng.uniform());
    for (auto& x : w) x /= total;
    return w;
}

double uniform_in(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

// Two invariant columns ("region" with 4 values, "device" with 3) whose
// segment weights are products of per-column marginals.
struct Grid {
    std::vector<double> region_c, region_t, device;
};

ScenarioSpec grid_spec(const Grid& g, std::uint64_t seed, std::int64_t n_rows,
                       const std::vector<std::vector<double>>& base_rates) {
    ScenarioSpec spec;
    spec.invariant_names = {"region", "device"};
    for (std::size_t r = 0; r < g.region_c.size(); ++r) {
        for (std::size_t d = 0; d < g.device.size(); ++d) {
            spec.segments.push_back({{fmt::format("r{}", r), fmt::format("d{}", d)},
                                     base_rates[r][d],
                                     g.region_c[r] * g.device[d],
                                     g.region_t[r] * g.device[d]});
        }
    }
    spec.n_rows_c = n_rows;
    spec.n_rows_t = n_rows;
    spec.seed = derive_seed(seed, 101);
    spec.noise_categorical = 2;
    spec.noise_numeric = 2;
    spec.null_rate = 0.02;
    return spec;
}

void add_null_hypotheses(ScenarioSpec& spec, Rng& rng, std::size_t count, std::size_t skip = SIZE_MAX) {
    for (std::size_t h = 0; h < count; ++h) {
        if (h == skip) continue;
        HypothesisSpec hs{kFeatureNames[h], {}, 1.0};
        for (std::size_t s = 0; s < spec.segments.size(); ++s) hs.occurrence.push_back(uniform_in(rng, 0.1, 0.5));
        spec.hypotheses.push_back(std::move(hs));
    }
}

std::optional<std::chrono::sys_days> parse_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    auto num = [&](std::size_t pos, std::size_t len, auto& out) {
        const auto* first = s.data() + pos;
        auto [ptr, ec] = std::from_chars(first, first + len, out);
        return ec == std::errc() && ptr == first + len;
    };
    if (!num(0, 4, y) || !num(5, 2, m) || !num(8, 2, d)) return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) return std::nullopt;
    return std::chrono::sys_days{ymd};
}

ojson outcome_json(const ScenarioOutcome& o) {
    ojson j;
    j["truth"] = std::string(to_string(o.truth));
    j["outcome"] = o.outcome;
    if (!o.error.empty()) j["error"] = o.error;
    j["normalized_significant"] = o.normalized_significant ? ojson(*o.normalized_significant) : ojson(nullptr);
    j["injected_rank"] = o.injected_rank ? ojson(*o.injected_rank) : ojson(nullptr);
    return j;
}

std::string rate_text(const std::optional<double>& r) { return r ? fmt::format("{:.3f}", *r) : "n/a"; }

}  // namespace

std::vector<std::string> ScenarioSpec::hypothesis_columns() const {
    std::vector<std::string> names;
    for (const auto& h : hypotheses) names.push_back(h.name);
    for (int i = 0; i < noise_categorical; ++i) names.push_back(fmt::format("noise_cat_{}", i));
    for (int i = 0; i < noise_numeric; ++i) names.push_back(fmt::format("noise_num_{}", i));
    return names;
}

std::string_view to_string(TruthKind kind) {
    switch (kind) {
        case TruthKind::Null: return "Null";
        case TruthKind::BiasOnly: return "BiasOnly";
        case TruthKind::Systemic: return "Systemic";
        case TruthKind::Mixed: return "Mixed";
    }
    return "unknown";
}

TruthKind truth_kind_from_string(std::string_view s) {
    for (auto k : kTruthKinds) {
        if (to_string(k) == s) return k;
    }
    throw std::invalid_argument("unknown ground truth kind " + std::string(s));
}

GroundTruth ground_truth(const ScenarioSpec& spec) {
    GroundTruth truth;
    for (const auto& h : spec.hypotheses) {
        if (h.multiplier_t != 1.0) truth.injected_features.push_back(h.name);
    }
    const bool shifted = std::any_of(spec.segments.begin(), spec.segments.end(),
                                     [](const Segment& s) { return std::fabs(s.weight_c - s.weight_t) > 1e-12; });
    const bool systemic = !truth.injected_features.empty();
    truth.kind = shifted ? (systemic ? TruthKind::Mixed : TruthKind::BiasOnly)
                         : (systemic ? TruthKind::Systemic : TruthKind::Null);
    return truth;
}

void check_spec(const ScenarioSpec& spec) {
    auto fail = [](const std::string& what) { throw SpecError(what); };
    if (spec.invariant_names.empty()) fail("at least one invariant column is required");
    if (spec.segments.empty()) fail("at least one segment is required");
    if (spec.n_rows_c < 1 || spec.n_rows_t < 1) fail("n_rows_c and n_rows_t must be positive");
    if (spec.noise_categorical < 0 || spec.noise_numeric < 0) fail("noise column counts must be nonnegative");
    if (!(spec.null_rate >= 0.0 && spec.null_rate < 1.0)) fail("null_rate must lie in [0, 1)");

    std::set<std::string> names;
    auto add_name = [&](const std::string& name) {
        if (name.empty()) fail("column names must be nonempty");
        if (!names.insert(name).second) fail("column '" + name + "' is defined twice");
    };
    for (const auto& n : spec.invariant_names) add_name(n);
    for (const auto& n : spec.hypothesis_columns()) add_name(n);
    add_name(spec.target_column);

    double sum_c = 0.0;
    double sum_t = 0.0;
    for (std::size_t s = 0; s < spec.segments.size(); ++s) {
        const auto& seg = spec.segments[s];
        if (seg.values.size() != spec.invariant_names.size())
            fail(fmt::format("segment {} has {} values for {} invariant columns", s, seg.values.size(),
                             spec.invariant_names.size()));
        for (const auto& v : seg.values) {
            if (v.empty()) fail(fmt::format("segment {} has an empty invariant value", s));
        }
        if (!in_unit(seg.base_fail_rate)) fail(fmt::format("segment {} base_fail_rate must lie in [0, 1]", s));
        if (!in_unit(seg.weight_c) || !in_unit(seg.weight_t))
            fail(fmt::format("segment {} weights must lie in [0, 1]", s));
        sum_c += seg.weight_c;
        sum_t += seg.weight_t;
    }
    if (std::fabs(sum_c - 1.0) > kWeightTolerance) fail(fmt::format("weight_c sums to {}, not 1", sum_c));
    if (std::fabs(sum_t - 1.0) > kWeightTolerance) fail(fmt::format("weight_t sums to {}, not 1", sum_t));

    for (const auto& h : spec.hypotheses) {
        if (h.occurrence.size() != 1 && h.occurrence.size() != spec.segments.size())
            fail("hypothesis '" + h.name + "' needs one occurrence rate or one per segment");
        for (double o : h.occurrence) {
            if (!in_unit(o)) fail("hypothesis '" + h.name + "' occurrence rates must lie in [0, 1]");
        }
        if (!(h.multiplier_t > 0.0) || !std::isfinite(h.multiplier_t))
            fail("hypothesis '" + h.name + "' fail_rate_multiplier_t must be positive");
    }

    // Worst case: every hypothesis that can fire with a raising multiplier fires.
    for (std::size_t s = 0; s < spec.segments.size(); ++s) {
        double p = spec.segments[s].base_fail_rate;
        for (const auto& h : spec.hypotheses) {
            if (occurrence_at(h, s) > 0.0 && h.multiplier_t > 1.0) p *= h.multiplier_t;
        }
        if (p > 1.0 + 1e-12)
            fail(fmt::format("effective failure probability {} in segment {} exceeds 1", p, s));
    }
}

ScenarioSpec spec_from_json(std::string_view text) {
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SpecError(std::string("scenario spec is not valid JSON: ") + e.what());
    }
    ScenarioSpec spec;
    try {
        if (!j.is_object()) throw SpecError("scenario spec must be a JSON object");
        spec.invariant_names = j.at("invariant_names").get<std::vector<std::string>>();
        for (const auto& s : j.at("segments")) {
            spec.segments.push_back({s.at("values").get<std::vector<std::string>>(), s.at("base_fail_rate").get<double>(),
                                     s.at("weight_c").get<double>(), s.at("weight_t").get<double>()});
        }
        if (auto it = j.find("hypothesis_specs"); it != j.end()) {
            for (const auto& h : *it) {
                HypothesisSpec hs;
                hs.name = h.at("name").get<std::string>();
                const auto& occ = h.at("occurrence");
                hs.occurrence = occ.is_array() ? occ.get<std::vector<double>>() : std::vector<double>{occ.get<double>()};
                hs.multiplier_t = h.value("fail_rate_multiplier_t", 1.0);
                spec.hypotheses.push_back(std::move(hs));
            }
        }
        spec.n_rows_c = j.at("n_rows_c").get<std::int64_t>();
        spec.n_rows_t = j.at("n_rows_t").get<std::int64_t>();
        spec.seed = j.value("seed", std::uint64_t{0});
        spec.target_column = j.value("target_column", std::string("fail"));
        spec.noise_categorical = j.value("noise_categorical", 0);
        spec.noise_numeric = j.value("noise_numeric", 0);
        spec.null_rate = j.value("null_rate", 0.0);
    } catch (const nlohmann::json::exception& e) {
        throw SpecError(std::string("invalid scenario spec: ") + e.what());
    }
    check_spec(spec);
    return spec;
}

std::string spec_to_json(const ScenarioSpec& spec) {
    ojson j;
    j["invariant_names"] = spec.invariant_names;
    ojson segments = ojson::array();
    for (const auto& s : spec.segments) {
        segments.push_back(
            {{"values", s.values}, {"base_fail_rate", s.base_fail_rate}, {"weight_c", s.weight_c}, {"weight_t", s.weight_t}});
    }
    j["segments"] = std::move(segments);
    ojson hyps = ojson::array();
    for (const auto& h : spec.hypotheses)
        hyps.push_back({{"name", h.name}, {"occurrence", h.occurrence}, {"fail_rate_multiplier_t", h.multiplier_t}});
    j["hypothesis_specs"] = std::move(hyps);
    j["n_rows_c"] = spec.n_rows_c;
    j["n_rows_t"] = spec.n_rows_t;
    j["seed"] = spec.seed;
    j["target_column"] = spec.target_column;
    j["noise_categorical"] = spec.noise_categorical;
    j["noise_numeric"] = spec.noise_numeric;
    j["null_rate"] = spec.null_rate;
    return j.dump(2) + "\n";
}

std::string truth_to_json(const GroundTruth& truth) {
    ojson j;
    j["kind"] = std::string(to_string(truth.kind));
    j["injected_features"] = truth.injected_features;
    return j.dump(2) + "\n";
}

Scenario generate_scenario(const ScenarioSpec& spec) {
    check_spec(spec);
    const std::size_t n_inv = spec.invariant_names.size();
    std::vector<std::vector<std::string>> dicts(n_inv);
    for (std::size_t c = 0; c < n_inv; ++c) {
        for (const auto& seg : spec.segments) dicts[c].push_back(seg.values[c]);
        std::sort(dicts[c].begin(), dicts[c].end());
        dicts[c].erase(std::unique(dicts[c].begin(), dicts[c].end()), dicts[c].end());
    }
    std::vector<std::vector<std::int32_t>> segment_codes;
    for (const auto& seg : spec.segments) {
        std::vector<std::int32_t> codes;
        for (std::size_t c = 0; c < n_inv; ++c) {
            const auto it = std::lower_bound(dicts[c].begin(), dicts[c].end(), seg.values[c]);
            codes.push_back(static_cast<std::int32_t>(it - dicts[c].begin()));
        }
        segment_codes.push_back(std::move(codes));
    }
    return {generate_side(spec, false, dicts, segment_codes), generate_side(spec, true, dicts, segment_codes),
            ground_truth(spec)};
}

DiagnosisConfig config_for(const ScenarioSpec& spec, DiagnosisConfig base) {
    base.target_column = spec.target_column;
    base.invariant_columns = spec.invariant_names;
    base.hypothesis_columns = spec.hypothesis_columns();
    return base;
}

std::pair<Dataset, Dataset> select_windows(const Dataset& timeseries, std::string_view date_column,
                                           std::string_view anomaly_date, int lookback_weeks) {
    if (lookback_weeks < 1) throw WindowError("lookback_weeks must be positive");
    const auto anomaly = parse_date(anomaly_date);
    if (!anomaly) throw WindowError("anomaly date '" + std::string(anomaly_date) + "' is not a YYYY-MM-DD date");

    const Column& dates = timeseries.column(date_column);
    if (dates.kind() != ColumnKind::categorical)
        throw WindowError("date column '" + std::string(date_column) + "' does not hold YYYY-MM-DD text");
    // Per dictionary entry: 0 = outside, 1 = control, 2 = treatment.
    std::vector<int> role;
    for (const auto& label : dates.dictionary()) {
        const auto day = parse_date(label);
        if (!day) throw WindowError("unparseable date '" + label + "' in column '" + std::string(date_column) + "'");
        const auto offset = (*anomaly - *day).count();
        if (offset == 0)
            role.push_back(2);
        else if (offset > 0 && offset % 7 == 0 && offset / 7 <= lookback_weeks)
            role.push_back(1);
        else
            role.push_back(0);
    }
    std::vector<std::size_t> control_rows;
    std::vector<std::size_t> treatment_rows;
    const auto codes = dates.codes();
    for (std::size_t i = 0; i < codes.size(); ++i) {
        if (codes[i] < 0) continue;
        const int r = role[static_cast<std::size_t>(codes[i])];
        if (r == 1) control_rows.push_back(i);
        if (r == 2) treatment_rows.push_back(i);
    }
    if (treatment_rows.empty()) throw WindowError("no rows on the anomaly date " + std::string(anomaly_date));
    if (control_rows.empty()) throw WindowError("no rows on any prior same-weekday date");
    return {timeseries.take(control_rows).renamed("control"), timeseries.take(treatment_rows).renamed("treatment")};
}

ScenarioOutcome evaluate_scenario(const ScenarioSpec& spec, const DiagnosisConfig& base) {
    ScenarioOutcome out;
    const Scenario sc = generate_scenario(spec);
    out.truth = sc.truth.kind;
    try {
        const DiagnosisReport report = diagnose(sc.control, sc.treatment, config_for(spec, base));
        out.outcome = std::string(to_string(report.classification));
        if (report.comparison_normalized) out.normalized_significant = report.comparison_normalized->test.significant;
        if (report.ranking) {
            const auto& rows = report.ranking->rows;
            for (std::size_t i = 0; i < rows.size() && !out.injected_rank; ++i) {
                for (const auto& name : sc.truth.injected_features) {
                    if (rows[i].feature.starts_with(name + "=") || rows[i].feature == name + ".is_null") {
                        out.injected_rank = i + 1;
                        break;
                    }
                }
            }
        }
    } catch (const DiagnosisError& e) {
        out.outcome = std::string(kErrorOutcome);
        out.error = e.code();
    } catch (const std::exception& e) {
        out.outcome = std::string(kErrorOutcome);
        out.error = e.what();
    }
    return out;
}

EvalSummary evaluate_pipeline(std::span<const ScenarioSpec> specs, const DiagnosisConfig& base, int k) {
    if (specs.empty()) throw std::invalid_argument("evaluate_pipeline needs at least one scenario");
    if (k < 1) throw std::invalid_argument("k must be positive");
    EvalSummary summary;
    summary.n_scenarios = specs.size();
    summary.k = k;
    for (auto kind : kTruthKinds) {
        for (auto outcome : kOutcomes) summary.confusion[std::string(to_string(kind))][std::string(outcome)] = 0;
    }
    std::size_t filterable = 0;
    std::size_t filtered = 0;
    std::size_t systemic = 0;
    std::size_t hits_k = 0;
    std::size_t hits_1 = 0;
    for (const auto& spec : specs) {
        ScenarioOutcome o = evaluate_scenario(spec, base);
        ++summary.confusion[std::string(to_string(o.truth))][o.outcome];
        if (o.truth == TruthKind::Null || o.truth == TruthKind::BiasOnly) {
            ++filterable;
            if (o.outcome != "TypeS" && o.outcome != kErrorOutcome) ++filtered;
        } else if (o.truth == TruthKind::Systemic) {
            ++systemic;
            if (o.injected_rank && *o.injected_rank <= static_cast<std::size_t>(k)) ++hits_k;
            if (o.injected_rank && *o.injected_rank == 1) ++hits_1;
        }
        summary.outcomes.push_back(std::move(o));
    }
    if (filterable > 0) summary.filter_rate = static_cast<double>(filtered) / static_cast<double>(filterable);
    if (systemic > 0) {
        summary.top_k_hit_rate = static_cast<double>(hits_k) / static_cast<double>(systemic);
        summary.top_1_hit_rate = static_cast<double>(hits_1) / static_cast<double>(systemic);
    }
    return summary;
}

std::string render_eval(const EvalSummary& s, bool markdown) {
    if (!markdown) {
        ojson j;
        j["n_scenarios"] = s.n_scenarios;
        j["k"] = s.k;
        j["filter_rate"] = s.filter_rate ? ojson(*s.filter_rate) : ojson(nullptr);
        j["top_k_hit_rate"] = s.top_k_hit_rate ? ojson(*s.top_k_hit_rate) : ojson(nullptr);
        j["top_1_hit_rate"] = s.top_1_hit_rate ? ojson(*s.top_1_hit_rate) : ojson(nullptr);
        ojson confusion;
        for (auto kind : kTruthKinds) {
            const auto& row = s.confusion.at(std::string(to_string(kind)));
            ojson r;
            for (auto outcome : kOutcomes) r[std::string(outcome)] = row.at(std::string(outcome));
            confusion[std::string(to_string(kind))] = std::move(r);
        }
        j["confusion"] = std::move(confusion);
        ojson scenarios = ojson::array();
        for (const auto& o : s.outcomes) scenarios.push_back(outcome_json(o));
        j["scenarios"] = std::move(scenarios);
        return j.dump(2) + "\n";
    }
    std::string out = fmt::format("# Evaluation over {} scenarios\n\n", s.n_scenarios);
    out += fmt::format("- filter rate (Null and BiasOnly not classified TypeS): {}\n", rate_text(s.filter_rate));
    out += fmt::format("- Systemic scenarios with an injected feature in the top {}: {}\n", s.k,
                       rate_text(s.top_k_hit_rate));
    out += fmt::format("- Systemic scenarios with an injected feature ranked first: {}\n\n",
                       rate_text(s.top_1_hit_rate));
    out += "| Ground truth |";
    for (auto outcome : kOutcomes) out += fmt::format(" {} |", outcome);
    out += "\n|---|";
    for (std::size_t i = 0; i < std::size(kOutcomes); ++i) out += "---|";
    out += "\n";
    for (auto kind : kTruthKinds) {
        const auto& row = s.confusion.at(std::string(to_string(kind)));
        out += fmt::format("| {} |", to_string(kind));
        for (auto outcome : kOutcomes) out += fmt::format(" {} |", row.at(std::string(outcome)));
        out += "\n";
    }
    return out;
}

ScenarioSpec null_scenario(std::uint64_t seed, std::int64_t n_rows) {
    Rng rng(derive_seed(seed, 100));
    Grid g;
    g.region_c = random_simplex(4, rng);
    g.region_t = g.region_c;
    g.device = random_simplex(3, rng);
    std::vector<std::vector<double>> rates(4, std::vector<double>(3));
    for (auto& row : rates) {
        for (auto& r : row) r = uniform_in(rng, 0.05, 0.15);
    }
    ScenarioSpec spec = grid_spec(g, seed, n_rows, rates);
    add_null_hypotheses(spec, rng, 5);
    return spec;
}

ScenarioSpec bias_only_scenario(std::uint64_t seed, std::int64_t n_rows) {
    Rng rng(derive_seed(seed, 100));
    Grid g;
    g.region_c = random_simplex(4, rng);
    g.device = random_simplex(3, rng);
    // Region drives the failure rate; treatment moves mass toward the riskiest region.
    const double region_factor[] = {0.5, 0.8, 1.2, 2.5};
    std::vector<std::vector<double>> rates(4, std::vector<double>(3));
    for (std::size_t r = 0; r < 4; ++r) {
        for (auto& x : rates[r]) x = 0.06 * region_factor[r] * uniform_in(rng, 0.8, 1.2);
    }
    const double shift = uniform_in(rng, 0.2, 0.35);
    g.region_t = g.region_c;
    for (std::size_t r = 0; r < 4; ++r) g.region_t[r] = (1.0 - shift) * g.region_c[r] + (r == 3 ? shift : 0.0);
    ScenarioSpec spec = grid_spec(g, seed, n_rows, rates);
    add_null_hypotheses(spec, rng, 5);
    return spec;
}

ScenarioSpec systemic_scenario(std::uint64_t seed, std::int64_t n_rows) {
    Rng rng(derive_seed(seed, 100));
    Grid g;
    g.region_c = random_simplex(4, rng);
    g.region_t = g.region_c;
    g.device = random_simplex(3, rng);
    std::vector<std::vector<double>> rates(4, std::vector<double>(3));
    for (auto& row : rates) {
        for (auto& r : row) r = uniform_in(rng, 0.05, 0.15);
    }
    ScenarioSpec spec = grid_spec(g, seed, n_rows, rates);
    const std::size_t n_hyp = std::size(kFeatureNames);
    const auto injected = static_cast<std::size_t>(rng.below(n_hyp));
    add_null_hypotheses(spec, rng, n_hyp, injected);
    spec.hypotheses.insert(spec.hypotheses.begin() + static_cast<std::ptrdiff_t>(injected),
                           HypothesisSpec{kFeatureNames[injected], {uniform_in(rng, 0.2, 0.4)}, uniform_in(rng, 2.0, 3.0)});
    return spec;
}

std::vector<ScenarioSpec> paperlike_profile(std::size_t n_scenarios, std::uint64_t seed, std::int64_t n_rows) {
    std::vector<ScenarioSpec> specs;
    for (std::size_t i = 0; i < n_scenarios; ++i) {
        const auto s = derive_seed(seed, i);
        if (i % 10 == 9)
            specs.push_back(systemic_scenario(s, n_rows));
        else if (i % 3 == 0)
            specs.push_back(null_scenario(s, n_rows));
        else
            specs.push_back(bias_only_scenario(s, n_rows));
    }
    return specs;
}

ScenarioSpec wide_scenario(std::uint64_t seed, std::int64_t n_rows, int n_invariants, int n_hypotheses) {
    if (n_invariants < 1 || n_hypotheses < 1) throw SpecError("wide_scenario needs columns of both roles");
    Rng rng(derive_seed(seed, 100));
    ScenarioSpec spec;
    for (int c = 0; c < n_invariants; ++c) spec.invariant_names.push_back(fmt::format("inv_{}", c));
    constexpr int kSegments = 50;
    double sum_c = 0.0;
    double sum_t = 0.0;
    for (int s = 0; s < kSegments; ++s) {
        Segment seg;
        for (int c = 0; c < n_invariants; ++c) seg.values.push_back(fmt::format("v{}", rng.below(3 + c % 3)));
        seg.base_fail_rate = uniform_in(rng, 0.05, 0.15);
        seg.weight_c = 0.5 + rng.uniform();
        seg.weight_t = seg.weight_c * (seg.values[0] == "v0" ? 1.5 : 1.0);
        sum_c += seg.weight_c;
        sum_t += seg.weight_t;
        spec.segments.push_back(std::move(seg));
    }
    for (auto& seg : spec.segments) {
        seg.weight_c /= sum_c;
        seg.weight_t /= sum_t;
    }
    const auto injected = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_hypotheses)));
    for (int h = 0; h < n_hypotheses; ++h) {
        spec.hypotheses.push_back(
            {fmt::format("hyp_{:03}", h), {uniform_in(rng, 0.05, 0.5)}, h == injected ? 2.0 : 1.0});
    }
    spec.n_rows_c = n_rows;
    spec.n_rows_t = n_rows;
    spec.seed = derive_seed(seed, 101);
    return spec;
}

double analytic_power(double rate_c, double rate_t, std::int64_t n_rows, double alpha) {
    const double n = static_cast<double>(n_rows);
    const double pooled = 0.5 * (rate_c + rate_t);
    const double se0 = std::sqrt(2.0 * pooled * (1.0 - pooled) / n);
    const double se1 = std::sqrt((rate_c * (1.0 - rate_c) + rate_t * (1.0 - rate_t)) / n);
    const double z = normal_quantile(1.0 - alpha / 2.0);
    const double gap = std::fabs(rate_t - rate_c);
    return normal_sf((z * se0 - gap) / se1) + normal_sf((z * se0 + gap) / se1);
}

PowerReport measure_power(std::int64_t n_rows, double rate_c, double rate_t, int n_seeds, double alpha,
                          std::uint64_t seed) {
    if (!(rate_c > 0.0 && rate_c < 1.0 && rate_t > 0.0 && rate_t < 1.0))
        throw std::invalid_argument("failure rates must lie in (0, 1)");
    if (n_seeds < 1) throw std::invalid_argument("n_seeds must be positive");
    PowerReport report{n_rows, rate_c, rate_t, alpha, n_seeds, 0, 0.0, analytic_power(rate_c, rate_t, n_rows, alpha)};
    ScenarioSpec spec;
    spec.invariant_names = {"segment"};
    spec.segments = {{{"all"}, rate_c, 1.0, 1.0}};
    spec.hypotheses = {{"shift", {1.0}, rate_t / rate_c}};
    spec.n_rows_c = n_rows;
    spec.n_rows_t = n_rows;
    for (int i = 0; i < n_seeds; ++i) {
        spec.seed = derive_seed(seed, static_cast<std::uint64_t>(i));
        const Scenario sc = generate_scenario(spec);
        if (compare_metric(sc.control, sc.treatment, spec.target_column, alpha).test.significant) ++report.detections;
    }
    report.empirical = static_cast<double>(report.detections) / static_cast<double>(n_seeds);
    return report;
}

}  // namespace regdiag
