#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "regdiag/csv.hpp"
#include "regdiag/errors.hpp"
#include "regdiag/preprocess.hpp"
#include "regdiag/random.hpp"
#include "regdiag/rank.hpp"
#include "regdiag/report.hpp"
#include "regdiag/synth.hpp"
#include "regdiag/validate.hpp"
#include "regdiag/workflow.hpp"

namespace regdiag::cli {

namespace {

namespace fs = std::filesystem;

// Reported with exit status 1.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw InputError("cannot write " + path.string());
    file << text;
    if (!file.flush()) throw InputError("failed writing " + path.string());
}

void emit(const std::string& out_path, const std::string& text, std::ostream& out) {
    if (out_path.empty())
        out << text;
    else
        write_file(out_path, text);
}

void print_warnings(const std::vector<Issue>& warnings, std::ostream& err) {
    for (const auto& w : warnings) err << "warning: " << w.code << ": " << w.message << "\n";
}

struct Inputs {
    std::string control;
    std::string treatment;
    std::string config;
    std::string out;
    std::string format = "json";
};

void add_input_flags(CLI::App& cmd, Inputs& in) {
    cmd.add_option("--control", in.control, "control dataset (CSV)")->required();
    cmd.add_option("--treatment", in.treatment, "treatment dataset (CSV)")->required();
    cmd.add_option("--config", in.config, "diagnosis config (JSON)")->required();
    cmd.add_option("--out", in.out, "output file (default: standard output)");
    cmd.add_option("--format", in.format, "json or markdown")->check(CLI::IsMember({"json", "markdown"}));
}

struct Loaded {
    DiagnosisConfig config;
    Dataset control;
    Dataset treatment;
};

Loaded load(const Inputs& in, std::ostream& err) {
    std::vector<Issue> config_warnings;
    DiagnosisConfig config = parse_config(read_file(in.config), &config_warnings);
    print_warnings(config_warnings, err);
    Dataset control = load_dataset_file(in.control);
    Dataset treatment = load_dataset_file(in.treatment);
    const ValidationReport v = validate(config, control, treatment);
    print_warnings(v.warnings, err);
    if (!v.ok()) {
        std::string msg = "invalid input:";
        for (const auto& e : v.errors) msg += "\n  " + e.code + ": " + e.message;
        throw InputError(msg);
    }
    return {std::move(config), std::move(control), std::move(treatment)};
}

std::string summary_line(const DiagnosisReport& r) {
    const auto& m = r.comparison_raw;
    std::string line = fmt::format("{}: {} {:.4f} -> {:.4f} (p = {:.3g})", to_string(r.classification),
                                   r.config_echo.target_column, m.mean_c, m.mean_t, m.test.p_value);
    if (r.comparison_normalized) line += fmt::format(", normalized p = {:.3g}", r.comparison_normalized->test.p_value);
    if (r.ranking && !r.ranking->rows.empty()) line += ", top feature " + r.ranking->rows.front().feature;
    return line + "\n";
}

int cmd_run(const Inputs& in, std::ostream& out, std::ostream& err) {
    const Loaded d = load(in, err);
    const DiagnosisReport report = diagnose(d.control, d.treatment, d.config);
    print_warnings(report.warnings, err);
    const std::string text = render_report(report, format_from_string(in.format));
    if (in.out.empty()) {
        out << text;
        err << summary_line(report);
    } else {
        write_file(in.out, text);
        out << summary_line(report);
    }
    return kOk;
}

int cmd_bias_check(const Inputs& in, std::ostream& out, std::ostream& err) {
    const Loaded d = load(in, err);
    const BiasReport report = bias_check(d.control, d.treatment, d.config.invariant_columns,
                                         d.config.bias_p_threshold, d.config.bias_deviation_threshold_pct);
    emit(in.out, render_bias(report, format_from_string(in.format)), out);
    return kOk;
}

int cmd_compare(const Inputs& in, std::ostream& out, std::ostream& err) {
    const Loaded d = load(in, err);
    const MetricComparison m =
        compare_metric(d.control, d.treatment, d.config.target_column, d.config.metric_p_threshold);
    emit(in.out, render_comparison(m, format_from_string(in.format)), out);
    return kOk;
}

int cmd_rank(const Inputs& in, std::ostream& out, std::ostream& err) {
    const Loaded d = load(in, err);
    Encoding encoding = encode(d.control, d.treatment, d.config);
    std::vector<Issue> warnings = encoding.warnings;
    const auto rows_c = all_rows(d.control.row_count());
    const auto rows_t = all_rows(d.treatment.row_count());
    const RankSide side_c{Side::control, d.control.column(d.config.target_column).bits(), rows_c};
    const RankSide side_t{Side::treatment, d.treatment.column(d.config.target_column).bits(), rows_t};
    const RankTable table = rank_features(encoding.features, side_c, side_t, d.config.ranking_p_threshold,
                                          d.config.direction, &warnings);
    print_warnings(warnings, err);
    emit(in.out, render_ranking(table, warnings, format_from_string(in.format)), out);
    return kOk;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir, std::ostream& out) {
    const ScenarioSpec spec = spec_from_json(read_file(spec_path));
    const Scenario sc = generate_scenario(spec);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw InputError("cannot create " + out_dir + ": " + ec.message());
    const fs::path dir(out_dir);
    write_file(dir / "control.csv", to_csv(sc.control));
    write_file(dir / "treatment.csv", to_csv(sc.treatment));
    write_file(dir / "truth.json", truth_to_json(sc.truth));
    out << fmt::format("{}: {} control rows, {} treatment rows written to {}\n", to_string(sc.truth.kind),
                       sc.control.row_count(), sc.treatment.row_count(), out_dir);
    return kOk;
}

std::vector<ScenarioSpec> load_specs(const std::string& path) {
    const std::string text = read_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SpecError(std::string("specs file is not valid JSON: ") + e.what());
    }
    std::vector<ScenarioSpec> specs;
    if (j.is_array()) {
        for (const auto& s : j) specs.push_back(spec_from_json(s.dump()));
        return specs;
    }
    if (!j.is_object() || !j.contains("profile"))
        throw SpecError("specs file must be a list of scenario specs or an object with a \"profile\"");
    try {
        const auto profile = j.at("profile").get<std::string>();
        const auto n = j.value("n_scenarios", std::size_t{100});
        const auto seed = j.value("seed", std::uint64_t{0});
        const auto rows = j.value("n_rows", std::int64_t{10000});
        if (n == 0) throw SpecError("n_scenarios must be positive");
        if (rows < 1) throw SpecError("n_rows must be positive");
        if (profile == "paperlike") return paperlike_profile(n, seed, rows);
        for (std::size_t i = 0; i < n; ++i) {
            const auto s = derive_seed(seed, i);
            if (profile == "null")
                specs.push_back(null_scenario(s, rows));
            else if (profile == "bias_only")
                specs.push_back(bias_only_scenario(s, rows));
            else if (profile == "systemic")
                specs.push_back(systemic_scenario(s, rows));
            else
                throw SpecError("unknown profile '" + profile + "' (expected paperlike, null, bias_only or systemic)");
        }
    } catch (const nlohmann::json::exception& e) {
        throw SpecError(std::string("invalid profile object: ") + e.what());
    }
    return specs;
}

// Column roles come from each scenario, so the config may omit them.
DiagnosisConfig load_eval_config(const std::string& path, std::ostream& err) {
    nlohmann::json j = nlohmann::json::object();
    if (!path.empty()) {
        try {
            j = nlohmann::json::parse(read_file(path));
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError("", std::string("config is not valid JSON: ") + e.what());
        }
        if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
    }
    if (!j.contains("target_column")) j["target_column"] = "fail";
    if (!j.contains("invariant_columns")) j["invariant_columns"] = {"segment"};
    if (!j.contains("hypothesis_columns")) j["hypothesis_columns"] = nlohmann::json::array();
    std::vector<Issue> warnings;
    DiagnosisConfig config = parse_config(j.dump(), &warnings);
    print_warnings(warnings, err);
    return config;
}

int cmd_eval(const std::string& specs_path, const std::string& config_path, const std::string& out_path,
             const std::string& format, int k, std::ostream& out, std::ostream& err) {
    const auto specs = load_specs(specs_path);
    const DiagnosisConfig config = load_eval_config(config_path, err);
    const EvalSummary summary = evaluate_pipeline(specs, config, k);
    const std::string text = render_eval(summary, format == "markdown");
    auto rate = [](const std::optional<double>& r) { return r ? fmt::format("{:.3f}", *r) : std::string("n/a"); };
    const std::string line = fmt::format("{} scenarios: filter_rate {}, top_{}_hit_rate {}\n", summary.n_scenarios,
                                         rate(summary.filter_rate), k, rate(summary.top_k_hit_rate));
    if (out_path.empty()) {
        out << text;
        err << line;
    } else {
        write_file(out_path, text);
        out << line;
    }
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Regression diagnosis for binary metrics: separates population bias from systemic change"};
    app.name("regdiag");
    app.require_subcommand(1);

    Inputs run_in, bias_in, compare_in, rank_in;
    auto* run_cmd = app.add_subcommand("run", "full diagnosis: compare, bias check, normalize, rank");
    add_input_flags(*run_cmd, run_in);
    auto* bias_cmd = app.add_subcommand("bias-check", "bias check of the invariant columns only");
    add_input_flags(*bias_cmd, bias_in);
    auto* compare_cmd = app.add_subcommand("compare", "target metric comparison only");
    add_input_flags(*compare_cmd, compare_in);
    auto* rank_cmd = app.add_subcommand("rank", "hypothesis feature ranking on all rows, without normalization");
    add_input_flags(*rank_cmd, rank_in);

    std::string spec_path, out_dir;
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic control/treatment pair");
    synth_cmd->add_option("--spec", spec_path, "scenario spec (JSON)")->required();
    synth_cmd->add_option("--out-dir", out_dir, "directory for control.csv, treatment.csv, truth.json")->required();

    std::string specs_path, eval_config, eval_out, eval_format = "json";
    int k = 3;
    auto* eval_cmd = app.add_subcommand("eval", "diagnose a batch of synthetic scenarios against ground truth");
    eval_cmd->add_option("--specs", specs_path, "list of scenario specs or a profile object (JSON)")->required();
    eval_cmd->add_option("--config", eval_config, "diagnosis config (JSON); column roles come from the specs");
    eval_cmd->add_option("--out", eval_out, "output file (default: standard output)");
    eval_cmd->add_option("--format", eval_format, "json or markdown")->check(CLI::IsMember({"json", "markdown"}));
    eval_cmd->add_option("--k", k, "top-k cutoff for ranking hits")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*run_cmd) return cmd_run(run_in, out, err);
        if (*bias_cmd) return cmd_bias_check(bias_in, out, err);
        if (*compare_cmd) return cmd_compare(compare_in, out, err);
        if (*rank_cmd) return cmd_rank(rank_in, out, err);
        if (*synth_cmd) return cmd_synth(spec_path, out_dir, out);
        if (*eval_cmd) return cmd_eval(specs_path, eval_config, eval_out, eval_format, k, out, err);
    } catch (const DiagnosisError& e) {
        err << "error: " << e.code() << ": " << e.what() << "\n";
        return kDiagnosisError;
    } catch (const ConfigError& e) {
        err << "error: config";
        if (!e.key().empty()) err << " key '" << e.key() << "'";
        err << ": " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}

}  // namespace regdiag::cli
