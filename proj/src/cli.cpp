#include "censel/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

namespace censel {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

json parse_object(const std::string& text, const std::set<std::string>& allowed) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("configuration must be a JSON object");
    for (const auto& [key, value] : doc.items())
        if (!allowed.count(key)) throw ValidationError("unknown configuration key '" + key + "'");
    return doc;
}

template <typename T>
T get(const json& doc, const char* key, T fallback) {
    if (!doc.contains(key)) return fallback;
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(std::string("configuration key '") + key + "' has the wrong type");
    }
}

std::optional<std::uint64_t> env_seed() {
    const char* raw = std::getenv("CENSEL_SEED");
    if (!raw || !*raw) return std::nullopt;
    char* end = nullptr;
    const auto v = std::strtoull(raw, &end, 10);
    if (!end || *end != '\0') throw ValidationError("CENSEL_SEED must be an unsigned integer");
    return v;
}

}  // namespace

SynthConfig synth_preset(const std::string& name) {
    SynthConfig cfg;
    cfg.correlation = 0.2;
    cfg.relevant = {{0, 0.8}, {1, -0.8}, {2, 0.6}, {3, -0.6}, {4, 0.5}};
    if (name == "mas-like") {
        cfg.n = 873;
        cfg.p = 140;
        cfg.target_censoring = 0.93;
    } else if (name == "adni-like") {
        cfg.n = 819;
        cfg.p = 216;
        cfg.target_censoring = 0.47;
    } else {
        throw ValidationError("unknown preset '" + name + "'");
    }
    return cfg;
}

SynthConfig parse_synth_config(const std::string& text) {
    const json doc = parse_object(
        text, {"preset", "n", "p", "relevant", "target_censoring", "correlation", "seed"});
    SynthConfig cfg;
    if (doc.contains("preset")) cfg = synth_preset(get<std::string>(doc, "preset", ""));
    cfg.n = get(doc, "n", cfg.n);
    cfg.p = get(doc, "p", cfg.p);
    cfg.target_censoring = get(doc, "target_censoring", cfg.target_censoring);
    cfg.correlation = get(doc, "correlation", cfg.correlation);
    cfg.seed = get<std::uint64_t>(doc, "seed", cfg.seed);
    if (doc.contains("relevant")) {
        if (!doc["relevant"].is_array()) throw ValidationError("'relevant' must be an array");
        cfg.relevant.clear();
        for (const auto& e : doc["relevant"]) {
            if (!e.is_object() || !e.contains("feature") || !e.contains("beta"))
                throw ValidationError("'relevant' entries need 'feature' and 'beta'");
            try {
                cfg.relevant.push_back({e["feature"].get<int>(), e["beta"].get<double>()});
            } catch (const json::exception&) {
                throw ValidationError("'relevant' entries need an integer feature and a numeric beta");
            }
        }
    }
    return cfg;
}

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir) {
    const json doc = parse_object(
        text, {"dataset", "time_col", "event_col", "output_dir", "workers", "seed", "selectors",
               "aggregators", "thresholds", "B", "k_folds", "repeats", "include_individual", "rra_alpha",
               "medrank_quorum", "enet_alpha", "boost_steps"});
    RunConfig rc;
    auto& ex = rc.experiment;
    if (!doc.contains("dataset")) throw ValidationError("configuration needs 'dataset'");
    rc.dataset = get<std::string>(doc, "dataset", "");
    if (rc.dataset.is_relative() && !base_dir.empty()) rc.dataset = base_dir / rc.dataset;
    rc.time_col = get(doc, "time_col", rc.time_col);
    rc.event_col = get(doc, "event_col", rc.event_col);
    rc.output_dir = get<std::string>(doc, "output_dir", rc.output_dir.string());
    if (rc.output_dir.is_relative() && !base_dir.empty()) rc.output_dir = base_dir / rc.output_dir;
    const int workers = get(doc, "workers", 1);
    if (workers < 1) throw ValidationError("workers must be at least 1");
    rc.workers = static_cast<std::size_t>(workers);
    if (doc.contains("seed")) {
        ex.seed = get<std::uint64_t>(doc, "seed", 1);
        rc.seed_given = true;
    }
    if (doc.contains("selectors")) {
        ex.selectors.clear();
        for (const auto& s : get<std::vector<std::string>>(doc, "selectors", {}))
            ex.selectors.push_back(selector_from_string(s));
    }
    if (doc.contains("aggregators")) {
        ex.aggregators.clear();
        for (const auto& s : get<std::vector<std::string>>(doc, "aggregators", {}))
            ex.aggregators.push_back(aggregator_from_string(s));
    }
    if (doc.contains("thresholds")) {
        ex.thresholds.clear();
        for (const auto& s : get<std::vector<std::string>>(doc, "thresholds", {}))
            ex.thresholds.push_back(ThresholdKind::parse(s));
    }
    ex.replicates = get(doc, "B", ex.replicates);
    ex.k_folds = get(doc, "k_folds", ex.k_folds);
    ex.repeats = get(doc, "repeats", ex.repeats);
    ex.include_individual = get(doc, "include_individual", ex.include_individual);
    ex.aggregate.rra_alpha = get(doc, "rra_alpha", ex.aggregate.rra_alpha);
    ex.aggregate.medrank_quorum = get(doc, "medrank_quorum", ex.aggregate.medrank_quorum);
    ex.selector.enet_alpha = get(doc, "enet_alpha", ex.selector.enet_alpha);
    ex.selector.boost.steps = get(doc, "boost_steps", ex.selector.boost.steps);
    if (ex.selectors.empty()) throw ValidationError("no selectors configured");
    if (ex.replicates < 1 || ex.k_folds < 2 || ex.repeats < 1)
        throw ValidationError("B >= 1, k_folds >= 2 and repeats >= 1 are required");
    if (!(ex.selector.enet_alpha > 0.0 && ex.selector.enet_alpha <= 1.0))
        throw ValidationError("enet_alpha must lie in (0, 1]");
    return rc;
}

namespace {

int cmd_synth(const std::string& config_path, const std::string& preset, const std::string& out_path,
              std::optional<std::uint64_t> seed, std::ostream& out) {
    SynthConfig cfg;
    if (!config_path.empty())
        cfg = parse_synth_config(read_file(config_path));
    else if (!preset.empty())
        cfg = synth_preset(preset);
    else
        throw ValidationError("synth needs --config or --preset");
    if (seed)
        cfg.seed = *seed;
    else if (config_path.empty())
        cfg.seed = env_seed().value_or(cfg.seed);

    const SyntheticData synth = generate_synthetic(cfg);
    const std::filesystem::path csv = out_path;
    write_csv(synth.data, csv);
    auto truth = csv;
    truth.replace_extension(".truth.json");
    write_ground_truth(synth, cfg, truth);
    out << "wrote " << csv.string() << " (n=" << cfg.n << ", p=" << cfg.p << ") and " << truth.string() << '\n';
    out << "realized censoring rate: " << std::fixed << std::setprecision(3) << synth.realized_censoring << '\n';
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, std::optional<std::size_t> workers,
            std::optional<std::uint64_t> seed, std::ostream& out) {
    const std::filesystem::path path = config_path;
    RunConfig rc = parse_run_config(read_file(path), path.parent_path());
    if (seed) {
        rc.experiment.seed = *seed;
    } else if (!rc.seed_given) {
        if (auto s = env_seed()) rc.experiment.seed = *s;
    }
    if (!out_dir.empty()) rc.output_dir = out_dir;
    if (workers) rc.workers = std::max<std::size_t>(1, *workers);

    CsvOptions csv;
    csv.time_col = rc.time_col;
    csv.event_col = rc.event_col;
    const Dataset ds = load_csv(rc.dataset, csv);

    const ExperimentResult result = run_experiment(rc.experiment, ds, rc.workers);
    std::filesystem::create_directories(rc.output_dir);
    emit_report(result, rc.output_dir / "report.csv", rc.output_dir / "report.json");
    emit_scatter(result.results, rc.output_dir / "scatter.svg");

    int failed = 0;
    for (const auto& r : result.results) failed += r.failed ? 1 : 0;
    out << result.results.size() << " cells written to " << rc.output_dir.string();
    if (failed) out << " (" << failed << " failed)";
    out << '\n';
    return failed ? 1 : 0;
}

int cmd_report(const std::string& report_path, bool thresholds, bool consensus, int top, double freq,
               std::ostream& out) {
    const ExperimentResult result = parse_report_json(read_file(report_path));
    if (result.results.empty()) throw ValidationError("report contains no results");
    if (!thresholds && !consensus) thresholds = true;
    if (thresholds) {
        out << std::left << std::setw(14) << "threshold" << std::right << std::setw(14) << "mean_distance"
            << std::setw(8) << "cells" << '\n';
        for (const auto& row : rank_thresholds(result.results))
            out << std::left << std::setw(14) << row.threshold << std::right << std::setw(14) << std::fixed
                << std::setprecision(4) << row.mean_distance << std::setw(8) << row.cells << '\n';
    }
    if (consensus) {
        const auto report = consensus_features(result, top, freq);
        out << "features selected by at least " << std::fixed << std::setprecision(0) << report.freq * 100
            << "% of the top " << report.models.size() << " models";
        if (report.truncated) out << " (fewer than " << report.top_t << " models available)";
        out << ":\n";
        for (std::size_t m = 0; m < report.models.size(); ++m)
            out << "  model " << m + 1 << ": " << report.models[m] << '\n';
        for (std::size_t i = 0; i < report.features.size(); ++i) {
            out << std::left << std::setw(24) << report.names[i] << ' ';
            for (bool hit : report.indicators[i]) out << (hit ? 'x' : '.');
            out << '\n';
        }
    }
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Ensemble feature selection with data-driven thresholds for censored survival data",
                 "censel"};
    app.require_subcommand(1);

    std::string config, preset, out_path, report_path;
    std::uint64_t seed_value = 0;
    std::size_t workers_value = 1;
    bool want_thresholds = false, want_consensus = false;
    int top = 10;
    double freq = 0.8;

    auto* synth = app.add_subcommand("synth", "generate a synthetic censored dataset");
    synth->add_option("--config", config, "synthetic-data JSON");
    synth->add_option("--preset", preset, "mas-like or adni-like");
    synth->add_option("--out", out_path, "output CSV path")->required();
    auto* synth_seed = synth->add_option("--seed", seed_value, "override the seed");

    auto* run = app.add_subcommand("run", "run an experiment grid");
    run->add_option("--config", config, "experiment JSON")->required();
    run->add_option("--out", out_path, "output directory (overrides the config)");
    auto* run_workers = run->add_option("--workers", workers_value, "worker threads");
    auto* run_seed = run->add_option("--seed", seed_value, "override the seed");

    auto* report = app.add_subcommand("report", "summarize a saved report.json");
    report->add_option("report", report_path, "report.json from `censel run`")->required();
    report->add_flag("--thresholds", want_thresholds, "mean distance per threshold");
    report->add_flag("--consensus", want_consensus, "features shared by the top models");
    report->add_option("--top", top, "number of top models");
    report->add_option("--freq", freq, "required fraction of top models");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "censel: " << e.what() << '\n';
        return 2;
    }

    try {
        if (synth->parsed())
            return cmd_synth(config, preset, out_path,
                             synth_seed->count() ? std::optional(seed_value) : std::nullopt, out);
        if (run->parsed())
            return cmd_run(config, out_path, run_workers->count() ? std::optional(workers_value) : std::nullopt,
                           run_seed->count() ? std::optional(seed_value) : std::nullopt, out);
        if (report->parsed()) return cmd_report(report_path, want_thresholds, want_consensus, top, freq, out);
    } catch (const Error& e) {
        err << "censel: " << e.what() << '\n';
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "censel: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

}  // namespace censel
