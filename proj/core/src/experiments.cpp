#include "padwerk/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <set>
#include <sstream>

#include "padwerk/evolver.hpp"
#include "padwerk/machine_format.hpp"
#include "padwerk/oracle.hpp"
#include "padwerk/simulator.hpp"
#include "padwerk/synthetic.hpp"

#ifndef PADWERK_VERSION
#define PADWERK_VERSION "0.0.0"
#endif

namespace padwerk {

namespace fs = std::filesystem;

std::string_view library_version() { return PADWERK_VERSION; }

const std::vector<std::pair<std::string, std::string>>& config_defaults() {
    static const std::vector<std::pair<std::string, std::string>> defaults = {
        {"data", ""},
        {"level", "standard"},
        {"max_events", "10000"},
        {"synthetic", "false"},
        {"synthetic_sites", "10"},
        {"synthetic_webpages", "10"},
        {"synthetic_samples", "20"},
        {"synthetic_unmonitored", "2000"},
        {"synthetic_seed", "1"},
        {"machine", "none"},
        {"budget_allowed", ""},
        {"budget_percent", ""},
        {"seed", "1"},
        {"factor", "1"},
        {"one_way_delay_ms", "40"},
        {"tail_ms", "1000"},
        {"length", "5000"},
        {"folds", "10"},
        {"fold", "0"},
        {"classifier", "builtin"},
        {"neighbors", "5"},
        {"feature_points", "100"},
        {"thresholds", "16"},
        {"oracle", ""},
        {"oracle_workdir", ""},
        {"output", ""},
        {"ablate_points", "12"},
        {"sweep_min", "1"},
        {"sweep_max", "1500"},
        {"sweep_points", "12"},
        {"sweep_percent", "50"},
        {"factors", "1,2,5,10,15,20"},
        {"cross", "none,spring,interspace"},
        {"cross_levels", ""},
        {"population", "10"},
        {"elite", "1"},
        {"diversity", "0"},
        {"mutation", "0.1"},
        {"generations", "5"},
        {"resume", "false"},
        {"rows", "200"},
        {"name", "padwerk"},
    };
    return defaults;
}

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

}  // namespace

ExperimentConfig::ExperimentConfig() {
    for (const auto& [k, v] : config_defaults()) values_.emplace(k, v);
}

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
    ExperimentConfig c;
    c.merge_text(text);
    return c;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const DataError& e) {
        throw UsageError(std::string("cannot read config: ") + e.what());
    }
    try {
        return parse(text);
    } catch (const ParseError& e) {
        throw UsageError(path.string() + ": " + e.what());
    }
}

void ExperimentConfig::merge_text(std::string_view text) {
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const std::string line = trim(text.substr(start, end - start));
        ++line_no;
        start = end + 1;
        if (line.empty() || line.front() == '#') {
            if (end == text.size()) break;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected key=value", line_no);
        const std::string key = trim(std::string_view{line}.substr(0, eq));
        if (!values_.contains(key)) throw ParseError("unknown key '" + key + "'", line_no);
        values_[key] = trim(std::string_view{line}.substr(eq + 1));
        if (end == text.size()) break;
    }
}

void ExperimentConfig::set(std::string_view key, std::string value) {
    auto it = values_.find(key);
    if (it == values_.end()) throw UsageError("unknown config key '" + std::string(key) + "'");
    it->second = std::move(value);
}

void ExperimentConfig::set_assignment(std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) throw UsageError("expected key=value, got '" + std::string(assignment) + "'");
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

const std::string& ExperimentConfig::get(std::string_view key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw UsageError("unknown config key '" + std::string(key) + "'");
    return it->second;
}

std::int64_t ExperimentConfig::get_int(std::string_view key, std::int64_t lo, std::int64_t hi) const {
    const std::string& s = get(key);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw UsageError(std::string(key) + ": expected an integer, got '" + s + "'");
    }
    if (v < lo || v > hi) {
        throw UsageError(std::string(key) + ": " + s + " outside [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]");
    }
    return v;
}

double ExperimentConfig::get_double(std::string_view key, double lo, double hi) const {
    const std::string& s = get(key);
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw UsageError(std::string(key) + ": expected a number, got '" + s + "'");
    }
    if (v < lo || v > hi) throw UsageError(std::string(key) + ": " + s + " out of range");
    return v;
}

bool ExperimentConfig::get_bool(std::string_view key) const {
    const std::string& s = get(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw UsageError(std::string(key) + ": expected true or false, got '" + s + "'");
}

std::vector<std::string> ExperimentConfig::get_list(std::string_view key) const {
    std::vector<std::string> out;
    std::istringstream in{get(key)};
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string ExperimentConfig::echo() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
    return out;
}

std::string Table::to_csv() const {
    auto join = [](const std::vector<std::string>& cells) {
        std::string line;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) line += ',';
            line += cells[i];
        }
        return line + '\n';
    };
    std::string out = join(header);
    for (const auto& row : rows) out += join(row);
    return out;
}

std::size_t Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw std::out_of_range("no column " + std::string(name));
}

std::string format_real(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

std::vector<std::int64_t> geometric_grid(std::int64_t lo, std::int64_t hi, std::size_t points) {
    if (lo < 1 || hi < lo) throw UsageError("geometric grid needs 1 <= lo <= hi");
    if (points < 2) return {lo};
    std::set<std::int64_t> values;
    const double ratio = std::log(static_cast<double>(hi) / static_cast<double>(lo));
    for (std::size_t i = 0; i < points; ++i) {
        const double x = static_cast<double>(lo) * std::exp(ratio * static_cast<double>(i) / static_cast<double>(points - 1));
        values.insert(std::clamp<std::int64_t>(std::llround(x), lo, hi));
    }
    values.insert(lo);
    values.insert(hi);
    return {values.begin(), values.end()};
}

std::vector<std::int64_t> linear_grid(std::int64_t lo, std::int64_t hi, std::size_t points) {
    if (hi < lo) throw UsageError("linear grid needs lo <= hi");
    if (points < 2) return {lo};
    std::set<std::int64_t> values;
    for (std::size_t i = 0; i < points; ++i) {
        values.insert(lo + (hi - lo) * static_cast<std::int64_t>(i) / static_cast<std::int64_t>(points - 1));
    }
    return {values.begin(), values.end()};
}

namespace {

std::optional<PaddingBudget> budget_override(const ExperimentConfig& c) {
    const bool has_allowed = !c.get("budget_allowed").empty();
    const bool has_percent = !c.get("budget_percent").empty();
    if (!has_allowed && !has_percent) return std::nullopt;
    if (has_allowed != has_percent) throw UsageError("budget_allowed and budget_percent must be set together");
    PaddingBudget b;
    b.allowed_padding_count = static_cast<std::uint64_t>(c.get_int("budget_allowed", 0, 1'000'000'000));
    b.max_padding_percent = static_cast<std::uint32_t>(c.get_int("budget_percent", 0, 100));
    return b;
}

std::uint64_t config_seed(const ExperimentConfig& c, std::string_view key = "seed") {
    return static_cast<std::uint64_t>(c.get_int(key, 0, INT64_MAX));
}

SimulationOptions simulation_options(const ExperimentConfig& c) {
    SimulationOptions o;
    o.one_way_delay_ns = std::llround(c.get_double("one_way_delay_ms", 0, 10'000) * 1e6);
    o.tail_ns = std::llround(c.get_double("tail_ms", 0, 3'600'000) * 1e6);
    return o;
}

std::size_t sequence_length(const ExperimentConfig& c) {
    return static_cast<std::size_t>(c.get_int("length", 1, 1'000'000));
}

fs::path output_dir(const ExperimentConfig& c) { return c.get("output"); }

std::vector<FoldPlan> config_folds(const ExperimentConfig& c) {
    return make_folds(static_cast<int>(c.get_int("folds", 1, 10)));
}

std::unique_ptr<Classifier> make_classifier(const ExperimentConfig& c) {
    const std::string& kind = c.get("classifier");
    if (kind == "builtin") {
        return std::make_unique<KnnClassifier>(static_cast<std::size_t>(c.get_int("neighbors", 1, 1000)),
                                               static_cast<std::size_t>(c.get_int("feature_points", 2, 100'000)));
    }
    if (kind == "external") {
        if (c.get("oracle").empty()) throw UsageError("classifier=external requires oracle=<command>");
        fs::path workdir = c.get("oracle_workdir");
        if (workdir.empty()) {
            workdir = output_dir(c).empty() ? fs::temp_directory_path() / "padwerk-oracle" : output_dir(c) / "oracle";
        }
        return std::make_unique<ExternalOracleClassifier>(OracleCommand::parse(c.get("oracle")), workdir);
    }
    throw UsageError("classifier must be builtin or external, got '" + kind + "'");
}

void write_output(const ExperimentConfig& c, const fs::path& name, std::string_view content) {
    if (output_dir(c).empty()) return;
    write_text_file(output_dir(c) / name, content);
}

void write_manifest(const ExperimentConfig& c, std::string_view command) {
    std::string text = "# padwerk " + std::string(library_version()) + "\n# command: " + std::string(command) + "\n";
    text += c.echo();
    write_output(c, "manifest.txt", text);
}

std::vector<DefendedSample> defend(const ExperimentConfig& c, const Dataset& ds, const MachineSource& source,
                                   std::size_t factor) {
    return simulate_dataset(source, ds, config_seed(c), factor, simulation_options(c));
}

EvaluationReport evaluate_defended(const ExperimentConfig& c, std::span<const DefendedSample> defended,
                                   Classifier& classifier) {
    const auto folds = config_folds(c);
    return evaluate(to_sequences(defended, sequence_length(c)), folds, classifier,
                    static_cast<std::size_t>(c.get_int("thresholds", 2, 10'000)));
}

Table recall_table(const EvaluationReport& report) {
    Table t;
    t.header = {"fold", "max_recall"};
    for (const auto& f : report.folds) t.rows.push_back({std::to_string(f.fold), format_real(f.max_recall)});
    t.rows.push_back({"mean", format_real(report.mean_max_recall)});
    return t;
}

MachineSource configured_source(const ExperimentConfig& c) {
    return resolve_machine_source(c.get("machine"), c);
}

std::string copy_suffix(std::size_t copy, std::size_t factor) {
    return factor > 1 ? ".c" + std::to_string(copy) : std::string{};
}

}  // namespace

MachineSource resolve_machine_source(std::string_view name, const ExperimentConfig& c) {
    MachineSource source = MachineSource::fixed(build_undefended());
    if (name == "none") {
        source = MachineSource::fixed(build_undefended());
    } else if (name == "spring") {
        source = MachineSource::fixed(build_spring());
    } else if (name == "interspace") {
        source = MachineSource::interspace();
    } else {
        const fs::path path{name};
        if (!fs::exists(path)) throw UsageError("machine '" + std::string(name) + "' is not a known machine or file");
        std::string text = read_text_file(path);
        try {
            source = MachineSource::fixed(parse_machine_spec(text));
        } catch (const ParseError& e) {
            throw DataError(path.string() + ": " + e.what());
        }
    }
    if (auto b = budget_override(c)) source = source.with_budget(*b);
    return source;
}

Dataset load_experiment_dataset(const ExperimentConfig& c) {
    if (c.get_bool("synthetic")) {
        SyntheticOptions o;
        o.sites = static_cast<int>(c.get_int("synthetic_sites", 1, kSites));
        o.webpages = static_cast<int>(c.get_int("synthetic_webpages", 1, kWebpagesPerSite));
        o.samples = static_cast<int>(c.get_int("synthetic_samples", 1, kSamplesPerWebpage));
        o.unmonitored = static_cast<int>(c.get_int("synthetic_unmonitored", 0, kUnmonitoredCount));
        o.seed = config_seed(c, "synthetic_seed");
        o.one_way_delay_ns = simulation_options(c).one_way_delay_ns;
        return make_synthetic_dataset(o);
    }
    std::string root = c.get("data");
    if (root.empty()) {
        if (const char* env = std::getenv("PADWERK_DATA")) root = env;
    }
    if (root.empty()) throw UsageError("no dataset: set data=<dir>, PADWERK_DATA or synthetic=true");
    const std::string& level = c.get("level");
    if (!is_security_level(level)) throw UsageError("level must be standard, safer or safest");
    if (!fs::is_directory(fs::path(root) / level)) {
        throw DataError("dataset directory " + (fs::path(root) / level).string() + " does not exist");
    }
    DatasetOptions o;
    o.one_way_delay_ns = simulation_options(c).one_way_delay_ns;
    o.max_events = static_cast<std::size_t>(c.get_int("max_events", 1, 100'000'000));
    return load_dataset(root, level, o);
}

Table cmd_generate(const ExperimentConfig& c) {
    if (output_dir(c).empty()) throw UsageError("generate requires output=<dir>");
    ExperimentConfig synthetic = c;
    synthetic.set("synthetic", "true");
    const Dataset ds = load_experiment_dataset(synthetic);
    const std::string& level = c.get("level");
    if (!is_security_level(level)) throw UsageError("level must be standard, safer or safest");
    save_dataset(ds, output_dir(c), level);
    std::size_t monitored = 0;
    for (const auto& s : ds.samples) monitored += s.label.is_monitored() ? 1 : 0;
    Table t;
    t.header = {"samples", "monitored", "unmonitored"};
    t.rows.push_back({std::to_string(ds.size()), std::to_string(monitored), std::to_string(ds.size() - monitored)});
    write_output(c, "generate.csv", t.to_csv());
    write_manifest(c, "generate");
    return t;
}

Table cmd_simulate(const ExperimentConfig& c) {
    const Dataset ds = load_experiment_dataset(c);
    const auto factor = static_cast<std::size_t>(c.get_int("factor", 1, 20));
    const auto defended = defend(c, ds, configured_source(c), factor);
    Table t;
    t.header = {"label", "copy", "nonpadding_sent", "nonpadding_received", "padding_sent", "padding_received"};
    for (const auto& d : defended) {
        t.rows.push_back({d.label.to_string(), std::to_string(d.copy), std::to_string(d.defended.nonpadding_sent),
                          std::to_string(d.defended.nonpadding_received), std::to_string(d.defended.padding_sent),
                          std::to_string(d.defended.padding_received)});
        if (!output_dir(c).empty()) {
            fs::path rel = sample_relative_path(d.label);
            rel.replace_filename(rel.stem().string() + copy_suffix(d.copy, factor) + ".trace");
            write_output(c, fs::path("defended") / rel, serialize_trace(d.defended.trace));
        }
    }
    write_output(c, "cells.csv", t.to_csv());
    write_output(c, "overhead.csv", format_overhead_csv(overhead(defended)));
    write_manifest(c, "simulate");
    return t;
}

Table cmd_evaluate(const ExperimentConfig& c) {
    const Dataset ds = load_experiment_dataset(c);
    auto classifier = make_classifier(c);
    const auto defended = defend(c, ds, configured_source(c), 1);
    const EvaluationReport report = evaluate_defended(c, defended, *classifier);
    Table t = recall_table(report);
    write_output(c, "pr.csv", format_pr_csv(report));
    write_output(c, "max_recall.csv", t.to_csv());
    write_manifest(c, "evaluate");
    return t;
}

Table cmd_overhead(const ExperimentConfig& c) {
    const Dataset ds = load_experiment_dataset(c);
    const auto factor = static_cast<std::size_t>(c.get_int("factor", 1, 20));
    const OverheadReport r = overhead(defend(c, ds, configured_source(c), factor));
    auto opt = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string("NA"); };
    Table t;
    t.header = {"total_bw_percent", "sent_bw_percent", "recv_bw_percent", "sent_share_percent", "recv_share_percent"};
    t.rows.push_back({format_real(r.total_bw_percent), opt(r.sent_bw_percent), opt(r.recv_bw_percent),
                      format_real(r.sent_share_percent), format_real(r.recv_share_percent)});
    t.text = format_overhead_text(r);
    write_output(c, "overhead.txt", t.text);
    write_output(c, "overhead.csv", format_overhead_csv(r));
    write_manifest(c, "overhead");
    return t;
}

Table cmd_evolve(const ExperimentConfig& c) {
    const Dataset ds = load_experiment_dataset(c);
    auto classifier = make_classifier(c);
    EvolutionConfig ec;
    ec.population_size = static_cast<std::size_t>(c.get_int("population", 2, 10'000));
    ec.elite_count = static_cast<std::size_t>(c.get_int("elite", 0, 10'000));
    ec.diversity_count = static_cast<std::size_t>(c.get_int("diversity", 0, 10'000));
    ec.mutation_prob = c.get_double("mutation", 0, 1);
    ec.seed = config_seed(c);
    ec.budget = budget_override(c).value_or(kSpringBudget);
    try {
        validate(ec);
    } catch (const ValidationError& e) {
        throw UsageError(e.what());
    }
    const FoldPlan fold{static_cast<int>(c.get_int("fold", 0, 9))};
    FitnessFn fitness = make_recall_fitness(ds, fold, *classifier, simulation_options(c), sequence_length(c));
    const fs::path dir = output_dir(c).empty() ? fs::path{} : output_dir(c) / "evolution";
    const auto generations = static_cast<std::size_t>(c.get_int("generations", 0, 1'000'000));

    std::optional<Evolution> evo;
    if (c.get_bool("resume") && !dir.empty() && fs::exists(dir / "state.txt")) {
        evo.emplace(Evolution::resume(ec, fitness, dir));
    } else {
        evo.emplace(ec, fitness, dir);
    }
    Table t;
    t.header = {"gen", "best", "mean", "path"};
    auto add = [&](const GenerationSummary& s) {
        t.rows.push_back({std::to_string(s.generation), format_real(s.best), format_real(s.mean), s.best_path.string()});
    };
    add(evo->summary());
    while (evo->generation() < generations) add(evo->step());
    write_output(c, "best.machine", serialize_machine_spec(evo->best().pair));
    write_output(c, "evolution.csv", t.to_csv());
    write_manifest(c, "evolve");
    return t;
}

Table cmd_crossclassify(const ExperimentConfig& c) {
    auto classifier = make_classifier(c);
    const FoldPlan fold{static_cast<int>(c.get_int("fold", 0, 9))};
    std::vector<std::string> names;
    std::vector<LabeledSequences> datasets;
    const auto levels = c.get_list("cross_levels");
    if (!levels.empty()) {
        if (c.get_bool("synthetic")) throw UsageError("cross_levels needs a real dataset");
        const MachineSource source = configured_source(c);
        for (const auto& level : levels) {
            ExperimentConfig at = c;
            at.set("level", level);
            const Dataset ds = load_experiment_dataset(at);
            names.push_back(level);
            datasets.push_back(to_sequences(defend(c, ds, source, 1), sequence_length(c)));
        }
    } else {
        const Dataset ds = load_experiment_dataset(c);
        for (const auto& machine : c.get_list("cross")) {
            names.push_back(machine);
            datasets.push_back(to_sequences(defend(c, ds, resolve_machine_source(machine, c), 1), sequence_length(c)));
        }
    }
    if (datasets.empty()) throw UsageError("crossclassify needs at least one entry in cross or cross_levels");
    const auto matrix = cross_classify(datasets, fold, *classifier);
    Table t;
    t.header.push_back("train\\test");
    for (const auto& n : names) t.header.push_back(n);
    for (std::size_t i = 0; i < names.size(); ++i) {
        std::vector<std::string> row{names[i]};
        for (double v : matrix[i]) row.push_back(format_real(v));
        t.rows.push_back(std::move(row));
    }
    write_output(c, "crossclassify.csv", t.to_csv());
    write_manifest(c, "crossclassify");
    return t;
}

Table cmd_ablate(const ExperimentConfig& c) {
    const Dataset ds = load_experiment_dataset(c);
    auto classifier = make_classifier(c);
    const LabeledSequences base = to_sequences(defend(c, ds, configured_source(c), 1), sequence_length(c));
    const auto L = static_cast<std::int64_t>(sequence_length(c));
    const auto points = static_cast<std::size_t>(c.get_int("ablate_points", 2, 10'000));
    const auto folds = config_folds(c);
    const auto thresholds = static_cast<std::size_t>(c.get_int("thresholds", 2, 10'000));

    std::vector<std::int64_t> include_grid = geometric_grid(1, L, points);
    include_grid.insert(include_grid.begin(), 0);
    const std::vector<std::int64_t> exclude_grid = linear_grid(0, L, points);

    Table t;
    t.header = {"mode", "cells", "fold", "max_recall"};
    auto run = [&](std::string_view mode, std::int64_t n, std::size_t keep_begin, std::size_t keep_end) {
        LabeledSequences masked = base;
        for (auto& seq : masked.sequences) seq = apply_zero_mask(seq, keep_begin, keep_end);
        const EvaluationReport report = evaluate(masked, folds, *classifier, thresholds);
        for (const auto& f : report.folds) {
            t.rows.push_back({std::string(mode), std::to_string(n), std::to_string(f.fold), format_real(f.max_recall)});
        }
    };
    const auto Lu = static_cast<std::size_t>(L);
    for (std::int64_t n : include_grid) run("include", n, 0, static_cast<std::size_t>(n));
    for (std::int64_t n : exclude_grid) run("exclude", n, static_cast<std::size_t>(n), Lu);
    write_output(c, "ablate.csv", t.to_csv());
    write_manifest(c, "ablate");
    return t;
}

Table cmd_sweep_budget(const ExperimentConfig& c) {
    const Dataset ds = load_experiment_dataset(c);
    auto classifier = make_classifier(c);
    const MachineSource base = configured_source(c);
    const auto lo = c.get_int("sweep_min", 1, 1'000'000);
    const auto hi = c.get_int("sweep_max", lo, 1'000'000);
    const auto grid = geometric_grid(lo, hi, static_cast<std::size_t>(c.get_int("sweep_points", 1, 10'000)));
    const auto percent = static_cast<std::uint32_t>(c.get_int("sweep_percent", 0, 100));
    Table t;
    t.header = {"allowed_padding_count", "max_recall", "total_bw"};
    for (std::int64_t allowed : grid) {
        const MachineSource source = base.with_budget({static_cast<std::uint64_t>(allowed), percent});
        const auto defended = defend(c, ds, source, 1);
        const EvaluationReport report = evaluate_defended(c, defended, *classifier);
        t.rows.push_back({std::to_string(allowed), format_real(report.mean_max_recall),
                          format_real(overhead(defended).total_bw_percent)});
    }
    write_output(c, "sweep_budget.csv", t.to_csv());
    write_manifest(c, "sweep-budget");
    return t;
}

Table cmd_multiply(const ExperimentConfig& c) {
    const Dataset ds = load_experiment_dataset(c);
    auto classifier = make_classifier(c);
    const MachineSource source = configured_source(c);
    std::set<std::int64_t> factors;
    for (const auto& f : c.get_list("factors")) {
        ExperimentConfig probe;
        probe.set("factor", f);
        factors.insert(probe.get_int("factor", 1, 20));
    }
    if (factors.empty()) throw UsageError("factors must list at least one value in 1..20");
    Table t;
    t.header = {"factor", "max_recall"};
    for (std::int64_t f : factors) {
        const auto defended = defend(c, ds, source, static_cast<std::size_t>(f));
        t.rows.push_back({std::to_string(f), format_real(evaluate_defended(c, defended, *classifier).mean_max_recall)});
    }
    write_output(c, "multiply.csv", t.to_csv());
    write_manifest(c, "multiply");
    return t;
}

Table cmd_visualize(const ExperimentConfig& c) {
    if (output_dir(c).empty()) throw UsageError("visualize requires output=<dir>");
    const Dataset ds = load_experiment_dataset(c);
    const auto rows = static_cast<std::size_t>(c.get_int("rows", 1, 1'000'000));
    Dataset head;
    for (std::size_t i = 0; i < ds.size() && i < rows; ++i) head.samples.push_back(ds.samples[i]);
    const auto defended = defend(c, head, configured_source(c), 1);
    std::vector<Trace> traces;
    for (const auto& d : defended) traces.push_back(d.defended.trace);
    const TraceGrid grid = render_trace_grid(traces, rows);
    fs::create_directories(output_dir(c));
    write_png(grid, output_dir(c) / "grid.png");
    Table t;
    t.header = {"width", "height"};
    t.rows.push_back({std::to_string(grid.width), std::to_string(grid.height)});
    write_manifest(c, "visualize");
    return t;
}

Table cmd_export(const ExperimentConfig& c) {
    const MachineSource source = configured_source(c);
    const MachinePair pair = source.draw(config_seed(c));
    Table t;
    t.text = export_framework_source(pair, c.get("name"));
    write_output(c, c.get("name") + ".c", t.text);
    write_manifest(c, "export");
    return t;
}

Table cmd_machine(const ExperimentConfig& c) {
    const MachineSource source = configured_source(c);
    const MachinePair pair = source.draw(config_seed(c));
    Table t;
    t.text = serialize_machine_spec(pair);
    write_output(c, c.get("name") + ".machine", t.text);
    write_manifest(c, "machine");
    return t;
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {
        "generate", "simulate", "evaluate", "overhead", "evolve",  "crossclassify",
        "ablate",   "sweep-budget", "multiply", "visualize", "export", "machine",
    };
    return names;
}

Table run_command(std::string_view command, const ExperimentConfig& c, std::ostream& out) {
    using Fn = Table (*)(const ExperimentConfig&);
    static const std::map<std::string, Fn, std::less<>> table = {
        {"generate", &cmd_generate},         {"simulate", &cmd_simulate},   {"evaluate", &cmd_evaluate},
        {"overhead", &cmd_overhead},         {"evolve", &cmd_evolve},       {"crossclassify", &cmd_crossclassify},
        {"ablate", &cmd_ablate},             {"sweep-budget", &cmd_sweep_budget}, {"multiply", &cmd_multiply},
        {"visualize", &cmd_visualize},       {"export", &cmd_export},       {"machine", &cmd_machine},
    };
    auto it = table.find(command);
    if (it == table.end()) throw UsageError("unknown command '" + std::string(command) + "'");
    Table t = it->second(c);
    if (!t.text.empty()) out << t.text;
    else out << t.to_csv();
    return t;
}

int run_command_guarded(std::string_view command, const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
    try {
        run_command(command, c, out);
        return kExitOk;
    } catch (const UsageError& e) {
        err << "padwerk " << command << ": " << e.what() << '\n';
        return kExitUsage;
    } catch (const OracleError& e) {
        err << "padwerk " << command << ": oracle: " << e.what() << '\n';
        return kExitOracle;
    } catch (const std::exception& e) {
        err << "padwerk " << command << ": " << e.what() << '\n';
        return kExitData;
    }
}

}  // namespace padwerk
