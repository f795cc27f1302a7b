#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "padwerk/catalog.hpp"
#include "padwerk/dataset.hpp"
#include "padwerk/error.hpp"
#include "padwerk/evaluation.hpp"
#include "padwerk/visualize.hpp"

namespace padwerk {

/// Bad command line or configuration. Maps to exit code 1.
class UsageError : public Error {
public:
    using Error::Error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitOracle = 3;

std::string_view library_version();

/// Flat key=value configuration. Every key has a default; unknown keys are
/// rejected. Lines starting with '#' are comments.
class ExperimentConfig {
public:
    ExperimentConfig();

    static ExperimentConfig parse(std::string_view text);
    static ExperimentConfig load(const std::filesystem::path& path);

    /// Overlays the non-comment lines of `text` onto this config.
    void merge_text(std::string_view text);
    void set(std::string_view key, std::string value);
    /// "key=value"
    void set_assignment(std::string_view assignment);

    const std::string& get(std::string_view key) const;
    std::int64_t get_int(std::string_view key, std::int64_t lo, std::int64_t hi) const;
    double get_double(std::string_view key, double lo, double hi) const;
    bool get_bool(std::string_view key) const;
    /// Comma-separated; empty entries dropped.
    std::vector<std::string> get_list(std::string_view key) const;

    /// Every key, sorted, one "key=value" per line. Parses back to an equal
    /// config.
    std::string echo() const;

    const std::map<std::string, std::string, std::less<>>& values() const { return values_; }

private:
    std::map<std::string, std::string, std::less<>> values_;
};

/// Keys and defaults, in documentation order.
const std::vector<std::pair<std::string, std::string>>& config_defaults();

/// Comma-separated table with a header row.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    /// Printed instead of the CSV form when set (exported source, spec text).
    std::string text;

    std::string to_csv() const;
    /// Column index by name; throws std::out_of_range when absent.
    std::size_t column(std::string_view name) const;
};

/// Shortest round-trip decimal form.
std::string format_real(double value);

/// none, spring, interspace or a machine spec file.
MachineSource resolve_machine_source(std::string_view name, const ExperimentConfig& config);

/// Synthetic dataset when synthetic=true, otherwise <data>/<level> where data
/// falls back to $PADWERK_DATA.
Dataset load_experiment_dataset(const ExperimentConfig& config);

/// Geometric grid of distinct integers in [lo, hi], both ends included.
std::vector<std::int64_t> geometric_grid(std::int64_t lo, std::int64_t hi, std::size_t points);
/// Evenly spaced integers in [lo, hi], both ends included.
std::vector<std::int64_t> linear_grid(std::int64_t lo, std::int64_t hi, std::size_t points);

/// The experiment commands. Each writes its outputs and a manifest into the
/// configured output directory (when non-empty) and returns its main table.
Table cmd_generate(const ExperimentConfig& config);
Table cmd_simulate(const ExperimentConfig& config);
Table cmd_evaluate(const ExperimentConfig& config);
Table cmd_overhead(const ExperimentConfig& config);
Table cmd_evolve(const ExperimentConfig& config);
Table cmd_crossclassify(const ExperimentConfig& config);
Table cmd_ablate(const ExperimentConfig& config);
Table cmd_sweep_budget(const ExperimentConfig& config);
Table cmd_multiply(const ExperimentConfig& config);
Table cmd_visualize(const ExperimentConfig& config);
Table cmd_export(const ExperimentConfig& config);
Table cmd_machine(const ExperimentConfig& config);

const std::vector<std::string>& command_names();

/// Runs a command by name and prints its table to `out`. Throws.
Table run_command(std::string_view command, const ExperimentConfig& config, std::ostream& out);

/// run_command with errors reported on `err` and mapped to exit codes.
int run_command_guarded(std::string_view command, const ExperimentConfig& config, std::ostream& out,
                        std::ostream& err);

}  // namespace padwerk
