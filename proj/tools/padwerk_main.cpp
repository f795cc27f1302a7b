#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "padwerk/experiments.hpp"

namespace {

const std::map<std::string, std::string> kCommandHelp = {
    {"generate", "write a synthetic dataset to the output directory"},
    {"simulate", "apply a machine to a dataset and write defended traces"},
    {"evaluate", "cross-validated open-world max recall and PR sweep"},
    {"overhead", "bandwidth overhead of a machine on a dataset"},
    {"evolve", "genetic search for machine pairs"},
    {"crossclassify", "train on one defended dataset, test on another"},
    {"ablate", "max recall with leading cells included or excluded"},
    {"sweep-budget", "max recall and overhead across padding budgets"},
    {"multiply", "max recall with training data grown by repeated simulation"},
    {"visualize", "render defended traces as a colored grid image"},
    {"export", "print a machine as circuit padding framework source"},
    {"machine", "print a machine spec (spring, interspace instance, file)"},
};

std::string flag_name(std::string key) {
    for (char& ch : key) {
        if (ch == '_') ch = '-';
    }
    return "--" + key;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"padwerk: padding machine workbench"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(padwerk::library_version()));

    std::string config_file;
    app.add_option("--config", config_file, "flat key=value config file")->check(CLI::ExistingFile);

    std::vector<std::string> assignments;
    app.add_option("--set", assignments, "override a config key (key=value), repeatable");

    // One flag per config key; later sources win: defaults, --config, --set, flags.
    std::map<std::string, std::string> flag_values;
    for (const auto& [key, fallback] : padwerk::config_defaults()) {
        app.add_option(flag_name(key), flag_values[key], "config key " + key + " (default '" + fallback + "')");
    }

    for (const auto& name : padwerk::command_names()) {
        auto* sub = app.add_subcommand(name, kCommandHelp.at(name));
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? padwerk::kExitOk : padwerk::kExitUsage;
    }

    padwerk::ExperimentConfig config;
    try {
        if (!config_file.empty()) config = padwerk::ExperimentConfig::load(config_file);
        for (const auto& a : assignments) config.set_assignment(a);
        for (const auto& [key, value] : flag_values) {
            if (app.count(flag_name(key)) > 0) config.set(key, value);
        }
    } catch (const std::exception& e) {
        std::cerr << "padwerk: " << e.what() << '\n';
        return padwerk::kExitUsage;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    return padwerk::run_command_guarded(command, config, std::cout, std::cerr);
}
