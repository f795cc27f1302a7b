#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <sstream>

#include "padwerk/experiments.hpp"
#include "padwerk/machine_format.hpp"
#include "test_support.hpp"

using namespace padwerk;
using padwerk::testing::TempDir;

namespace {

/// Small synthetic setup that runs in a second or two.
ExperimentConfig small_config() {
    ExperimentConfig c;
    c.set("synthetic", "true");
    c.set("synthetic_sites", "4");
    c.set("synthetic_samples", "4");
    c.set("synthetic_unmonitored", "80");
    c.set("folds", "2");
    c.set("length", "1000");
    c.set("feature_points", "40");
    return c;
}

double mean_recall(const Table& t) {
    return std::stod(t.rows.back()[t.column("max_recall")]);
}

}  // namespace

TEST(Config, DefaultsAndOverrides) {
    ExperimentConfig c;
    EXPECT_EQ(c.get("machine"), "none");
    EXPECT_EQ(c.get_int("thresholds", 2, 100), 16);
    const auto parsed = ExperimentConfig::parse("# comment\nmachine = spring\n\nseed=7\n");
    EXPECT_EQ(parsed.get("machine"), "spring");
    EXPECT_EQ(parsed.get_int("seed", 0, 100), 7);
    EXPECT_THROW(ExperimentConfig::parse("colour=blue\n"), ParseError);
    EXPECT_THROW(ExperimentConfig::parse("no equals sign\n"), ParseError);
    EXPECT_THROW(c.set("colour", "blue"), UsageError);
    EXPECT_THROW(c.set_assignment("seed"), UsageError);
    c.set_assignment("factors=1, 3,,5");
    EXPECT_EQ(c.get_list("factors"), (std::vector<std::string>{"1", "3", "5"}));
}

TEST(Config, TypedGettersValidate) {
    ExperimentConfig c;
    c.set("seed", "abc");
    EXPECT_THROW(c.get_int("seed", 0, 10), UsageError);
    c.set("seed", "11");
    EXPECT_THROW(c.get_int("seed", 0, 10), UsageError);
    c.set("mutation", "0.5x");
    EXPECT_THROW(c.get_double("mutation", 0, 1), UsageError);
    c.set("resume", "yes");
    EXPECT_TRUE(c.get_bool("resume"));
    c.set("resume", "maybe");
    EXPECT_THROW(c.get_bool("resume"), UsageError);
}

TEST(Config, EchoRoundTrips) {
    ExperimentConfig c = small_config();
    c.set("oracle", "python3 oracle.py");
    const ExperimentConfig back = ExperimentConfig::parse(c.echo());
    EXPECT_EQ(back.values(), c.values());
    EXPECT_EQ(c.values().size(), config_defaults().size());
}

TEST(Grids, GeometricAndLinear) {
    EXPECT_EQ(geometric_grid(1, 1000, 4), (std::vector<std::int64_t>{1, 10, 100, 1000}));
    const auto g = geometric_grid(1, 5, 10);
    EXPECT_EQ(g, (std::vector<std::int64_t>{1, 2, 3, 4, 5}));
    EXPECT_EQ(linear_grid(0, 100, 5), (std::vector<std::int64_t>{0, 25, 50, 75, 100}));
    EXPECT_EQ(geometric_grid(7, 7, 3), (std::vector<std::int64_t>{7}));
}

TEST(Experiments, FormatReal) {
    EXPECT_EQ(format_real(0.5), "0.5");
    EXPECT_EQ(format_real(1), "1");
    EXPECT_EQ(format_real(0.1), "0.1");
}

TEST(Experiments, MultiplyAtFactorOneMatchesEvaluate) {
    ExperimentConfig c = small_config();
    c.set("machine", "spring");
    c.set("factors", "1");
    const Table eval = cmd_evaluate(c);
    const Table mult = cmd_multiply(c);
    ASSERT_EQ(mult.rows.size(), 1u);
    EXPECT_EQ(mult.rows[0][1], eval.rows.back()[1]);
    c.set("factors", "0");
    EXPECT_THROW(cmd_multiply(c), UsageError);
}

TEST(Experiments, OverheadOfNoDefenseIsNeutral) {
    const Table t = cmd_overhead(small_config());
    EXPECT_EQ(t.rows[0][t.column("total_bw_percent")], "100");
    EXPECT_NE(t.text.find("total_bw_percent 100.00"), std::string::npos);
}

TEST(Experiments, AblationEnds) {
    ExperimentConfig c = small_config();
    c.set("ablate_points", "3");
    c.set("folds", "1");
    const Table ablate = cmd_ablate(c);
    const Table eval = cmd_evaluate(c);
    const std::size_t mode = ablate.column("mode"), cells = ablate.column("cells"), recall = ablate.column("max_recall");
    bool saw_full = false, saw_none = false;
    for (const auto& row : ablate.rows) {
        if (row[mode] == "include" && row[cells] == "1000") {
            EXPECT_EQ(row[recall], eval.rows[0][1]);
            saw_full = true;
        }
        if (row[mode] == "exclude" && row[cells] == "0") EXPECT_EQ(row[recall], eval.rows[0][1]);
        if (row[mode] == "include" && row[cells] == "0") {
            // every sequence is blank, so the classifier has nothing to go on
            EXPECT_LE(std::stod(row[recall]), 0.5);
            saw_none = true;
        }
    }
    EXPECT_TRUE(saw_full);
    EXPECT_TRUE(saw_none);
}

TEST(Experiments, SweepWithoutRelativeAllowance) {
    ExperimentConfig c = small_config();
    c.set("machine", "spring");
    c.set("folds", "1");
    c.set("sweep_min", "1");
    c.set("sweep_max", "100");
    c.set("sweep_points", "3");
    c.set("sweep_percent", "0");
    const Table t = cmd_sweep_budget(c);
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_EQ(t.rows[0][0], "1");
    double previous = 0;
    for (const auto& row : t.rows) {
        const double bw = std::stod(row[2]);
        EXPECT_GT(bw, previous);
        previous = bw;
    }
}

TEST(Experiments, ManifestReproducesRun) {
    TempDir dir;
    ExperimentConfig c = small_config();
    c.set("machine", "interspace");
    c.set("output", (dir.path() / "a").string());
    const Table first = cmd_evaluate(c);
    ExperimentConfig again = ExperimentConfig::load(dir.path() / "a" / "manifest.txt");
    EXPECT_EQ(again.values(), c.values());
    again.set("output", (dir.path() / "b").string());
    const Table second = cmd_evaluate(again);
    EXPECT_EQ(first.rows, second.rows);
    EXPECT_EQ(read_text_file(dir.path() / "a" / "pr.csv"), read_text_file(dir.path() / "b" / "pr.csv"));
}

TEST(Experiments, GenerateThenLoad) {
    TempDir dir;
    ExperimentConfig c = small_config();
    c.set("synthetic_unmonitored", "10");
    c.set("output", dir.path().string());
    const Table t = cmd_generate(c);
    EXPECT_EQ(t.rows[0][0], "170");
    ExperimentConfig load;
    load.set("data", dir.path().string());
    EXPECT_EQ(load_experiment_dataset(load).size(), 170u);
    load.set("level", "safest");
    EXPECT_THROW(load_experiment_dataset(load), DataError);
}

TEST(Experiments, MachineSources) {
    TempDir dir;
    ExperimentConfig c;
    EXPECT_THROW(resolve_machine_source("nope.machine", c), UsageError);
    write_text_file(dir.path() / "bad.machine", "padmachine/1\nmachine client\nbogus\n");
    EXPECT_THROW(resolve_machine_source((dir.path() / "bad.machine").string(), c), DataError);
    c.set("budget_allowed", "5");
    EXPECT_THROW(resolve_machine_source("spring", c), UsageError);
    c.set("budget_percent", "10");
    EXPECT_EQ(resolve_machine_source("spring", c).draw(0).client.budget, (PaddingBudget{5, 10}));

    c = {};
    c.set("machine", "spring");
    c.set("output", dir.path().string());
    const Table m = cmd_machine(c);
    EXPECT_EQ(parse_machine_spec(m.text), build_spring());
    c.set("machine", (dir.path() / "padwerk.machine").string());
    EXPECT_EQ(cmd_machine(c).text, m.text);
    EXPECT_NE(cmd_export(c).text.find("circpad_register_padding_machine"), std::string::npos);
}

TEST(Experiments, SimulateAndVisualizeWriteFiles) {
    TempDir dir;
    ExperimentConfig c = small_config();
    c.set("machine", "spring");
    c.set("factor", "2");
    c.set("rows", "20");
    c.set("output", dir.path().string());
    const Table sim = cmd_simulate(c);
    EXPECT_EQ(sim.rows.size(), 2u * (4 * 10 * 4 + 80));
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "defended" / "monitored" / "s0-p0-0.c1.trace"));
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "overhead.csv"));
    const Table vis = cmd_visualize(c);
    EXPECT_EQ(vis.rows[0][1], "20");
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "grid.png"));
}

TEST(Experiments, EvolveAndCrossClassify) {
    TempDir dir;
    ExperimentConfig c = small_config();
    c.set("folds", "1");
    c.set("population", "4");
    c.set("generations", "2");
    c.set("output", dir.path().string());
    const Table evo = cmd_evolve(c);
    ASSERT_EQ(evo.rows.size(), 3u);
    EXPECT_LE(std::stod(evo.rows[1][1]), std::stod(evo.rows[2][1]));
    EXPECT_NO_THROW(parse_machine_spec(read_text_file(dir.path() / "best.machine")));
    c.set("generations", "3");
    c.set("resume", "true");
    const Table more = cmd_evolve(c);
    EXPECT_EQ(more.rows.front()[0], "2");
    EXPECT_EQ(more.rows.back()[0], "3");

    c.set("cross", "none,spring");
    const Table cross = cmd_crossclassify(c);
    EXPECT_EQ(cross.header, (std::vector<std::string>{"train\\test", "none", "spring"}));
    ASSERT_EQ(cross.rows.size(), 2u);
}

TEST(Experiments, GuardedExitCodes) {
    std::ostringstream out, err;
    ExperimentConfig c;
    EXPECT_EQ(run_command_guarded("fly", c, out, err), kExitUsage);
    c.set("data", "/nonexistent/padwerk-data");
    EXPECT_EQ(run_command_guarded("evaluate", c, out, err), kExitData);
    ExperimentConfig o = small_config();
    o.set("classifier", "external");
    EXPECT_EQ(run_command_guarded("evaluate", o, out, err), kExitUsage);
    o.set("oracle", std::string(PADWERK_MOCK_ORACLE) + " fail");
    EXPECT_EQ(run_command_guarded("evaluate", o, out, err), kExitOracle);
    EXPECT_NE(err.str().find("oracle"), std::string::npos);
    o.set("oracle", std::string(PADWERK_MOCK_ORACLE) + " onehot");
    out.str("");
    EXPECT_EQ(run_command_guarded("evaluate", o, out, err), kExitOk);
    EXPECT_NE(out.str().find("mean,1\n"), std::string::npos);
}

#ifdef PADWERK_CLI
namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(PADWERK_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run_cli("--version"), 0);
    EXPECT_EQ(run_cli("machine --machine spring"), 0);
    EXPECT_EQ(run_cli("machine --set colour=blue"), 1);
    EXPECT_EQ(run_cli("frobnicate"), 1);
    EXPECT_EQ(run_cli("evaluate --data /nonexistent/padwerk-data"), 2);
    EXPECT_EQ(run_cli("evaluate --synthetic true --synthetic-sites 2 --synthetic-samples 2 --synthetic-unmonitored 20 "
                      "--folds 1 --classifier external --oracle /nonexistent/oracle"),
              3);
}
#endif
