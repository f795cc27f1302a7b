#include <gtest/gtest.h>

#include <fstream>
#include <thread>

#include "padwerk/error.hpp"
#include "padwerk/oracle.hpp"
#include "test_support.hpp"

using namespace padwerk;
using padwerk::testing::TempDir;

namespace {

FoldSplit small_split() {
    FoldSplit s;
    for (int site = 0; site < 4; ++site) {
        DirectionSequence seq;
        seq.values = {1, -1, static_cast<std::int8_t>(site % 2 ? 1 : -1), 0};
        s.train.add(Label::monitored(site, 0, 0), seq);
        s.validation.add(Label::monitored(site, 8, 0), seq);
        s.test.add(Label::monitored(site, 9, 0), seq);
    }
    DirectionSequence seq;
    seq.values = {-1, -1, -1, -1};
    s.test.add(Label::unmonitored(9), seq);
    s.train.add(Label::unmonitored(0), seq);
    return s;
}

OracleCommand mock(const std::string& mode) {
    return OracleCommand::parse(std::string(PADWERK_MOCK_ORACLE) + " " + mode);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(Oracle, ProtocolClass) {
    EXPECT_EQ(protocol_class(Label::monitored(17, 3, 2)), 17);
    EXPECT_EQ(protocol_class(Label::unmonitored(5)), 50);
}

TEST(Oracle, CommandParsing) {
    const auto c = OracleCommand::parse("  python3  oracle.py\t--fast ");
    EXPECT_EQ(c.argv, (std::vector<std::string>{"python3", "oracle.py", "--fast"}));
    EXPECT_THROW(OracleCommand::parse("   "), OracleError);
}

TEST(Oracle, ProtocolFileFormat) {
    TempDir dir;
    LabeledSequences d;
    DirectionSequence seq;
    seq.values = {1, -1, 0};
    d.add(Label::monitored(3, 0, 0), seq);
    d.add(Label::unmonitored(2), seq);
    write_protocol_file(dir.path() / "x.csv", d);
    EXPECT_EQ(slurp(dir.path() / "x.csv"), "3,1,-1,0\n50,1,-1,0\n");
}

TEST(Oracle, OneHotRoundTrip) {
    TempDir dir;
    const FoldSplit split = small_split();
    const ScoreMatrix m = run_external_oracle(dir.path(), mock("onehot"), split);
    ASSERT_EQ(m.rows(), split.test.size());
    EXPECT_DOUBLE_EQ(max_recall(m), 1.0);
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "train.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "valid.csv"));
    EXPECT_EQ(slurp(dir.path() / "test.csv").substr(0, 10), "0,1,-1,-1,");
    ExternalOracleClassifier c{mock("onehot"), dir.path()};
    EXPECT_DOUBLE_EQ(max_recall(c.classify(split)), 1.0);
}

TEST(Oracle, ProtocolViolationsRaise) {
    const FoldSplit split = small_split();
    for (const char* mode : {"cols49", "value17", "short", "fail"}) {
        TempDir dir;
        EXPECT_THROW(run_external_oracle(dir.path(), mock(mode), split), OracleError) << mode;
    }
    TempDir dir;
    EXPECT_THROW(run_external_oracle(dir.path(), OracleCommand{{"/nonexistent/oracle"}}, split), OracleError);
}

TEST(Oracle, StaleScoresAreNotReused) {
    TempDir dir;
    const FoldSplit split = small_split();
    run_external_oracle(dir.path(), mock("onehot"), split);
    EXPECT_THROW(run_external_oracle(dir.path(), mock("fail"), split), OracleError);
    EXPECT_FALSE(std::filesystem::exists(dir.path() / "scores.csv"));
}

TEST(Oracle, ReadScoresValidation) {
    TempDir dir;
    const auto path = dir.path() / "scores.csv";
    const std::vector<Label> truth{Label::monitored(0, 9, 0)};
    std::string row = "0.5";
    for (int c = 1; c < 50; ++c) row += ",0";
    std::ofstream(path) << row << "\n";
    EXPECT_DOUBLE_EQ(read_scores_file(path, truth).row(0)[0], 0.5);
    std::ofstream(path) << "abc" << row.substr(3) << "\n";
    EXPECT_THROW(read_scores_file(path, truth), OracleError);
    std::ofstream(path) << row << "\n" << row << "\n";
    EXPECT_THROW(read_scores_file(path, truth), OracleError);
    EXPECT_THROW(read_scores_file(dir.path() / "missing.csv", truth), OracleError);
}

TEST(Oracle, SharedWorkdirIsSerialized) {
    TempDir dir;
    const FoldSplit split = small_split();
    std::vector<double> recalls(4, 0.0);
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < recalls.size(); ++i) {
        threads.emplace_back([&, i] { recalls[i] = max_recall(run_external_oracle(dir.path(), mock("onehot"), split)); });
    }
    for (auto& t : threads) t.join();
    for (double r : recalls) EXPECT_DOUBLE_EQ(r, 1.0);
}
