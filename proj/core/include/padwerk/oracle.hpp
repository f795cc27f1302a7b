#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "padwerk/classifier.hpp"
#include "padwerk/evaluation.hpp"

namespace padwerk {

/// Class column written to the protocol files: the site for monitored
/// samples, 50 for unmonitored ones.
int protocol_class(const Label& label);

/// Executable plus leading arguments; the workdir is appended as the last
/// argument when the oracle runs.
struct OracleCommand {
    std::vector<std::string> argv;

    /// Whitespace-separated command line (no quoting).
    static OracleCommand parse(std::string_view command_line);
};

/// One sample per line: class, then the signed direction values.
void write_protocol_file(const std::filesystem::path& path, const LabeledSequences& data);

/// Reads scores.csv and validates it against the expected test labels: one
/// row per test sample, 50 values in [0, 1] each. Throws OracleError.
ScoreMatrix read_scores_file(const std::filesystem::path& path, const std::vector<Label>& truth);

/// Writes train.csv, valid.csv and test.csv into `workdir`, runs the oracle
/// and reads back scores.csv. Invocations sharing a workdir are serialized.
/// Throws OracleError on a nonzero exit or a protocol violation.
ScoreMatrix run_external_oracle(const std::filesystem::path& workdir, const OracleCommand& command,
                                const FoldSplit& split);

class ExternalOracleClassifier final : public Classifier {
public:
    ExternalOracleClassifier(OracleCommand command, std::filesystem::path workdir)
        : command_{std::move(command)}, workdir_{std::move(workdir)} {}

    ScoreMatrix classify(const FoldSplit& split) override {
        return run_external_oracle(workdir_, command_, split);
    }

private:
    OracleCommand command_;
    std::filesystem::path workdir_;
};

}  // namespace padwerk
