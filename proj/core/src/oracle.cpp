#include "padwerk/oracle.hpp"

#include <spawn.h>
#include <sys/wait.h>

#include <charconv>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "padwerk/dataset.hpp"
#include "padwerk/error.hpp"

extern char** environ;

namespace padwerk {

namespace fs = std::filesystem;

int protocol_class(const Label& label) {
    return label.is_monitored() ? label.site() : static_cast<int>(kMonitoredClasses);
}

OracleCommand OracleCommand::parse(std::string_view line) {
    OracleCommand cmd;
    std::istringstream in{std::string(line)};
    std::string word;
    while (in >> word) cmd.argv.push_back(word);
    if (cmd.argv.empty()) throw OracleError("empty oracle command");
    return cmd;
}

void write_protocol_file(const fs::path& path, const LabeledSequences& data) {
    std::string out;
    for (std::size_t i = 0; i < data.size(); ++i) {
        out += std::to_string(protocol_class(data.labels[i]));
        for (std::int8_t v : data.sequences[i].values) {
            out += ',';
            out += std::to_string(v);
        }
        out += '\n';
    }
    write_text_file(path, out);
}

ScoreMatrix read_scores_file(const fs::path& path, const std::vector<Label>& truth) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const DataError&) {
        throw OracleError("oracle produced no " + path.filename().string());
    }
    ScoreMatrix scores;
    std::istringstream in{text};
    std::string line;
    std::size_t row = 0;
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (row >= truth.size()) throw OracleError("scores.csv has more rows than test samples");
        values.clear();
        std::size_t start = 0;
        while (start <= line.size()) {
            auto comma = line.find(',', start);
            const std::string_view field = std::string_view{line}.substr(
                start, comma == std::string::npos ? std::string::npos : comma - start);
            double v = 0;
            auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
            if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
                throw OracleError("scores.csv row " + std::to_string(row + 1) + ": invalid value '" +
                                  std::string(field) + "'");
            }
            values.push_back(v);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        try {
            scores.add_row(truth[row], values);
        } catch (const ValidationError& e) {
            throw OracleError("scores.csv row " + std::to_string(row + 1) + ": " + e.what());
        }
        ++row;
    }
    if (row != truth.size()) {
        throw OracleError("scores.csv has " + std::to_string(row) + " rows, expected " +
                          std::to_string(truth.size()));
    }
    return scores;
}

namespace {

std::mutex& workdir_mutex(const fs::path& workdir) {
    static std::mutex registry_mutex;
    static std::map<fs::path, std::mutex> registry;
    std::lock_guard lock{registry_mutex};
    return registry[fs::weakly_canonical(workdir)];
}

int run_process(const std::vector<std::string>& args) {
    std::vector<char*> argv;
    argv.reserve(args.size() + 1);
    for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    pid_t pid = 0;
    if (posix_spawnp(&pid, argv[0], nullptr, nullptr, argv.data(), environ) != 0) {
        throw OracleError("cannot start oracle '" + args.front() + "'");
    }
    int status = 0;
    if (waitpid(pid, &status, 0) < 0) throw OracleError("lost track of oracle process");
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
}

}  // namespace

ScoreMatrix run_external_oracle(const fs::path& workdir, const OracleCommand& command, const FoldSplit& split) {
    if (command.argv.empty()) throw OracleError("empty oracle command");
    std::lock_guard lock{workdir_mutex(workdir)};
    fs::create_directories(workdir);
    fs::remove(workdir / "scores.csv");
    write_protocol_file(workdir / "train.csv", split.train);
    write_protocol_file(workdir / "valid.csv", split.validation);
    write_protocol_file(workdir / "test.csv", split.test);

    std::vector<std::string> args = command.argv;
    args.push_back(workdir.string());
    const int code = run_process(args);
    if (code != 0) throw OracleError("oracle exited with status " + std::to_string(code));
    return read_scores_file(workdir / "scores.csv", split.test.labels);
}

}  // namespace padwerk
