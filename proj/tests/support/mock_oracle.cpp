// Minimal oracle for protocol tests. Usage: mock_oracle <mode> <workdir>
//   onehot   score 1 on the true class of each test row (taken from test.csv)
//   cols49   rows with 49 columns
//   value17  a score of 1.7 in the first column
//   short    one row fewer than test.csv
//   fail     exit status 4 without writing scores
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    if (argc != 3) {
        std::cerr << "usage: mock_oracle <mode> <workdir>\n";
        return 2;
    }
    const std::string mode = argv[1];
    const std::string dir = argv[2];
    if (mode == "fail") return 4;

    for (const char* name : {"train.csv", "valid.csv"}) {
        std::ifstream probe(dir + "/" + name);
        if (!probe) {
            std::cerr << "missing " << name << "\n";
            return 3;
        }
    }
    std::ifstream test(dir + "/test.csv");
    if (!test) {
        std::cerr << "missing test.csv\n";
        return 3;
    }
    std::vector<int> classes;
    std::string line;
    while (std::getline(test, line)) {
        if (line.empty()) continue;
        classes.push_back(std::stoi(line.substr(0, line.find(','))));
    }
    if (mode == "short" && !classes.empty()) classes.pop_back();

    std::ofstream out(dir + "/scores.csv");
    const int columns = mode == "cols49" ? 49 : 50;
    for (int truth : classes) {
        for (int c = 0; c < columns; ++c) {
            if (c) out << ',';
            if (mode == "value17" && c == 0) out << "1.7";
            else out << (c == truth ? "1" : "0");
        }
        out << '\n';
    }
    return out ? 0 : 5;
}
