#include "padwerk/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <utility>

#include "padwerk/error.hpp"

namespace padwerk {

namespace fs = std::filesystem;

bool is_security_level(std::string_view level) {
    return level == "standard" || level == "safer" || level == "safest";
}

fs::path sample_relative_path(const Label& label) {
    if (label.is_monitored()) return fs::path{"monitored"} / (label.to_string() + ".trace");
    return fs::path{"unmonitored"} / (std::to_string(label.index()) + ".trace");
}

fs::path relay_path_for(const fs::path& client_path) {
    fs::path p = client_path;
    p.replace_extension(".relay.trace");
    return p;
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in{path, std::ios::binary};
    if (!in) throw DataError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const fs::path& path, std::string_view content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out{path, std::ios::binary | std::ios::trunc};
    if (!out) throw DataError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataError("write failed for " + path.string());
}

namespace {

Sample load_sample(const fs::path& client_path, const Label& label, const DatasetOptions& options) {
    Sample s;
    s.label = label;
    try {
        s.client = parse_trace(read_text_file(client_path), Endpoint::client, label, false);
        const fs::path relay_path = relay_path_for(client_path);
        const bool has_relay = fs::exists(relay_path);
        if (has_relay) s.relay = parse_trace(read_text_file(relay_path), Endpoint::relay, label, false);

        // Both views share the client's origin.
        const std::int64_t origin = s.client.events.empty() ? 0 : s.client.events.front().time_ns;
        for (auto& e : s.client.events) e.time_ns -= origin;
        if (s.client.events.size() > options.max_events) s.client.events.resize(options.max_events);

        if (has_relay) {
            for (auto& e : s.relay.events) e.time_ns = std::max<std::int64_t>(0, e.time_ns - origin);
            if (s.relay.events.size() > options.max_events) s.relay.events.resize(options.max_events);
        } else {
            s.relay = derive_relay_trace(s.client, options.one_way_delay_ns);
        }
    } catch (const ParseError& e) {
        throw DataError(client_path.string() + ": " + e.what());
    }
    return s;
}

std::vector<std::pair<Label, fs::path>> scan_level(const fs::path& dir) {
    std::vector<std::pair<Label, fs::path>> entries;
    for (const char* sub : {"monitored", "unmonitored"}) {
        const fs::path subdir = dir / sub;
        if (!fs::is_directory(subdir)) continue;
        for (const auto& entry : fs::directory_iterator{subdir}) {
            if (!entry.is_regular_file()) continue;
            const std::string name = entry.path().filename().string();
            if (!name.ends_with(".trace") || name.ends_with(".relay.trace")) continue;
            const std::string stem = name.substr(0, name.size() - 6);
            try {
                Label label = std::string_view{sub} == "monitored" ? Label::parse(stem)
                                                                   : Label::parse("u" + stem);
                entries.emplace_back(label, entry.path());
            } catch (const Error&) {
                throw DataError("unexpected file name " + entry.path().string());
            }
        }
    }
    return entries;
}

std::vector<std::pair<Label, fs::path>> read_manifest(const fs::path& dir) {
    std::vector<std::pair<Label, fs::path>> entries;
    std::istringstream in{read_text_file(dir / "manifest.txt")};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw DataError("manifest.txt line " + std::to_string(line_no) + ": expected label<TAB>path");
        }
        try {
            entries.emplace_back(Label::parse(line.substr(0, tab)), dir / line.substr(tab + 1));
        } catch (const Error& e) {
            throw DataError("manifest.txt line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return entries;
}

}  // namespace

Dataset load_dataset(const fs::path& root, std::string_view level, const DatasetOptions& options) {
    if (!is_security_level(level)) throw DataError("unknown security level '" + std::string(level) + "'");
    const fs::path dir = root / level;
    if (!fs::is_directory(dir)) throw DataError("dataset directory not found: " + dir.string());

    auto entries = fs::exists(dir / "manifest.txt") ? read_manifest(dir) : scan_level(dir);
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first.key() < b.first.key(); });
    for (std::size_t i = 1; i < entries.size(); ++i) {
        if (entries[i].first == entries[i - 1].first) {
            throw DataError("duplicate sample " + entries[i].first.to_string());
        }
    }

    Dataset ds;
    ds.samples.reserve(entries.size());
    for (const auto& [label, path] : entries) ds.samples.push_back(load_sample(path, label, options));
    return ds;
}

void save_dataset(const Dataset& dataset, const fs::path& root, std::string_view level) {
    if (!is_security_level(level)) throw DataError("unknown security level '" + std::string(level) + "'");
    const fs::path dir = root / level;
    for (const auto& s : dataset.samples) {
        const fs::path client_path = dir / sample_relative_path(s.label);
        write_text_file(client_path, serialize_trace(s.client));
        write_text_file(relay_path_for(client_path), serialize_trace(s.relay));
    }
}

}  // namespace padwerk
