#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "padwerk/trace.hpp"

namespace padwerk {

inline constexpr std::int64_t kDefaultOneWayDelayNs = 40'000'000;

/// One visit: the client trace and the matching relay-side trace.
struct Sample {
    Label label;
    Trace client;
    Trace relay;
};

struct Dataset {
    std::vector<Sample> samples;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
};

struct DatasetOptions {
    /// Used to derive relay traces when no relay file accompanies a sample.
    std::int64_t one_way_delay_ns = kDefaultOneWayDelayNs;
    std::size_t max_events = kMaxDatasetEvents;
};

/// standard, safer or safest.
bool is_security_level(std::string_view level);

/// Path of a sample's client trace relative to the level directory:
/// monitored/s<site>-p<page>-<sample>.trace or unmonitored/<index>.trace.
std::filesystem::path sample_relative_path(const Label& label);

/// Relay trace sitting next to a client trace file (<stem>.relay.trace).
std::filesystem::path relay_path_for(const std::filesystem::path& client_path);

/// Loads <root>/<level>. If <root>/<level>/manifest.txt exists it lists
/// "<label><TAB><relative path>" per line; otherwise the monitored/ and
/// unmonitored/ directories are scanned. Samples come back sorted by label.
/// Throws DataError for missing directories or unreadable files.
Dataset load_dataset(const std::filesystem::path& root, std::string_view level,
                     const DatasetOptions& options = {});

/// Writes client and relay trace files in the layout load_dataset reads.
void save_dataset(const Dataset& dataset, const std::filesystem::path& root, std::string_view level);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace padwerk
