#include "test_support.hpp"

#include <atomic>
#include <unistd.h>

#include "padwerk/evolver.hpp"

namespace padwerk::testing {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& prefix) {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            (prefix + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

Trace make_trace(std::initializer_list<std::pair<std::int64_t, CellKind>> events, Endpoint endpoint) {
    Trace t;
    t.endpoint = endpoint;
    for (const auto& [time, kind] : events) t.events.push_back({time, kind});
    return t;
}

Trace random_client_trace(Rng& rng, std::size_t cells, std::int64_t max_gap_ns) {
    Trace t;
    std::int64_t now = 0;
    for (std::size_t i = 0; i < cells; ++i) {
        if (i > 0) now += static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(max_gap_ns) + 1));
        const CellKind kind = rng.bernoulli(0.3) ? CellKind::nonpadding_sent : CellKind::nonpadding_received;
        t.events.push_back({now, kind});
    }
    return t;
}

Sample random_sample(Rng& rng, std::size_t cells, const Label& label) {
    Sample s;
    s.label = label;
    s.client = random_client_trace(rng, cells);
    s.client.label = label;
    s.relay = derive_relay_trace(s.client, kDefaultOneWayDelayNs);
    return s;
}

MachinePair random_pair(Rng& rng, PaddingBudget budget) {
    MachinePair pair;
    pair.client = random_machine(Endpoint::client, budget, rng);
    pair.relay = random_machine(Endpoint::relay, budget, rng);
    return pair;
}

Trace strip_padding(const Trace& trace) {
    Trace out = trace;
    std::erase_if(out.events, [](const CellEvent& e) { return is_padding(e.kind); });
    return out;
}

}  // namespace padwerk::testing
