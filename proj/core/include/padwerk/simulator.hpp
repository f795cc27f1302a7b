#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "padwerk/catalog.hpp"
#include "padwerk/dataset.hpp"
#include "padwerk/machine.hpp"
#include "padwerk/trace.hpp"

namespace padwerk {

/// Budget rule: padding is free below the absolute allowance; past it the
/// post-emission share (padding + 1) / (total + 1) must not exceed the
/// percentage. `total_so_far` counts the cells the machine has sent,
/// padding included.
bool check_budget(const PaddingBudget& budget, std::uint64_t padding_so_far, std::uint64_t total_so_far);

struct SimulationOptions {
    /// Client <-> relay latency for padding cells in flight.
    std::int64_t one_way_delay_ns = kDefaultOneWayDelayNs;
    /// Machines keep running this long after the last input cell.
    std::int64_t tail_ns = 1'000'000'000;
    /// Hard stop on padding cells per simulation (both machines together).
    std::uint64_t max_padding_cells = 200'000;
};

/// Client view after simulation, with per-kind tallies.
struct DefendedTrace {
    Trace trace;
    std::uint64_t padding_sent = 0;
    std::uint64_t padding_received = 0;
    std::uint64_t nonpadding_sent = 0;
    std::uint64_t nonpadding_received = 0;

    std::uint64_t total_cells() const {
        return padding_sent + padding_received + nonpadding_sent + nonpadding_received;
    }
    bool operator==(const DefendedTrace&) const = default;
};

DefendedTrace tally(Trace trace);

/// One padding cell a machine emitted, with its budget counters right after
/// the emission.
struct PaddingEmission {
    Endpoint endpoint = Endpoint::client;
    std::int64_t time_ns = 0;
    std::uint64_t padding_after = 0;
    std::uint64_t total_after = 0;
};

/// Optional instrumentation filled in by simulate().
struct SimulationAudit {
    std::vector<PaddingEmission> emissions;
};

/// Runs the client and relay machines of `pair` against the two input views.
/// Deterministic given (pair, traces, seed, options). Padding that the budget
/// forbids is silently dropped.
DefendedTrace simulate(const MachinePair& pair, const Trace& client, const Trace& relay, std::uint64_t seed,
                       const SimulationOptions& options = {}, SimulationAudit* audit = nullptr);

struct DefendedSample {
    Label label;
    std::size_t copy = 0;
    DefendedTrace defended;
};

/// Seed used for copy `copy` of the sample labelled `label`.
std::uint64_t copy_seed(std::uint64_t seed, const Label& label, std::size_t copy);

/// Simulates every sample `factor` times. Output order is sample order, then
/// copy index; copies keep the original label.
std::vector<DefendedSample> simulate_dataset(const MachineSource& source, const Dataset& dataset,
                                             std::uint64_t seed, std::size_t factor = 1,
                                             const SimulationOptions& options = {});

/// Bandwidth relative to nonpadding traffic; 100 means no overhead.
struct OverheadReport {
    double total_bw_percent = 100;
    /// Absent when the direction carried no nonpadding cells.
    std::optional<double> sent_bw_percent;
    std::optional<double> recv_bw_percent;
    double sent_share_percent = 0;
    double recv_share_percent = 0;
};

/// Throws ValidationError when the trace has no nonpadding cells.
OverheadReport overhead(const DefendedTrace& defended);

/// Aggregate over a dataset: counters are summed before the ratios are taken.
OverheadReport overhead(std::span<const DefendedSample> samples);

/// "metric value" lines.
std::string format_overhead_text(const OverheadReport& report);
/// Header plus one comma-separated row.
std::string format_overhead_csv(const OverheadReport& report);

}  // namespace padwerk
