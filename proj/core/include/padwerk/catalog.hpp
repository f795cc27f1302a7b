#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <variant>

#include "padwerk/machine.hpp"

namespace padwerk {

/// Budget shared by both Spring endpoints.
inline constexpr PaddingBudget kSpringBudget{1500, 50};

/// Client states of Spring with non-none iat distributions: the two states
/// Interspace adds transitions between.
inline constexpr std::size_t kSpringClientMainA = 1;
inline constexpr std::size_t kSpringClientMainB = 2;

/// Fixed client/relay pair. Each machine idles in state 0 until traffic
/// starts, then alternates between two padding states. No state carries a
/// max_length, and only the start state has an iat of none.
MachinePair build_spring();

enum class RelayTactic : std::uint8_t { extend_bursts, fake_bursts };

/// Closed interval a randomized parameter is drawn from.
struct ParamRange {
    double lo = 0;
    double hi = 0;

    bool operator==(const ParamRange&) const = default;
};

/// Recipe for a probabilistically defined machine pair. Every instance is
/// Spring-based; the coins and ranges below decide the variations.
struct InterspaceTemplate {
    /// Client: add a main-state transition on received padding.
    double padding_received_transition_prob = 0.5;
    /// Client: add a main-state transition on received nonpadding.
    double nonpadding_received_transition_prob = 0.5;
    /// Relay: keep the Spring relay instead of the hand-crafted one.
    double spring_relay_prob = 0.5;
    /// Hand-crafted relay: extend real bursts rather than inject fake ones.
    double extend_bursts_prob = 0.5;

    /// Log-logistic wait before a fake burst (scale in microseconds, shape).
    ParamRange wait_scale_usec{15'000, 45'000};
    ParamRange wait_shape{1.0, 3.0};
    /// Pareto burst length in cells (scale, shape).
    ParamRange burst_length_scale{4, 12};
    ParamRange burst_length_shape{0.75, 2.25};
    /// Pareto spacing between cells of a burst (scale in microseconds, shape).
    ParamRange burst_iat_scale_usec{75, 225};
    ParamRange burst_iat_shape{1.0, 3.0};

    /// Spring client main states: log-logistic iat scales (microseconds) and
    /// the pareto length scale of the dense state.
    ParamRange client_slow_iat_scale_usec{2'000, 6'000};
    ParamRange client_dense_iat_scale_usec{150, 450};
    ParamRange client_dense_length_scale{10, 30};

    PaddingBudget budget = kSpringBudget;

    bool operator==(const InterspaceTemplate&) const = default;
};

void validate(const InterspaceTemplate& tmpl);

/// Outcome of every random choice behind one Interspace instance.
struct InterspaceChoices {
    bool padding_received_transition = false;
    bool nonpadding_received_transition = false;
    bool spring_relay = false;
    RelayTactic tactic = RelayTactic::extend_bursts;
    double wait_scale_usec = 0;
    double wait_shape = 0;
    double burst_length_scale = 0;
    double burst_length_shape = 0;
    double burst_iat_scale_usec = 0;
    double burst_iat_shape = 0;
    double client_slow_iat_scale_usec = 0;
    double client_dense_iat_scale_usec = 0;
    double client_dense_length_scale = 0;
    PaddingBudget budget = kSpringBudget;
};

InterspaceChoices draw_interspace_choices(const InterspaceTemplate& tmpl, std::uint64_t seed);

MachinePair build_interspace(const InterspaceChoices& choices);

/// Pure function of (tmpl, seed).
MachinePair instantiate_interspace(const InterspaceTemplate& tmpl, std::uint64_t seed);

/// Pair of idle machines: simulation leaves traces untouched.
MachinePair build_undefended();

/// Where the machines for a simulation come from: one fixed pair, or a fresh
/// Interspace instance per simulated trace.
class MachineSource {
public:
    static MachineSource fixed(MachinePair pair);
    static MachineSource interspace(InterspaceTemplate tmpl = {});

    MachinePair draw(std::uint64_t seed) const;
    bool probabilistic() const { return std::holds_alternative<InterspaceTemplate>(source_); }

    /// Same source with `budget` forced onto both endpoints.
    MachineSource with_budget(PaddingBudget budget) const;

private:
    explicit MachineSource(std::variant<MachinePair, InterspaceTemplate> source)
        : source_{std::move(source)} {}

    std::variant<MachinePair, InterspaceTemplate> source_;
    std::optional<PaddingBudget> budget_override_;
};

}  // namespace padwerk
