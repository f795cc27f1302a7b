#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "padwerk/distribution.hpp"
#include "padwerk/trace.hpp"

namespace padwerk {

enum class Event : std::uint8_t {
    nonpadding_sent,
    nonpadding_received,
    padding_sent,
    padding_received,
    length_reached,
    delay_infinite,
};

inline constexpr std::size_t kEventCount = 6;
inline constexpr std::array kAllEvents = {
    Event::nonpadding_sent, Event::nonpadding_received, Event::padding_sent,
    Event::padding_received, Event::length_reached,     Event::delay_infinite,
};
inline constexpr std::size_t kMaxStates = 4;

std::string_view to_string(Event e);
std::optional<Event> parse_event(std::string_view name);

/// Event a machine observes for a cell of the given kind at its own endpoint.
constexpr Event event_for(CellKind kind) {
    switch (kind) {
        case CellKind::nonpadding_sent: return Event::nonpadding_sent;
        case CellKind::nonpadding_received: return Event::nonpadding_received;
        case CellKind::padding_sent: return Event::padding_sent;
        case CellKind::padding_received: return Event::padding_received;
    }
    return Event::nonpadding_sent;
}

struct StateSpec {
    /// Delay before the next padding cell, in microseconds. none: never pads.
    DistSpec iat;
    /// Padding cells this state may send before length-reached. none: unbounded.
    DistSpec length;
    std::optional<std::uint64_t> max_length;
    /// Target state per event; an empty slot keeps the state and its timers.
    std::array<std::optional<std::size_t>, kEventCount> transitions{};

    std::optional<std::size_t> next_state(Event e) const {
        return transitions[static_cast<std::size_t>(e)];
    }
    void set_transition(Event e, std::size_t target) {
        transitions[static_cast<std::size_t>(e)] = target;
    }
    void clear_transition(Event e) { transitions[static_cast<std::size_t>(e)].reset(); }

    bool operator==(const StateSpec&) const = default;
};

/// Absolute padding allowance, then a cap on padding as a share of the
/// machine's sent cells.
struct PaddingBudget {
    std::uint64_t allowed_padding_count = 1000;
    std::uint32_t max_padding_percent = 50;

    bool operator==(const PaddingBudget&) const = default;
};

struct MachineSpec {
    std::vector<StateSpec> states;
    std::size_t start_state = 0;
    PaddingBudget budget;
    Endpoint role = Endpoint::client;

    bool operator==(const MachineSpec&) const = default;
};

/// The client-side and relay-side machines deployed together.
struct MachinePair {
    MachineSpec client;
    MachineSpec relay;

    bool operator==(const MachinePair&) const = default;
};

void validate(const PaddingBudget& budget);
void validate(const StateSpec& state, std::size_t state_count);
void validate(const MachineSpec& machine);
void validate(const MachinePair& pair);

/// A single state that never pads.
MachineSpec make_idle_machine(Endpoint role, PaddingBudget budget = {});

}  // namespace padwerk
