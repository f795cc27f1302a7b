#include "padwerk/machine.hpp"

#include <string>

#include "padwerk/error.hpp"

namespace padwerk {

std::string_view to_string(Event e) {
    switch (e) {
        case Event::nonpadding_sent: return "nonpadding_sent";
        case Event::nonpadding_received: return "nonpadding_received";
        case Event::padding_sent: return "padding_sent";
        case Event::padding_received: return "padding_received";
        case Event::length_reached: return "length_reached";
        case Event::delay_infinite: return "delay_infinite";
    }
    return "?";
}

std::optional<Event> parse_event(std::string_view name) {
    for (Event e : kAllEvents) {
        if (to_string(e) == name) return e;
    }
    return std::nullopt;
}

void validate(const PaddingBudget& budget) {
    if (budget.max_padding_percent > 100) {
        throw ValidationError("max_padding_percent must be in [0, 100], got " +
                              std::to_string(budget.max_padding_percent));
    }
}

void validate(const StateSpec& state, std::size_t state_count) {
    validate(state.iat);
    validate(state.length);
    for (Event e : kAllEvents) {
        auto target = state.next_state(e);
        if (target && *target >= state_count) {
            throw ValidationError("transition on " + std::string(to_string(e)) + " targets state " +
                                  std::to_string(*target) + " of a " + std::to_string(state_count) +
                                  "-state machine");
        }
    }
}

void validate(const MachineSpec& m) {
    if (m.states.empty() || m.states.size() > kMaxStates) {
        throw ValidationError("a machine has 1 to 4 states, got " + std::to_string(m.states.size()));
    }
    if (m.start_state >= m.states.size()) {
        throw ValidationError("start state " + std::to_string(m.start_state) + " out of range");
    }
    validate(m.budget);
    for (std::size_t i = 0; i < m.states.size(); ++i) {
        try {
            validate(m.states[i], m.states.size());
        } catch (const ValidationError& e) {
            throw ValidationError(std::string(to_string(m.role)) + " state " + std::to_string(i) + ": " +
                                  e.what());
        }
    }
}

void validate(const MachinePair& pair) {
    if (pair.client.role != Endpoint::client) throw ValidationError("client machine has relay role");
    if (pair.relay.role != Endpoint::relay) throw ValidationError("relay machine has client role");
    validate(pair.client);
    validate(pair.relay);
}

MachineSpec make_idle_machine(Endpoint role, PaddingBudget budget) {
    MachineSpec m;
    m.states.resize(1);
    m.budget = budget;
    m.role = role;
    return m;
}

}  // namespace padwerk
