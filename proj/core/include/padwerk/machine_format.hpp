#pragma once

#include <string>
#include <string_view>

#include "padwerk/machine.hpp"

namespace padwerk {

inline constexpr std::string_view kMachineFormatHeader = "padmachine/1";

/// Versioned text form of a machine pair:
///
///     padmachine/1
///     machine client
///     start 0
///     budget allowed=1500 percent=50
///     state 0:
///       iat log_logistic 4000 1.5 shift=0 cap=10000000
///       length pareto 20 1.2 shift=0 cap=10000000
///       max_length 100
///       transitions padding_received->1 length_reached->0
///     machine relay
///     ...
///
/// Reals are written in shortest round-trip form, so parse(serialize(p)) == p.
/// When reading, shift= and cap= may be omitted (0 and ten seconds).
std::string serialize_machine_spec(const MachinePair& pair);

/// Throws ParseError for syntax problems and ValidationError for invariant
/// violations (bad parameters, dangling transition targets).
MachinePair parse_machine_spec(std::string_view text);

/// Renders both machines as C source shaped like a circuit-padding framework
/// machine definition. Output is deterministic for a given pair.
std::string export_framework_source(const MachinePair& pair, std::string_view name = "padwerk");

}  // namespace padwerk
