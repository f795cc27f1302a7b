#include "padwerk/machine_format.hpp"

#include <array>
#include <charconv>
#include <optional>
#include <sstream>
#include <vector>

#include "padwerk/error.hpp"

namespace padwerk {

namespace {

std::string format_real(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

std::string format_dist(const DistSpec& d) {
    if (d.family == DistFamily::none && d == DistSpec{}) return "none";
    std::string out{to_string(d.family)};
    out += ' ' + format_real(d.param1) + ' ' + format_real(d.param2);
    out += " shift=" + std::to_string(d.added_shift_usec);
    out += " cap=" + std::to_string(d.cap_usec);
    return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        if (j > i) tokens.push_back(line.substr(i, j - i));
        i = j;
    }
    return tokens;
}

template <typename T>
T parse_number(std::string_view s, std::size_t line, const char* what) {
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError(std::string("invalid ") + what + " '" + std::string(s) + "'", line);
    }
    return v;
}

std::string_view key_value(std::string_view token, std::string_view key, std::size_t line) {
    if (token.size() <= key.size() || token.substr(0, key.size()) != key || token[key.size()] != '=') {
        throw ParseError("expected " + std::string(key) + "=<value>, got '" + std::string(token) + "'", line);
    }
    return token.substr(key.size() + 1);
}

DistSpec parse_dist(const std::vector<std::string_view>& tok, std::size_t line) {
    if (tok.size() < 2) throw ParseError("missing distribution", line);
    auto family = parse_family(tok[1]);
    if (!family) throw ParseError("invalid distribution family '" + std::string(tok[1]) + "'", line);
    DistSpec d;
    d.family = *family;
    if (tok.size() == 2 && *family == DistFamily::none) return d;
    if (tok.size() < 4 || tok.size() > 6) {
        throw ParseError("expected <family> <param1> <param2> [shift=<n>] [cap=<n>]", line);
    }
    d.param1 = parse_number<double>(tok[2], line, "parameter");
    d.param2 = parse_number<double>(tok[3], line, "parameter");
    bool seen_shift = false;
    bool seen_cap = false;
    for (std::size_t i = 4; i < tok.size(); ++i) {
        if (!seen_shift && tok[i].starts_with("shift=")) {
            d.added_shift_usec = parse_number<std::uint64_t>(key_value(tok[i], "shift", line), line, "shift");
            seen_shift = true;
        } else if (!seen_cap && tok[i].starts_with("cap=")) {
            d.cap_usec = parse_number<std::uint64_t>(key_value(tok[i], "cap", line), line, "cap");
            seen_cap = true;
        } else {
            throw ParseError("unexpected '" + std::string(tok[i]) + "' after distribution parameters", line);
        }
    }
    return d;
}

}  // namespace

std::string serialize_machine_spec(const MachinePair& pair) {
    std::ostringstream out;
    out << kMachineFormatHeader << '\n';
    for (const MachineSpec* m : {&pair.client, &pair.relay}) {
        out << "machine " << to_string(m->role) << '\n';
        out << "start " << m->start_state << '\n';
        out << "budget allowed=" << m->budget.allowed_padding_count
            << " percent=" << m->budget.max_padding_percent << '\n';
        for (std::size_t i = 0; i < m->states.size(); ++i) {
            const StateSpec& s = m->states[i];
            out << "state " << i << ":\n";
            out << "  iat " << format_dist(s.iat) << '\n';
            out << "  length " << format_dist(s.length) << '\n';
            if (s.max_length) out << "  max_length " << *s.max_length << '\n';
            out << "  transitions";
            bool any = false;
            for (Event e : kAllEvents) {
                if (auto t = s.next_state(e)) {
                    out << ' ' << to_string(e) << "->" << *t;
                    any = true;
                }
            }
            if (!any) out << " -";
            out << '\n';
        }
    }
    return out.str();
}

MachinePair parse_machine_spec(std::string_view text) {
    std::vector<MachineSpec> machines;
    std::vector<bool> seen_role(2, false);
    bool header_seen = false;
    StateSpec* state = nullptr;

    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        auto tok = split_ws(line);
        if (tok.empty() || tok[0].front() == '#') continue;

        if (!header_seen) {
            if (tok.size() != 1 || tok[0] != kMachineFormatHeader) {
                throw ParseError("unknown format version '" + std::string(line) + "', expected " +
                                     std::string(kMachineFormatHeader),
                                 line_no);
            }
            header_seen = true;
            continue;
        }

        const std::string_view key = tok[0];
        if (key == "machine") {
            if (tok.size() != 2 || (tok[1] != "client" && tok[1] != "relay")) {
                throw ParseError("expected 'machine client' or 'machine relay'", line_no);
            }
            const Endpoint role = tok[1] == "client" ? Endpoint::client : Endpoint::relay;
            if (seen_role[static_cast<std::size_t>(role)]) {
                throw ParseError("duplicate " + std::string(tok[1]) + " machine", line_no);
            }
            seen_role[static_cast<std::size_t>(role)] = true;
            machines.emplace_back();
            machines.back().role = role;
            state = nullptr;
            continue;
        }
        if (machines.empty()) throw ParseError("'" + std::string(key) + "' outside a machine block", line_no);
        MachineSpec& m = machines.back();

        if (key == "start") {
            if (tok.size() != 2) throw ParseError("expected 'start <index>'", line_no);
            m.start_state = parse_number<std::size_t>(tok[1], line_no, "start state");
        } else if (key == "budget") {
            if (tok.size() != 3) throw ParseError("expected 'budget allowed=<n> percent=<p>'", line_no);
            m.budget.allowed_padding_count =
                parse_number<std::uint64_t>(key_value(tok[1], "allowed", line_no), line_no, "budget");
            m.budget.max_padding_percent =
                parse_number<std::uint32_t>(key_value(tok[2], "percent", line_no), line_no, "percent");
        } else if (key == "state") {
            if (tok.size() != 2 || tok[1].back() != ':') throw ParseError("expected 'state <index>:'", line_no);
            const auto idx = parse_number<std::size_t>(tok[1].substr(0, tok[1].size() - 1), line_no, "state index");
            if (idx != m.states.size()) {
                throw ParseError("state " + std::to_string(idx) + " out of order, expected " +
                                     std::to_string(m.states.size()),
                                 line_no);
            }
            if (m.states.size() == kMaxStates) throw ParseError("more than 4 states", line_no);
            m.states.emplace_back();
            state = &m.states.back();
        } else if (key == "iat" || key == "length" || key == "max_length" || key == "transitions") {
            if (state == nullptr) throw ParseError("'" + std::string(key) + "' outside a state block", line_no);
            if (key == "iat") {
                state->iat = parse_dist(tok, line_no);
            } else if (key == "length") {
                state->length = parse_dist(tok, line_no);
            } else if (key == "max_length") {
                if (tok.size() != 2) throw ParseError("expected 'max_length <n>'", line_no);
                state->max_length = parse_number<std::uint64_t>(tok[1], line_no, "max_length");
            } else {
                for (std::size_t i = 1; i < tok.size(); ++i) {
                    if (tok[i] == "-") continue;
                    auto arrow = tok[i].find("->");
                    if (arrow == std::string_view::npos) {
                        throw ParseError("expected <event>-><state>, got '" + std::string(tok[i]) + "'", line_no);
                    }
                    auto event = parse_event(tok[i].substr(0, arrow));
                    if (!event) {
                        throw ParseError("unknown event '" + std::string(tok[i].substr(0, arrow)) + "'", line_no);
                    }
                    state->set_transition(*event,
                                          parse_number<std::size_t>(tok[i].substr(arrow + 2), line_no, "target"));
                }
            }
        } else {
            throw ParseError("unknown keyword '" + std::string(key) + "'", line_no);
        }
    }

    if (!header_seen) throw ParseError("empty machine spec");
    if (!seen_role[0] || !seen_role[1]) throw ParseError("spec must define both client and relay machines");

    MachinePair pair;
    for (auto& m : machines) (m.role == Endpoint::client ? pair.client : pair.relay) = std::move(m);
    validate(pair);
    return pair;
}

namespace {

std::string_view framework_dist(DistFamily f) {
    switch (f) {
        case DistFamily::none: return "CIRCPAD_DIST_NONE";
        case DistFamily::uniform: return "CIRCPAD_DIST_UNIFORM";
        case DistFamily::logistic: return "CIRCPAD_DIST_LOGISTIC";
        case DistFamily::log_logistic: return "CIRCPAD_DIST_LOG_LOGISTIC";
        case DistFamily::geometric: return "CIRCPAD_DIST_GEOMETRIC";
        case DistFamily::weibull: return "CIRCPAD_DIST_WEIBULL";
        case DistFamily::pareto: return "CIRCPAD_DIST_PARETO";
    }
    return "CIRCPAD_DIST_NONE";
}

std::string_view framework_event(Event e) {
    switch (e) {
        case Event::nonpadding_sent: return "CIRCPAD_EVENT_NONPADDING_SENT";
        case Event::nonpadding_received: return "CIRCPAD_EVENT_NONPADDING_RECV";
        case Event::padding_sent: return "CIRCPAD_EVENT_PADDING_SENT";
        case Event::padding_received: return "CIRCPAD_EVENT_PADDING_RECV";
        case Event::length_reached: return "CIRCPAD_EVENT_LENGTH_COUNT";
        case Event::delay_infinite: return "CIRCPAD_EVENT_INFINITY";
    }
    return "?";
}

void export_machine(std::ostringstream& out, const MachineSpec& m, std::string_view name) {
    const std::string role{to_string(m.role)};
    const std::string var = role + "_machine";
    out << "static void\n" << name << "_" << role << "_machine_init(void)\n{\n";
    out << "  circpad_machine_spec_t *" << var << " = tor_malloc_zero(sizeof(circpad_machine_spec_t));\n\n";
    out << "  " << var << "->name = \"" << name << "_" << role << "\";\n";
    out << "  " << var << "->is_origin_side = " << (m.role == Endpoint::client ? 1 : 0) << ";\n";
    out << "  " << var << "->target_hopnum = 2;\n";
    out << "  " << var << "->allowed_padding_count = " << m.budget.allowed_padding_count << ";\n";
    out << "  " << var << "->max_padding_percent = " << m.budget.max_padding_percent << ";\n\n";
    out << "  circpad_machine_states_init(" << var << ", " << m.states.size() << ");\n";
    if (m.start_state != 0) out << "  /* start state: " << m.start_state << " */\n";
    for (std::size_t i = 0; i < m.states.size(); ++i) {
        const StateSpec& s = m.states[i];
        const std::string st = "  " + var + "->states[" + std::to_string(i) + "].";
        out << "\n  /* state " << i << " */\n";
        out << st << "iat_dist.type = " << framework_dist(s.iat.family) << ";\n";
        if (s.iat.family != DistFamily::none) {
            out << st << "iat_dist.param1 = " << format_real(s.iat.param1) << ";\n";
            out << st << "iat_dist.param2 = " << format_real(s.iat.param2) << ";\n";
            out << st << "dist_added_shift_usec = " << s.iat.added_shift_usec << ";\n";
            out << st << "dist_max_sample_usec = " << s.iat.cap_usec << ";\n";
        }
        out << st << "length_dist.type = " << framework_dist(s.length.family) << ";\n";
        if (s.length.family != DistFamily::none) {
            out << st << "length_dist.param1 = " << format_real(s.length.param1) << ";\n";
            out << st << "length_dist.param2 = " << format_real(s.length.param2) << ";\n";
        }
        if (s.max_length) out << st << "max_length = " << *s.max_length << ";\n";
        for (Event e : kAllEvents) {
            if (auto t = s.next_state(e)) {
                out << st << "next_state[" << framework_event(e) << "] = " << *t << ";\n";
            }
        }
    }
    const char* list = m.role == Endpoint::client ? "origin_padding_machines" : "relay_padding_machines";
    out << "\n  " << var << "->machine_num = smartlist_len(" << list << ");\n";
    out << "  circpad_register_padding_machine(" << var << ", " << list << ");\n";
    out << "}\n\n";
}

}  // namespace

std::string export_framework_source(const MachinePair& pair, std::string_view name) {
    std::ostringstream out;
    out << "/* Generated by padwerk from a " << kMachineFormatHeader << " specification. */\n\n";
    export_machine(out, pair.client, name);
    export_machine(out, pair.relay, name);
    return out.str();
}

}  // namespace padwerk
