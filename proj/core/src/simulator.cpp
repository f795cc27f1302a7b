#include "padwerk/simulator.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>

#include "padwerk/error.hpp"
#include "padwerk/parallel.hpp"
#include "padwerk/random.hpp"

namespace padwerk {

bool check_budget(const PaddingBudget& budget, std::uint64_t padding_so_far, std::uint64_t total_so_far) {
    if (padding_so_far < budget.allowed_padding_count) return true;
    // (padding + 1) / (total + 1) <= percent / 100, in integers.
    return (padding_so_far + 1) * 100 <=
           static_cast<std::uint64_t>(budget.max_padding_percent) * (total_so_far + 1);
}

namespace {

// Upper bound on events handled synchronously at one instant, guarding
// against machines that bounce between states without ever waiting.
constexpr int kMaxChainedEvents = 64;

constexpr bool is_cell_event(Event e) {
    return e == Event::nonpadding_sent || e == Event::nonpadding_received || e == Event::padding_sent ||
           e == Event::padding_received;
}

/// Live instance of one MachineSpec inside a simulation.
class MachineRuntime {
public:
    using ArmTimer = std::function<void(std::int64_t when, std::uint64_t generation)>;

    MachineRuntime(const MachineSpec& spec, std::uint64_t seed, ArmTimer arm)
        : spec_{spec}, seed_{seed}, arm_{std::move(arm)}, rng_{seed} {}

    void activate(std::int64_t now) { dispatch(enter(spec_.start_state, now), now); }

    /// A cell observed at this endpoint (real traffic or the peer's padding).
    void on_cell(Event e, std::int64_t now) {
        if (e == Event::nonpadding_sent) ++nonpadding_sent_;
        dispatch(e, now);
    }

    /// Timer expiry. Returns true when a padding cell goes out.
    bool on_timer(std::uint64_t generation) {
        if (!timer_pending_ || generation != timer_generation_) return false;
        timer_pending_ = false;
        if (!can_pad()) return false;
        if (!check_budget(spec_.budget, padding_sent_, padding_sent_ + nonpadding_sent_)) return false;
        ++padding_sent_;
        if (remaining_) --*remaining_;
        return true;
    }

    void after_padding_sent(std::int64_t now) {
        const std::uint64_t entries_before = entries_;
        const bool exhausted = remaining_ && *remaining_ == 0;
        dispatch(Event::padding_sent, now);
        if (exhausted && entries_ == entries_before) dispatch(Event::length_reached, now);
    }

    std::uint64_t padding_sent() const { return padding_sent_; }
    std::uint64_t total_sent() const { return padding_sent_ + nonpadding_sent_; }

private:
    const StateSpec& current() const { return spec_.states[state_]; }

    bool can_pad() const {
        return current().iat.family != DistFamily::none && (!remaining_ || *remaining_ > 0);
    }

    void dispatch(std::optional<Event> event, std::int64_t now) {
        for (int steps = 0; event && steps < kMaxChainedEvents; ++steps) {
            const Event e = *event;
            event.reset();
            if (auto target = current().next_state(e)) {
                event = enter(*target, now);
            } else if (is_cell_event(e) && !timer_pending_ && can_pad()) {
                event = schedule(now);
            }
        }
    }

    // Entering (or re-entering) a state cancels the pending timer and draws
    // the state's length and first delay from a fresh per-visit stream.
    std::optional<Event> enter(std::size_t target, std::int64_t now) {
        state_ = target;
        timer_pending_ = false;
        ++timer_generation_;
        rng_ = Rng{derive_seed(seed_, {entries_++})};
        const StateSpec& s = current();
        if (s.length.family == DistFamily::none) {
            remaining_.reset();
        } else {
            remaining_ = sample_distribution(s.length, SamplePurpose::length, rng_, s.max_length).value;
            if (*remaining_ == 0) return Event::length_reached;
        }
        return schedule(now);
    }

    std::optional<Event> schedule(std::int64_t now) {
        const StateSpec& s = current();
        if (s.iat.family == DistFamily::none) return std::nullopt;
        const DistSample delay = sample_distribution(s.iat, SamplePurpose::delay, rng_);
        if (delay.infinite) return Event::delay_infinite;
        timer_pending_ = true;
        ++timer_generation_;
        arm_(now + static_cast<std::int64_t>(delay.value) * 1000, timer_generation_);
        return std::nullopt;
    }

    const MachineSpec& spec_;
    std::uint64_t seed_;
    ArmTimer arm_;
    Rng rng_;
    std::size_t state_ = 0;
    std::uint64_t entries_ = 0;
    std::optional<std::uint64_t> remaining_;
    bool timer_pending_ = false;
    std::uint64_t timer_generation_ = 0;
    std::uint64_t padding_sent_ = 0;
    std::uint64_t nonpadding_sent_ = 0;
};

enum class Action : std::uint8_t {
    client_input,
    relay_input,
    arrival_at_client,
    arrival_at_relay,
    client_timer,
    relay_timer,
};

struct Scheduled {
    std::int64_t time = 0;
    int priority = 0;  // cells before timers at equal times
    std::uint64_t seq = 0;
    Action action = Action::client_input;
    std::uint64_t payload = 0;  // input index or timer generation

    bool operator>(const Scheduled& o) const {
        if (time != o.time) return time > o.time;
        if (priority != o.priority) return priority > o.priority;
        return seq > o.seq;
    }
};

constexpr int kCellPriority = 0;
constexpr int kTimerPriority = 1;

}  // namespace

DefendedTrace tally(Trace trace) {
    DefendedTrace d;
    for (const auto& e : trace.events) {
        switch (e.kind) {
            case CellKind::nonpadding_sent: ++d.nonpadding_sent; break;
            case CellKind::nonpadding_received: ++d.nonpadding_received; break;
            case CellKind::padding_sent: ++d.padding_sent; break;
            case CellKind::padding_received: ++d.padding_received; break;
        }
    }
    d.trace = std::move(trace);
    return d;
}

DefendedTrace simulate(const MachinePair& pair, const Trace& client, const Trace& relay, std::uint64_t seed,
                       const SimulationOptions& options, SimulationAudit* audit) {
    Trace out;
    out.endpoint = Endpoint::client;
    out.label = client.label;
    if (client.events.empty() && relay.events.empty()) return tally(std::move(out));
    out.events.reserve(client.events.size() * 2);

    std::priority_queue<Scheduled, std::vector<Scheduled>, std::greater<>> queue;
    std::uint64_t seq = 0;
    auto push = [&](std::int64_t t, int prio, Action a, std::uint64_t payload) {
        queue.push({t, prio, seq++, a, payload});
    };

    std::int64_t start = std::numeric_limits<std::int64_t>::max();
    std::int64_t last_input = 0;
    for (std::size_t i = 0; i < client.events.size(); ++i) {
        push(client.events[i].time_ns, kCellPriority, Action::client_input, i);
    }
    for (std::size_t i = 0; i < relay.events.size(); ++i) {
        push(relay.events[i].time_ns, kCellPriority, Action::relay_input, i);
    }
    for (const Trace* t : {&client, &relay}) {
        if (t->events.empty()) continue;
        start = std::min(start, t->events.front().time_ns);
        last_input = std::max(last_input, t->events.back().time_ns);
    }
    const std::int64_t horizon = last_input + options.tail_ns;

    auto arm_for = [&](Action action) {
        return [&push, &horizon, action](std::int64_t when, std::uint64_t generation) {
            if (when <= horizon) push(when, kTimerPriority, action, generation);
        };
    };
    MachineRuntime client_rt{pair.client, derive_seed(seed, {0}), arm_for(Action::client_timer)};
    MachineRuntime relay_rt{pair.relay, derive_seed(seed, {1}), arm_for(Action::relay_timer)};
    client_rt.activate(start);
    relay_rt.activate(start);

    std::uint64_t padding_emitted = 0;
    auto record = [&](Endpoint who, std::int64_t t, const MachineRuntime& rt) {
        ++padding_emitted;
        if (audit) audit->emissions.push_back({who, t, rt.padding_sent(), rt.total_sent()});
    };

    while (!queue.empty()) {
        const Scheduled item = queue.top();
        queue.pop();
        const std::int64_t now = item.time;
        switch (item.action) {
            case Action::client_input: {
                const CellEvent& e = client.events[item.payload];
                out.events.push_back(e);
                client_rt.on_cell(event_for(e.kind), now);
                break;
            }
            case Action::relay_input:
                relay_rt.on_cell(event_for(relay.events[item.payload].kind), now);
                break;
            case Action::arrival_at_client:
                out.events.push_back({now, CellKind::padding_received});
                client_rt.on_cell(Event::padding_received, now);
                break;
            case Action::arrival_at_relay:
                relay_rt.on_cell(Event::padding_received, now);
                break;
            case Action::client_timer:
                if (padding_emitted < options.max_padding_cells && client_rt.on_timer(item.payload)) {
                    record(Endpoint::client, now, client_rt);
                    out.events.push_back({now, CellKind::padding_sent});
                    push(now + options.one_way_delay_ns, kCellPriority, Action::arrival_at_relay, 0);
                    client_rt.after_padding_sent(now);
                }
                break;
            case Action::relay_timer:
                if (padding_emitted < options.max_padding_cells && relay_rt.on_timer(item.payload)) {
                    record(Endpoint::relay, now, relay_rt);
                    push(now + options.one_way_delay_ns, kCellPriority, Action::arrival_at_client, 0);
                    relay_rt.after_padding_sent(now);
                }
                break;
        }
    }
    return tally(std::move(out));
}

std::uint64_t copy_seed(std::uint64_t seed, const Label& label, std::size_t copy) {
    return derive_seed(seed, {label.key(), static_cast<std::uint64_t>(copy)});
}

std::vector<DefendedSample> simulate_dataset(const MachineSource& source, const Dataset& dataset,
                                             std::uint64_t seed, std::size_t factor,
                                             const SimulationOptions& options) {
    if (factor < 1) throw ValidationError("simulation factor must be at least 1");
    std::vector<DefendedSample> out(dataset.size() * factor);
    parallel_for(out.size(), [&](std::size_t i) {
        const Sample& s = dataset.samples[i / factor];
        const std::size_t copy = i % factor;
        const std::uint64_t run_seed = copy_seed(seed, s.label, copy);
        const MachinePair pair = source.draw(derive_seed(run_seed, {0x6d616368}));
        out[i] = DefendedSample{s.label, copy, simulate(pair, s.client, s.relay, run_seed, options)};
    });
    return out;
}

namespace {

OverheadReport overhead_from_counts(std::uint64_t ps, std::uint64_t pr, std::uint64_t nps, std::uint64_t npr) {
    const std::uint64_t nonpadding = nps + npr;
    if (nonpadding == 0) throw ValidationError("overhead undefined without nonpadding cells");
    const double sent = static_cast<double>(ps + nps);
    const double recv = static_cast<double>(pr + npr);
    const double all = sent + recv;
    OverheadReport r;
    r.total_bw_percent = 100.0 * all / static_cast<double>(nonpadding);
    if (nps > 0) r.sent_bw_percent = 100.0 * sent / static_cast<double>(nps);
    if (npr > 0) r.recv_bw_percent = 100.0 * recv / static_cast<double>(npr);
    r.sent_share_percent = 100.0 * sent / all;
    r.recv_share_percent = 100.0 * recv / all;
    return r;
}

std::string fmt(double v) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(2);
    s << v;
    return s.str();
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : "NA"; }

}  // namespace

OverheadReport overhead(const DefendedTrace& d) {
    return overhead_from_counts(d.padding_sent, d.padding_received, d.nonpadding_sent, d.nonpadding_received);
}

OverheadReport overhead(std::span<const DefendedSample> samples) {
    std::uint64_t ps = 0, pr = 0, nps = 0, npr = 0;
    for (const auto& s : samples) {
        ps += s.defended.padding_sent;
        pr += s.defended.padding_received;
        nps += s.defended.nonpadding_sent;
        npr += s.defended.nonpadding_received;
    }
    return overhead_from_counts(ps, pr, nps, npr);
}

std::string format_overhead_text(const OverheadReport& r) {
    std::string out;
    out += "total_bw_percent " + fmt(r.total_bw_percent) + "\n";
    out += "sent_bw_percent " + fmt(r.sent_bw_percent) + "\n";
    out += "recv_bw_percent " + fmt(r.recv_bw_percent) + "\n";
    out += "sent_share_percent " + fmt(r.sent_share_percent) + "\n";
    out += "recv_share_percent " + fmt(r.recv_share_percent) + "\n";
    return out;
}

std::string format_overhead_csv(const OverheadReport& r) {
    return "total_bw_percent,sent_bw_percent,recv_bw_percent,sent_share_percent,recv_share_percent\n" +
           fmt(r.total_bw_percent) + "," + fmt(r.sent_bw_percent) + "," + fmt(r.recv_bw_percent) + "," +
           fmt(r.sent_share_percent) + "," + fmt(r.recv_share_percent) + "\n";
}

}  // namespace padwerk
