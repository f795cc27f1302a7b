#include "padwerk/catalog.hpp"

#include <cmath>
#include <string>

#include "padwerk/error.hpp"
#include "padwerk/random.hpp"

namespace padwerk {

namespace {

DistSpec dist(DistFamily family, double p1, double p2, std::uint64_t shift = 0) {
    DistSpec d;
    d.family = family;
    d.param1 = p1;
    d.param2 = p2;
    d.added_shift_usec = shift;
    return d;
}

constexpr double kSpringSlowIatScale = 4'000;
constexpr double kSpringDenseIatScale = 300;
constexpr double kSpringDenseLengthScale = 20;

MachineSpec spring_client(double slow_iat_scale = kSpringSlowIatScale, double dense_iat_scale = kSpringDenseIatScale,
                          double dense_length_scale = kSpringDenseLengthScale) {
    MachineSpec m;
    m.role = Endpoint::client;
    m.budget = kSpringBudget;
    m.states.resize(3);

    StateSpec& start = m.states[0];
    start.set_transition(Event::nonpadding_sent, kSpringClientMainA);

    // Slow trickle of outgoing padding between requests.
    StateSpec& a = m.states[kSpringClientMainA];
    a.iat = dist(DistFamily::log_logistic, slow_iat_scale, 2.0);
    a.length = dist(DistFamily::pareto, 6, 1.4);
    a.set_transition(Event::length_reached, kSpringClientMainB);

    // Short dense runs of outgoing padding.
    StateSpec& b = m.states[kSpringClientMainB];
    b.iat = dist(DistFamily::log_logistic, dense_iat_scale, 3.0);
    b.length = dist(DistFamily::pareto, dense_length_scale, 1.2);
    b.set_transition(Event::length_reached, kSpringClientMainA);
    b.set_transition(Event::nonpadding_sent, kSpringClientMainA);
    return m;
}

MachineSpec spring_relay() {
    MachineSpec m;
    m.role = Endpoint::relay;
    m.budget = kSpringBudget;
    m.states.resize(3);

    StateSpec& start = m.states[0];
    start.set_transition(Event::nonpadding_received, 1);

    // Burst of incoming padding toward the client.
    StateSpec& burst = m.states[1];
    burst.iat = dist(DistFamily::log_logistic, 300, 2.5);
    burst.length = dist(DistFamily::pareto, 14, 1.3);
    burst.set_transition(Event::length_reached, 2);
    burst.set_transition(Event::nonpadding_received, 1);

    // Gap between bursts; the first padding cell opens the next burst.
    StateSpec& gap = m.states[2];
    gap.iat = dist(DistFamily::log_logistic, 4'000, 1.8);
    gap.length = dist(DistFamily::uniform, 1, 1);
    gap.set_transition(Event::padding_sent, 1);
    gap.set_transition(Event::nonpadding_received, 1);
    return m;
}

MachineSpec handcrafted_relay(const InterspaceChoices& c) {
    MachineSpec m;
    m.role = Endpoint::relay;
    m.budget = c.budget;
    const DistSpec burst_iat = dist(DistFamily::pareto, c.burst_iat_scale_usec, c.burst_iat_shape);
    const DistSpec burst_length = dist(DistFamily::pareto, c.burst_length_scale, c.burst_length_shape);

    if (c.tactic == RelayTactic::extend_bursts) {
        m.states.resize(2);
        m.states[0].set_transition(Event::nonpadding_sent, 1);
        StateSpec& extend = m.states[1];
        extend.iat = burst_iat;
        extend.length = burst_length;
        // Every real cell restarts the tail, so padding trails each real burst.
        extend.set_transition(Event::nonpadding_sent, 1);
        extend.set_transition(Event::length_reached, 0);
    } else {
        m.states.resize(3);
        m.states[0].set_transition(Event::nonpadding_received, 1);
        StateSpec& wait = m.states[1];
        wait.iat = dist(DistFamily::log_logistic, c.wait_scale_usec, c.wait_shape);
        wait.set_transition(Event::padding_sent, 2);
        StateSpec& fake = m.states[2];
        fake.iat = burst_iat;
        fake.length = burst_length;
        fake.set_transition(Event::length_reached, 1);
    }
    return m;
}

void check_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError(std::string(name) + " must be in [0, 1]");
}

void check_range(const ParamRange& r, const char* name) {
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo <= 0 || r.hi < r.lo) {
        throw ValidationError(std::string(name) + " must be a positive non-empty range");
    }
}

}  // namespace

MachinePair build_spring() { return {spring_client(), spring_relay()}; }

MachinePair build_undefended() {
    return {make_idle_machine(Endpoint::client), make_idle_machine(Endpoint::relay)};
}

void validate(const InterspaceTemplate& t) {
    check_probability(t.padding_received_transition_prob, "padding_received_transition_prob");
    check_probability(t.nonpadding_received_transition_prob, "nonpadding_received_transition_prob");
    check_probability(t.spring_relay_prob, "spring_relay_prob");
    check_probability(t.extend_bursts_prob, "extend_bursts_prob");
    check_range(t.wait_scale_usec, "wait_scale_usec");
    check_range(t.wait_shape, "wait_shape");
    check_range(t.burst_length_scale, "burst_length_scale");
    check_range(t.burst_length_shape, "burst_length_shape");
    check_range(t.burst_iat_scale_usec, "burst_iat_scale_usec");
    check_range(t.burst_iat_shape, "burst_iat_shape");
    check_range(t.client_slow_iat_scale_usec, "client_slow_iat_scale_usec");
    check_range(t.client_dense_iat_scale_usec, "client_dense_iat_scale_usec");
    check_range(t.client_dense_length_scale, "client_dense_length_scale");
    validate(t.budget);
}

InterspaceChoices draw_interspace_choices(const InterspaceTemplate& t, std::uint64_t seed) {
    validate(t);
    Rng rng{derive_seed(seed, {0x1a7e25ace})};
    // Every draw happens unconditionally so each choice has its own fixed
    // position in the stream.
    auto coin = [&](double p) { return rng.uniform01() < p; };
    auto pick = [&](const ParamRange& r) { return rng.uniform(r.lo, r.hi); };

    InterspaceChoices c;
    c.padding_received_transition = coin(t.padding_received_transition_prob);
    c.nonpadding_received_transition = coin(t.nonpadding_received_transition_prob);
    c.spring_relay = coin(t.spring_relay_prob);
    c.tactic = coin(t.extend_bursts_prob) ? RelayTactic::extend_bursts : RelayTactic::fake_bursts;
    c.wait_scale_usec = pick(t.wait_scale_usec);
    c.wait_shape = pick(t.wait_shape);
    c.burst_length_scale = pick(t.burst_length_scale);
    c.burst_length_shape = pick(t.burst_length_shape);
    c.burst_iat_scale_usec = pick(t.burst_iat_scale_usec);
    c.burst_iat_shape = pick(t.burst_iat_shape);
    c.client_slow_iat_scale_usec = pick(t.client_slow_iat_scale_usec);
    c.client_dense_iat_scale_usec = pick(t.client_dense_iat_scale_usec);
    c.client_dense_length_scale = pick(t.client_dense_length_scale);
    c.budget = t.budget;
    return c;
}

MachinePair build_interspace(const InterspaceChoices& c) {
    MachinePair pair;
    pair.client = spring_client(c.client_slow_iat_scale_usec, c.client_dense_iat_scale_usec, c.client_dense_length_scale);
    pair.client.budget = c.budget;
    if (c.padding_received_transition) {
        pair.client.states[kSpringClientMainA].set_transition(Event::padding_received, kSpringClientMainB);
    }
    if (c.nonpadding_received_transition) {
        pair.client.states[kSpringClientMainA].set_transition(Event::nonpadding_received, kSpringClientMainB);
    }
    if (c.spring_relay) {
        pair.relay = spring_relay();
        pair.relay.budget = c.budget;
    } else {
        pair.relay = handcrafted_relay(c);
    }
    validate(pair);
    return pair;
}

MachinePair instantiate_interspace(const InterspaceTemplate& tmpl, std::uint64_t seed) {
    return build_interspace(draw_interspace_choices(tmpl, seed));
}

MachineSource MachineSource::fixed(MachinePair pair) {
    validate(pair);
    return MachineSource{std::move(pair)};
}

MachineSource MachineSource::interspace(InterspaceTemplate tmpl) {
    validate(tmpl);
    return MachineSource{std::move(tmpl)};
}

MachinePair MachineSource::draw(std::uint64_t seed) const {
    MachinePair pair = std::holds_alternative<MachinePair>(source_)
                           ? std::get<MachinePair>(source_)
                           : instantiate_interspace(std::get<InterspaceTemplate>(source_), seed);
    if (budget_override_) {
        pair.client.budget = *budget_override_;
        pair.relay.budget = *budget_override_;
    }
    return pair;
}

MachineSource MachineSource::with_budget(PaddingBudget budget) const {
    validate(budget);
    MachineSource copy = *this;
    copy.budget_override_ = budget;
    return copy;
}

}  // namespace padwerk
