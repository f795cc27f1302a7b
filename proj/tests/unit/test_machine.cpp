#include <gtest/gtest.h>

#include "padwerk/catalog.hpp"
#include "padwerk/error.hpp"
#include "padwerk/evolver.hpp"
#include "padwerk/machine.hpp"
#include "padwerk/machine_format.hpp"
#include "test_support.hpp"

using namespace padwerk;

namespace {

std::size_t count_of(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

const char* kMinimal =
    "padmachine/1\n"
    "machine client\n"
    "start 0\n"
    "budget allowed=10 percent=20\n"
    "state 0:\n"
    "  iat uniform 10 10\n"
    "  length uniform 2 2 shift=0 cap=50\n"
    "  transitions -\n"
    "machine relay\n"
    "start 0\n"
    "budget allowed=10 percent=20\n"
    "state 0:\n"
    "  iat none\n"
    "  length none\n"
    "  transitions nonpadding_received->0\n";

}  // namespace

TEST(Machine, ValidationRules) {
    MachineSpec m = make_idle_machine(Endpoint::client);
    EXPECT_NO_THROW(validate(m));
    m.start_state = 1;
    EXPECT_THROW(validate(m), ValidationError);
    m.start_state = 0;
    m.states.resize(5);
    EXPECT_THROW(validate(m), ValidationError);
    m.states.clear();
    EXPECT_THROW(validate(m), ValidationError);
    m.states.resize(2);
    m.states[1].set_transition(Event::padding_sent, 2);
    EXPECT_THROW(validate(m), ValidationError);
    m.states[1].set_transition(Event::padding_sent, 1);
    EXPECT_NO_THROW(validate(m));
    m.budget.max_padding_percent = 101;
    EXPECT_THROW(validate(m), ValidationError);

    MachinePair pair{make_idle_machine(Endpoint::relay), make_idle_machine(Endpoint::relay)};
    EXPECT_THROW(validate(pair), ValidationError);
}

TEST(Machine, EventNamesAndCellMapping) {
    for (Event e : kAllEvents) EXPECT_EQ(parse_event(to_string(e)), e);
    EXPECT_EQ(event_for(CellKind::padding_received), Event::padding_received);
    EXPECT_EQ(event_for(CellKind::nonpadding_sent), Event::nonpadding_sent);
}

TEST(MachineFormat, SpringRoundTrip) {
    const MachinePair spring = build_spring();
    EXPECT_EQ(parse_machine_spec(serialize_machine_spec(spring)), spring);
}

TEST(MachineFormat, RandomPairsRoundTrip) {
    Rng rng{21};
    for (int i = 0; i < 300; ++i) {
        MachinePair p = padwerk::testing::random_pair(rng);
        if (i % 3 == 0) p.client.states[0].max_length = rng.below(100);
        EXPECT_EQ(parse_machine_spec(serialize_machine_spec(p)), p);
    }
}

TEST(MachineFormat, ParsesHandWrittenSpecWithOptionalFields) {
    const MachinePair p = parse_machine_spec(kMinimal);
    EXPECT_EQ(p.client.budget, (PaddingBudget{10, 20}));
    EXPECT_EQ(p.client.states[0].iat.family, DistFamily::uniform);
    EXPECT_EQ(p.client.states[0].iat.cap_usec, kDefaultCapUsec);
    EXPECT_EQ(p.client.states[0].length.cap_usec, 50u);
    EXPECT_EQ(p.relay.states[0].next_state(Event::nonpadding_received), 0u);
}

TEST(MachineFormat, Errors) {
    std::string text = kMinimal;
    auto replaced = [&](const std::string& from, const std::string& to) {
        std::string t = text;
        t.replace(t.find(from), from.size(), to);
        return t;
    };
    EXPECT_THROW(parse_machine_spec(replaced("padmachine/1", "padmachine/2")), ParseError);
    EXPECT_THROW(parse_machine_spec(replaced("nonpadding_received->0", "nonpadding_received->7")), ValidationError);
    EXPECT_THROW(parse_machine_spec(replaced("uniform 10 10", "pareto 10 -1")), ValidationError);
    EXPECT_THROW(parse_machine_spec(replaced("uniform 10 10", "gaussian 10 1")), ParseError);
    EXPECT_THROW(parse_machine_spec(replaced("uniform 10 10", "uniform 10")), ParseError);
    EXPECT_THROW(parse_machine_spec(replaced("  transitions -", "  transitions bogus->0")), ParseError);
    try {
        parse_machine_spec(replaced("budget allowed=10 percent=20\nstate", "budget allowed=x percent=20\nstate"));
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 4u);
    }
}

TEST(Export, SpringCarriesBudgetTwiceAndIsStable) {
    const std::string a = export_framework_source(build_spring());
    const std::string b = export_framework_source(build_spring());
    EXPECT_EQ(a, b);
    EXPECT_EQ(count_of(a, "allowed_padding_count = 1500"), 2u);
    EXPECT_NE(a.find("max_padding_percent = 50"), std::string::npos);
    EXPECT_NE(a.find("circpad_register_padding_machine"), std::string::npos);
}

TEST(Export, SingleStateSkeleton) {
    MachinePair p{make_idle_machine(Endpoint::client), make_idle_machine(Endpoint::relay)};
    const std::string src = export_framework_source(p, "idle");
    EXPECT_EQ(count_of(src, "circpad_machine_states_init(client_machine, 1)"), 1u);
    EXPECT_EQ(count_of(src, "circpad_machine_states_init(relay_machine, 1)"), 1u);
    EXPECT_EQ(count_of(src, "next_state["), 0u);
}
