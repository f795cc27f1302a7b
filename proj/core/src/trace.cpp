#include "padwerk/trace.hpp"

#include <algorithm>
#include <charconv>
#include <optional>

#include "padwerk/error.hpp"

namespace padwerk {

std::string_view to_token(CellKind kind) {
    switch (kind) {
        case CellKind::nonpadding_sent: return "snp";
        case CellKind::nonpadding_received: return "rnp";
        case CellKind::padding_sent: return "sp";
        case CellKind::padding_received: return "rp";
    }
    return "?";
}

std::string_view to_string(Endpoint e) {
    return e == Endpoint::client ? "client" : "relay";
}

std::string_view to_string(Role r) {
    switch (r) {
        case Role::train: return "train";
        case Role::validation: return "validation";
        case Role::test: return "test";
    }
    return "?";
}

Label Label::monitored(int site, int webpage, int sample) {
    if (site < 0 || site >= kSites || webpage < 0 || webpage >= kWebpagesPerSite || sample < 0 ||
        sample >= kSamplesPerWebpage) {
        throw ValidationError("monitored label out of range: site " + std::to_string(site) +
                              ", webpage " + std::to_string(webpage) + ", sample " +
                              std::to_string(sample));
    }
    Label l;
    l.monitored_ = true;
    l.site_ = site;
    l.webpage_ = webpage;
    l.sample_ = sample;
    return l;
}

Label Label::unmonitored(int index) {
    if (index < 0 || index >= kUnmonitoredCount) {
        throw ValidationError("unmonitored index out of range: " + std::to_string(index));
    }
    Label l;
    l.index_ = index;
    return l;
}

namespace {

std::optional<int> parse_int(std::string_view s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

}  // namespace

Label Label::parse(std::string_view text) {
    auto fail = [&] { return ParseError("invalid label '" + std::string(text) + "'"); };
    if (text.size() > 1 && text.front() == 'u') {
        auto idx = parse_int(text.substr(1));
        if (!idx) throw fail();
        return unmonitored(*idx);
    }
    if (text.size() > 1 && text.front() == 's') {
        auto p = text.find("-p");
        if (p == std::string_view::npos) throw fail();
        auto dash = text.find('-', p + 2);
        if (dash == std::string_view::npos) throw fail();
        auto site = parse_int(text.substr(1, p - 1));
        auto page = parse_int(text.substr(p + 2, dash - p - 2));
        auto sample = parse_int(text.substr(dash + 1));
        if (!site || !page || !sample) throw fail();
        return monitored(*site, *page, *sample);
    }
    throw fail();
}

std::uint64_t Label::key() const {
    if (monitored_) {
        return static_cast<std::uint64_t>((site_ * kWebpagesPerSite + webpage_) * kSamplesPerWebpage +
                                          sample_);
    }
    return static_cast<std::uint64_t>(kSites * kWebpagesPerSite * kSamplesPerWebpage + index_);
}

std::string Label::to_string() const {
    if (monitored_) {
        return "s" + std::to_string(site_) + "-p" + std::to_string(webpage_) + "-" +
               std::to_string(sample_);
    }
    return "u" + std::to_string(index_);
}

namespace {

std::optional<CellKind> parse_event_token(std::string_view token) {
    if (token == "snp") return CellKind::nonpadding_sent;
    if (token == "rnp") return CellKind::nonpadding_received;
    if (token == "sp") return CellKind::padding_sent;
    if (token == "rp") return CellKind::padding_received;
    // circpad log aliases; the nonpadding forms contain the padding forms.
    if (token.find("nonpadding_sent") != std::string_view::npos) return CellKind::nonpadding_sent;
    if (token.find("nonpadding_received") != std::string_view::npos)
        return CellKind::nonpadding_received;
    if (token.find("padding_sent") != std::string_view::npos) return CellKind::padding_sent;
    if (token.find("padding_received") != std::string_view::npos) return CellKind::padding_received;
    return std::nullopt;
}

}  // namespace

Trace parse_trace(std::string_view text, Endpoint endpoint, Label label, bool normalize_origin) {
    Trace trace;
    trace.endpoint = endpoint;
    trace.label = label;

    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;

        auto tab = line.find('\t');
        if (tab == std::string_view::npos) throw ParseError("expected time<TAB>event", line_no);
        std::string_view time_field = line.substr(0, tab);
        std::string_view event_field = line.substr(tab + 1);

        std::int64_t t = 0;
        auto [ptr, ec] = std::from_chars(time_field.data(), time_field.data() + time_field.size(), t);
        if (time_field.empty() || ec != std::errc{} || ptr != time_field.data() + time_field.size() || t < 0) {
            throw ParseError("invalid time '" + std::string(time_field) + "'", line_no);
        }
        auto kind = parse_event_token(event_field);
        if (!kind) throw ParseError("unknown event '" + std::string(event_field) + "'", line_no);
        trace.events.push_back({t, *kind});
    }

    std::stable_sort(trace.events.begin(), trace.events.end(),
                     [](const CellEvent& a, const CellEvent& b) { return a.time_ns < b.time_ns; });
    if (normalize_origin && !trace.events.empty()) {
        const std::int64_t origin = trace.events.front().time_ns;
        for (auto& e : trace.events) e.time_ns -= origin;
    }
    return trace;
}

std::string serialize_trace(const Trace& trace) {
    std::string out;
    out.reserve(trace.events.size() * 16);
    for (const auto& e : trace.events) {
        out += std::to_string(e.time_ns);
        out += '\t';
        out += to_token(e.kind);
        out += '\n';
    }
    return out;
}

DirectionSequence extract_direction_cells(const Trace& trace, std::size_t length) {
    DirectionSequence seq;
    seq.values.assign(length, 0);
    const std::size_t n = std::min(length, trace.events.size());
    for (std::size_t i = 0; i < n; ++i) seq.values[i] = is_sent(trace.events[i].kind) ? 1 : -1;
    return seq;
}

Trace derive_relay_trace(const Trace& client, std::int64_t one_way_delay_ns) {
    if (one_way_delay_ns < 0) throw ValidationError("one-way delay must be non-negative");
    Trace relay;
    relay.endpoint = Endpoint::relay;
    relay.label = client.label;
    relay.events.reserve(client.events.size());
    for (const auto& e : client.events) {
        const std::int64_t t = is_sent(e.kind) ? e.time_ns + one_way_delay_ns
                                               : std::max<std::int64_t>(0, e.time_ns - one_way_delay_ns);
        relay.events.push_back({t, flip_direction(e.kind)});
    }
    std::stable_sort(relay.events.begin(), relay.events.end(),
                     [](const CellEvent& a, const CellEvent& b) { return a.time_ns < b.time_ns; });
    return relay;
}

DirectionSequence apply_zero_mask(const DirectionSequence& seq, std::size_t begin, std::size_t end) {
    if (begin > end || end > seq.size()) {
        throw ValidationError("mask range [" + std::to_string(begin) + ", " + std::to_string(end) +
                              ") outside sequence of length " + std::to_string(seq.size()));
    }
    DirectionSequence out = seq;
    std::fill(out.values.begin(), out.values.begin() + static_cast<std::ptrdiff_t>(begin), 0);
    std::fill(out.values.begin() + static_cast<std::ptrdiff_t>(end), out.values.end(), 0);
    return out;
}

FoldPlan::FoldPlan(int fold) : fold_{fold} {
    if (fold < 0 || fold >= kWebpagesPerSite) {
        throw ValidationError("fold index must be in [0, 10): " + std::to_string(fold));
    }
}

Role FoldPlan::residue_role(int residue) const {
    if (residue == (8 + fold_) % 10) return Role::validation;
    if (residue == (9 + fold_) % 10) return Role::test;
    return Role::train;
}

Role FoldPlan::webpage_role(int webpage) const { return residue_role(webpage % 10); }

Role FoldPlan::unmonitored_role(int index) const { return residue_role(index % 10); }

Role FoldPlan::role_of(const Label& label) const {
    return label.is_monitored() ? webpage_role(label.webpage()) : unmonitored_role(label.index());
}

std::vector<FoldPlan> make_folds(int k) {
    if (k < 1 || k > kWebpagesPerSite) {
        throw ValidationError("fold count must be in [1, 10]: " + std::to_string(k));
    }
    std::vector<FoldPlan> plans;
    plans.reserve(static_cast<std::size_t>(k));
    for (int f = 0; f < k; ++f) plans.emplace_back(f);
    return plans;
}

}  // namespace padwerk
