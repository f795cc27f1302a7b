#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace padwerk {

inline constexpr int kSites = 50;
inline constexpr int kWebpagesPerSite = 10;
inline constexpr int kSamplesPerWebpage = 20;
inline constexpr int kUnmonitoredCount = 10000;
inline constexpr std::size_t kMaxDatasetEvents = 10000;
inline constexpr std::size_t kDefaultSequenceLength = 5000;

enum class CellKind : std::uint8_t {
    nonpadding_sent,
    nonpadding_received,
    padding_sent,
    padding_received,
};

constexpr bool is_sent(CellKind k) {
    return k == CellKind::nonpadding_sent || k == CellKind::padding_sent;
}
constexpr bool is_padding(CellKind k) {
    return k == CellKind::padding_sent || k == CellKind::padding_received;
}
/// Same padding-ness, opposite direction.
constexpr CellKind flip_direction(CellKind k) {
    switch (k) {
        case CellKind::nonpadding_sent: return CellKind::nonpadding_received;
        case CellKind::nonpadding_received: return CellKind::nonpadding_sent;
        case CellKind::padding_sent: return CellKind::padding_received;
        case CellKind::padding_received: return CellKind::padding_sent;
    }
    return k;
}

/// Canonical trace-file token: snp, rnp, sp or rp.
std::string_view to_token(CellKind kind);

struct CellEvent {
    std::int64_t time_ns = 0;
    CellKind kind = CellKind::nonpadding_sent;

    bool operator==(const CellEvent&) const = default;
};

enum class Endpoint : std::uint8_t { client, relay };

std::string_view to_string(Endpoint e);

/// Identity of a dataset sample: a monitored (site, webpage, sample) triple or
/// an unmonitored index.
class Label {
public:
    /// Defaults to unmonitored sample 0.
    Label() = default;

    static Label monitored(int site, int webpage, int sample);
    static Label unmonitored(int index);

    /// Accepts the forms produced by to_string(): "s<site>-p<page>-<sample>"
    /// and "u<index>".
    static Label parse(std::string_view text);

    bool is_monitored() const { return monitored_; }
    int site() const { return site_; }
    int webpage() const { return webpage_; }
    int sample() const { return sample_; }
    int index() const { return index_; }

    /// Monitored class (the site), or -1 for unmonitored samples.
    int class_id() const { return monitored_ ? site_ : -1; }

    /// Dense unique key over the whole label universe.
    std::uint64_t key() const;

    std::string to_string() const;

    auto operator<=>(const Label&) const = default;

private:
    bool monitored_ = false;
    int site_ = 0;
    int webpage_ = 0;
    int sample_ = 0;
    int index_ = 0;
};

struct Trace {
    std::vector<CellEvent> events;
    Endpoint endpoint = Endpoint::client;
    Label label;

    bool operator==(const Trace&) const = default;
};

/// Parses newline-delimited "time_ns<TAB>event" records. Events are sorted by
/// time (stable) and shifted so the first one sits at time 0. Besides the
/// canonical tokens, any token containing nonpadding_sent, nonpadding_received,
/// padding_sent or padding_received (circpad log style) is accepted.
/// Throws ParseError carrying the 1-based line number. With
/// `normalize_origin` false the original timestamps are kept.
Trace parse_trace(std::string_view text, Endpoint endpoint = Endpoint::client, Label label = {},
                  bool normalize_origin = true);

std::string serialize_trace(const Trace& trace);

/// Signs of the first `length` cells: +1 sent, -1 received, 0 past the end.
struct DirectionSequence {
    std::vector<std::int8_t> values;

    std::size_t size() const { return values.size(); }
    bool operator==(const DirectionSequence&) const = default;
};

DirectionSequence extract_direction_cells(const Trace& trace,
                                          std::size_t length = kDefaultSequenceLength);

/// Relay-side view of a client trace: client-sent cells arrive `delay` later,
/// client-received cells left the relay `delay` earlier (clamped at 0).
Trace derive_relay_trace(const Trace& client, std::int64_t one_way_delay_ns);

/// Zeroes every value outside [begin, end).
[[nodiscard]] DirectionSequence apply_zero_mask(const DirectionSequence& seq, std::size_t begin, std::size_t end);

enum class Role : std::uint8_t { train, validation, test };

std::string_view to_string(Role r);

/// Deterministic webpage rotation: in fold f, webpage (8+f) mod 10 validates
/// and (9+f) mod 10 tests, for every site. Unmonitored samples rotate on
/// index mod 10 the same way.
class FoldPlan {
public:
    explicit FoldPlan(int fold);

    int fold() const { return fold_; }
    Role webpage_role(int webpage) const;
    Role unmonitored_role(int index) const;
    Role role_of(const Label& label) const;

private:
    Role residue_role(int residue) const;

    int fold_;
};

std::vector<FoldPlan> make_folds(int k = 10);

}  // namespace padwerk
