#include "padwerk/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "padwerk/error.hpp"
#include "padwerk/random.hpp"

namespace padwerk {

namespace {

struct Burst {
    bool outgoing = false;
    double cells = 1;
    double gap_us = 0;  // idle time before the burst starts
};

using Signature = std::vector<Burst>;

double log_uniform(Rng& rng, double lo, double hi) {
    return std::exp(rng.uniform(std::log(lo), std::log(hi)));
}

Signature random_signature(Rng& rng) {
    Signature sig;
    const int bursts = 12 + static_cast<int>(rng.below(18));
    for (int i = 0; i < bursts; ++i) {
        Burst request{true, 1.0 + static_cast<double>(rng.below(6)), log_uniform(rng, 2'000, 40'000)};
        Burst response{false, log_uniform(rng, 4, 250), log_uniform(rng, 1'000, 20'000)};
        sig.push_back(request);
        sig.push_back(response);
    }
    return sig;
}

Signature perturb(const Signature& base, Rng& rng, double size_jitter, double drop_prob,
                  int max_inserts) {
    Signature out;
    out.reserve(base.size() + static_cast<std::size_t>(max_inserts) * 2);
    for (std::size_t i = 0; i < base.size(); ++i) {
        // The first request/response pair always survives.
        if (i >= 2 && rng.bernoulli(drop_prob)) continue;
        Burst b = base[i];
        b.cells = std::max(1.0, b.cells * rng.uniform(1.0 - size_jitter, 1.0 + size_jitter));
        b.gap_us *= rng.uniform(0.8, 1.25);
        out.push_back(b);
    }
    const int inserts = max_inserts > 0 ? static_cast<int>(rng.below(static_cast<std::uint64_t>(max_inserts) + 1)) : 0;
    for (int k = 0; k < inserts; ++k) {
        const std::size_t at = 2 + rng.below(std::max<std::size_t>(out.size(), 3) - 2);
        Burst extra{rng.bernoulli(0.5), log_uniform(rng, 2, 30), log_uniform(rng, 1'000, 10'000)};
        out.insert(out.begin() + static_cast<std::ptrdiff_t>(std::min(at, out.size())), extra);
    }
    return out;
}

Trace render(const Signature& sig, Rng& rng, const Label& label) {
    Trace t;
    t.label = label;
    double now_us = 0;
    for (const Burst& b : sig) {
        now_us += b.gap_us;
        const auto cells = static_cast<std::size_t>(std::lround(b.cells));
        const double spacing_us = b.outgoing ? 40.0 : 120.0;
        for (std::size_t c = 0; c < cells && t.events.size() < kMaxDatasetEvents; ++c) {
            now_us += -std::log(rng.uniform01()) * spacing_us;
            t.events.push_back({static_cast<std::int64_t>(now_us * 1000.0),
                                b.outgoing ? CellKind::nonpadding_sent : CellKind::nonpadding_received});
        }
    }
    if (!t.events.empty()) {
        const std::int64_t origin = t.events.front().time_ns;
        for (auto& e : t.events) e.time_ns -= origin;
    }
    return t;
}

Sample make_sample(Trace client, std::int64_t delay_ns) {
    Sample s;
    s.label = client.label;
    s.relay = derive_relay_trace(client, delay_ns);
    s.client = std::move(client);
    return s;
}

}  // namespace

void validate(const SyntheticOptions& o) {
    if (o.sites < 1 || o.sites > kSites) throw ValidationError("sites must be in [1, 50]");
    if (o.webpages < 1 || o.webpages > kWebpagesPerSite) throw ValidationError("webpages must be in [1, 10]");
    if (o.samples < 1 || o.samples > kSamplesPerWebpage) throw ValidationError("samples must be in [1, 20]");
    if (o.unmonitored < 0 || o.unmonitored > kUnmonitoredCount) {
        throw ValidationError("unmonitored must be in [0, 10000]");
    }
    if (o.one_way_delay_ns < 0) throw ValidationError("one-way delay must be non-negative");
}

Dataset make_synthetic_dataset(const SyntheticOptions& o) {
    validate(o);
    Dataset ds;
    for (int site = 0; site < o.sites; ++site) {
        Rng site_rng{derive_seed(o.seed, {1, static_cast<std::uint64_t>(site)})};
        const Signature site_sig = random_signature(site_rng);
        for (int page = 0; page < o.webpages; ++page) {
            Rng page_rng{derive_seed(o.seed, {2, static_cast<std::uint64_t>(site),
                                              static_cast<std::uint64_t>(page)})};
            const Signature page_sig = perturb(site_sig, page_rng, 0.15, 0.03, 2);
            for (int sample = 0; sample < o.samples; ++sample) {
                const Label label = Label::monitored(site, page, sample);
                Rng rng{derive_seed(o.seed, {3, label.key()})};
                const Signature visit = perturb(page_sig, rng, 0.10, 0.02, 1);
                ds.samples.push_back(make_sample(render(visit, rng, label), o.one_way_delay_ns));
            }
        }
    }
    for (int u = 0; u < o.unmonitored; ++u) {
        const Label label = Label::unmonitored(u);
        Rng rng{derive_seed(o.seed, {4, label.key()})};
        const Signature visit = perturb(random_signature(rng), rng, 0.10, 0.02, 1);
        ds.samples.push_back(make_sample(render(visit, rng, label), o.one_way_delay_ns));
    }
    return ds;
}

}  // namespace padwerk
