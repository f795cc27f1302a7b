#pragma once

#include <cstdint>

#include "padwerk/dataset.hpp"

namespace padwerk {

/// Shape of a generated open-world dataset. Each monitored site owns a burst
/// signature shared by its webpages; webpages perturb it, samples add noise.
/// Unmonitored samples each draw an unrelated signature.
struct SyntheticOptions {
    int sites = 10;
    int webpages = kWebpagesPerSite;
    int samples = kSamplesPerWebpage;
    int unmonitored = 2000;
    std::uint64_t seed = 1;
    std::int64_t one_way_delay_ns = kDefaultOneWayDelayNs;
};

void validate(const SyntheticOptions& options);

Dataset make_synthetic_dataset(const SyntheticOptions& options);

}  // namespace padwerk
