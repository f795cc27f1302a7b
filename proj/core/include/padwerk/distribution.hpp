#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "padwerk/random.hpp"

namespace padwerk {

enum class DistFamily : std::uint8_t {
    none,
    uniform,       // param1 = min, param2 = max
    logistic,      // param1 = location, param2 = scale
    log_logistic,  // param1 = scale (alpha), param2 = shape (beta)
    geometric,     // param1 = success probability; failures before first success
    weibull,       // param1 = shape (k), param2 = scale (lambda)
    pareto,        // param1 = scale (x_m), param2 = shape (alpha)
};

inline constexpr std::array kAllFamilies = {
    DistFamily::none,      DistFamily::uniform, DistFamily::logistic, DistFamily::log_logistic,
    DistFamily::geometric, DistFamily::weibull, DistFamily::pareto,
};

std::string_view to_string(DistFamily family);
std::optional<DistFamily> parse_family(std::string_view name);

/// Ten seconds; delays at or beyond the cap mean "never pad".
inline constexpr std::uint64_t kDefaultCapUsec = 10'000'000;

/// Parametric sampling distribution. The shift applies to delays only; the
/// cap bounds every sample.
struct DistSpec {
    DistFamily family = DistFamily::none;
    double param1 = 0.0;
    double param2 = 0.0;
    std::uint64_t added_shift_usec = 0;
    std::uint64_t cap_usec = kDefaultCapUsec;

    bool operator==(const DistSpec&) const = default;
};

/// Throws ValidationError when parameters fall outside the family's domain.
void validate(const DistSpec& dist);

/// Quantile function of the raw family (no shift, no cap) at u in (0, 1).
double inverse_cdf(const DistSpec& dist, double u);

enum class SamplePurpose : std::uint8_t { delay, length };

struct DistSample {
    std::uint64_t value = 0;
    /// Delay reached the cap: the delay-infinite event.
    bool infinite = false;
};

/// Maps one uniform variate to a sample. Delays get the shift added, then are
/// clamped to [0, cap] and rounded to whole microseconds; reaching the cap
/// flags `infinite`. Lengths are rounded, clamped to [0, cap] and bounded by
/// max_length. Throws ValidationError for family none.
DistSample sample_at(const DistSpec& dist, SamplePurpose purpose, double u,
                     std::optional<std::uint64_t> max_length = std::nullopt);

DistSample sample_distribution(const DistSpec& dist, SamplePurpose purpose, Rng& rng,
                               std::optional<std::uint64_t> max_length = std::nullopt);

}  // namespace padwerk
