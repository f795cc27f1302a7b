#include "padwerk/distribution.hpp"

#include <cmath>
#include <string>

#include "padwerk/error.hpp"

namespace padwerk {

std::string_view to_string(DistFamily family) {
    switch (family) {
        case DistFamily::none: return "none";
        case DistFamily::uniform: return "uniform";
        case DistFamily::logistic: return "logistic";
        case DistFamily::log_logistic: return "log_logistic";
        case DistFamily::geometric: return "geometric";
        case DistFamily::weibull: return "weibull";
        case DistFamily::pareto: return "pareto";
    }
    return "?";
}

std::optional<DistFamily> parse_family(std::string_view name) {
    for (DistFamily f : kAllFamilies) {
        if (to_string(f) == name) return f;
    }
    return std::nullopt;
}

void validate(const DistSpec& d) {
    auto fail = [&](const char* what) {
        return ValidationError(std::string(to_string(d.family)) + " distribution: " + what);
    };
    if (!std::isfinite(d.param1) || !std::isfinite(d.param2)) throw fail("parameters must be finite");
    if (d.cap_usec == 0) throw fail("cap must be positive");
    switch (d.family) {
        case DistFamily::none:
            break;
        case DistFamily::uniform:
            if (d.param1 < 0 || d.param2 < d.param1) throw fail("requires 0 <= min <= max");
            break;
        case DistFamily::logistic:
            if (d.param2 <= 0) throw fail("scale must be positive");
            break;
        case DistFamily::log_logistic:
            if (d.param1 <= 0 || d.param2 <= 0) throw fail("scale and shape must be positive");
            break;
        case DistFamily::geometric:
            if (d.param1 <= 0 || d.param1 > 1) throw fail("probability must be in (0, 1]");
            break;
        case DistFamily::weibull:
            if (d.param1 <= 0 || d.param2 <= 0) throw fail("shape and scale must be positive");
            break;
        case DistFamily::pareto:
            if (d.param1 <= 0 || d.param2 <= 0) throw fail("scale and shape must be positive");
            break;
    }
}

double inverse_cdf(const DistSpec& d, double u) {
    switch (d.family) {
        case DistFamily::none:
            break;
        case DistFamily::uniform:
            return d.param1 + u * (d.param2 - d.param1);
        case DistFamily::logistic:
            return d.param1 + d.param2 * std::log(u / (1.0 - u));
        case DistFamily::log_logistic:
            return d.param1 * std::pow(u / (1.0 - u), 1.0 / d.param2);
        case DistFamily::geometric:
            if (d.param1 >= 1.0) return 0.0;
            return std::floor(std::log1p(-u) / std::log1p(-d.param1));
        case DistFamily::weibull:
            return d.param2 * std::pow(-std::log1p(-u), 1.0 / d.param1);
        case DistFamily::pareto:
            return d.param1 * std::pow(1.0 - u, -1.0 / d.param2);
    }
    throw ValidationError("cannot sample from distribution family none");
}

DistSample sample_at(const DistSpec& d, SamplePurpose purpose, double u,
                     std::optional<std::uint64_t> max_length) {
    double x = inverse_cdf(d, u);
    const auto cap = static_cast<double>(d.cap_usec);
    if (std::isnan(x)) x = cap;
    if (purpose == SamplePurpose::delay) {
        x += static_cast<double>(d.added_shift_usec);
        if (x >= cap) return {d.cap_usec, true};
        if (x <= 0) return {0, false};
        return {static_cast<std::uint64_t>(std::llround(x)), false};
    }
    std::uint64_t n = 0;
    if (x >= cap) {
        n = d.cap_usec;
    } else if (x > 0) {
        n = static_cast<std::uint64_t>(std::llround(x));
    }
    if (max_length && n > *max_length) n = *max_length;
    return {n, false};
}

DistSample sample_distribution(const DistSpec& d, SamplePurpose purpose, Rng& rng,
                               std::optional<std::uint64_t> max_length) {
    if (d.family == DistFamily::none) {
        throw ValidationError("cannot sample from distribution family none");
    }
    return sample_at(d, purpose, rng.uniform01(), max_length);
}

}  // namespace padwerk
