#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "padwerk/trace.hpp"

namespace padwerk {

using Rgba = std::array<std::uint8_t, 4>;

inline constexpr Rgba kReceivedNonpaddingColor{0, 0, 0, 255};
inline constexpr Rgba kSentNonpaddingColor{255, 255, 255, 255};
inline constexpr Rgba kReceivedPaddingColor{255, 0, 0, 255};
inline constexpr Rgba kSentPaddingColor{0, 255, 0, 255};
inline constexpr Rgba kBeyondEndColor{0, 0, 0, 0};

inline constexpr std::size_t kDefaultGridRows = 200;

Rgba color_of(CellKind kind);

/// One row per trace, one pixel per cell. Width is the longest rendered trace;
/// shorter rows end in transparent pixels.
struct TraceGrid {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<Rgba> pixels;  // row-major

    const Rgba& at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }
};

/// Renders the first `max_rows` traces. Throws ValidationError when nothing
/// would be rendered.
TraceGrid render_trace_grid(std::span<const Trace> traces, std::size_t max_rows = kDefaultGridRows);

void write_png(const TraceGrid& grid, const std::filesystem::path& path);

}  // namespace padwerk
