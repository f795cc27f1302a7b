#include "padwerk/visualize.hpp"

#include <png.h>

#include <algorithm>
#include <cstdio>
#include <memory>

#include "padwerk/error.hpp"

namespace padwerk {

Rgba color_of(CellKind kind) {
    switch (kind) {
        case CellKind::nonpadding_sent: return kSentNonpaddingColor;
        case CellKind::nonpadding_received: return kReceivedNonpaddingColor;
        case CellKind::padding_sent: return kSentPaddingColor;
        case CellKind::padding_received: return kReceivedPaddingColor;
    }
    return kBeyondEndColor;
}

TraceGrid render_trace_grid(std::span<const Trace> traces, std::size_t max_rows) {
    const std::size_t rows = std::min(traces.size(), max_rows);
    if (rows == 0) throw ValidationError("no traces to render");
    TraceGrid grid;
    grid.height = rows;
    for (std::size_t r = 0; r < rows; ++r) grid.width = std::max(grid.width, traces[r].events.size());
    if (grid.width == 0) throw ValidationError("all traces to render are empty");
    grid.pixels.assign(grid.width * grid.height, kBeyondEndColor);
    for (std::size_t r = 0; r < rows; ++r) {
        const auto& events = traces[r].events;
        for (std::size_t c = 0; c < events.size(); ++c) grid.pixels[r * grid.width + c] = color_of(events[c].kind);
    }
    return grid;
}

void write_png(const TraceGrid& grid, const std::filesystem::path& path) {
    if (grid.width == 0 || grid.height == 0) throw ValidationError("cannot write an empty image");
    std::unique_ptr<FILE, int (*)(FILE*)> file{std::fopen(path.c_str(), "wb"), &std::fclose};
    if (!file) throw DataError("cannot open " + path.string() + " for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw DataError("failed writing " + path.string());
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(grid.width), static_cast<png_uint_32>(grid.height), 8,
                 PNG_COLOR_TYPE_RGBA, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (std::size_t r = 0; r < grid.height; ++r) {
        auto* row = const_cast<png_bytep>(grid.pixels[r * grid.width].data());
        png_write_row(png, row);
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace padwerk
