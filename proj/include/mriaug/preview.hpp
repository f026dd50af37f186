#pragma once

// Eight-panel montage: the original slice plus each transform applied alone.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mriaug/config.hpp"
#include "mriaug/grid.hpp"
#include "mriaug/pipeline.hpp"
#include "mriaug/png.hpp"
#include "mriaug/sampler.hpp"
#include "mriaug/volume.hpp"

namespace mriaug {

struct PreviewOptions {
    Axis slice_axis = Axis::Z;             // axial by default
    std::optional<std::size_t> slice_index; // default: middle slice
    bool exaggerate = false;               // magnitude level 5 instead of the configured level
    std::uint64_t seed = 0;
    AugmentationConfig base;
};

struct Panel {
    std::string title;
    std::optional<TransformId> transform;
    Volume volume;
    AugmentationPlan plan;
};

struct Preview {
    Axis slice_axis = Axis::Z;
    std::size_t slice_index = 0;
    std::vector<Panel> panels; // original first, then default_order
};

/// Panel t runs the pipeline with only t enabled and the given seed, so it is
/// hash-identical to `augment --only t` on the same input.
inline AugmentationConfig panel_config(TransformId t, const PreviewOptions& opt) {
    AugmentationConfig c = AugmentationConfig::only(t, opt.base);
    if (opt.exaggerate) c.magnitude_level = 5;
    return c;
}

inline Preview make_preview(const Sample& s, const PreviewOptions& opt) {
    Preview p;
    p.slice_axis = opt.slice_axis;
    const std::size_t extent = s.image.shape()[static_cast<std::size_t>(opt.slice_axis)];
    p.slice_index = opt.slice_index.value_or(extent / 2);
    if (p.slice_index >= extent)
        fail(ErrorCode::BadSliceIndex, "slice " + std::to_string(p.slice_index) + " outside [0, " +
                                           std::to_string(extent) + ") along " +
                                           std::string(to_string(opt.slice_axis)));
    AugmentationPlan empty;
    empty.seed = opt.seed;
    empty.shape = s.image.shape();
    p.panels.push_back({"original", std::nullopt, s.image, empty});
    for (TransformId t : default_order) {
        const Pipeline pipe(panel_config(t, opt));
        Augmented a = pipe.apply(s, opt.seed);
        p.panels.push_back({std::string(to_string(t)), t, std::move(a.sample.image), std::move(a.plan)});
    }
    return p;
}

/// 2D slice with display orientation: first in-plane axis left to right,
/// second bottom to top.
inline std::vector<std::vector<double>> extract_slice(const Volume& v, Axis axis, std::size_t index) {
    const std::size_t a = static_cast<std::size_t>(axis);
    const std::size_t u = a == 0 ? 1 : 0;
    const std::size_t w = a == 2 ? 1 : 2;
    const Shape& sh = v.shape();
    std::vector<std::vector<double>> rows(sh[w], std::vector<double>(sh[u]));
    std::array<std::size_t, 3> p{};
    p[a] = index;
    for (std::size_t r = 0; r < sh[w]; ++r)
        for (std::size_t c = 0; c < sh[u]; ++c) {
            p[u] = c;
            p[w] = sh[w] - 1 - r;
            rows[r][c] = v.data()(p[0], p[1], p[2]);
        }
    return rows;
}

struct Window {
    double lo = 0.0;
    double hi = 0.0;
};

/// Min-max windowed 8-bit rendering of one slice.
inline Gray8 render_slice(const std::vector<std::vector<double>>& rows, Window& window) {
    window = {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& row : rows)
        for (double v : row) {
            window.lo = std::min(window.lo, v);
            window.hi = std::max(window.hi, v);
        }
    Gray8 img(rows.empty() ? 0 : rows[0].size(), rows.size());
    const double span = window.hi - window.lo;
    for (std::size_t y = 0; y < img.height; ++y)
        for (std::size_t x = 0; x < img.width; ++x)
            img.at(x, y) =
                span > 0 ? static_cast<std::uint8_t>(std::lround(255.0 * (rows[y][x] - window.lo) / span)) : 0;
    return img;
}

inline std::string format_window(const Window& w) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "w=[%.3f,%.3f]", w.lo, w.hi);
    return buf;
}

struct MontageLayout {
    std::size_t columns = 4;
    std::size_t margin = 2;
    std::size_t caption_height = 2 * (font::glyph_height + 2) + 2;
};

/// Grid of panels, each with a two-line caption strip (title, display window).
inline Gray8 render_montage(const Preview& p, const MontageLayout& layout = {}) {
    std::vector<Gray8> tiles;
    std::vector<Window> windows;
    for (const Panel& panel : p.panels) {
        Window w;
        tiles.push_back(render_slice(extract_slice(panel.volume, p.slice_axis, p.slice_index), w));
        windows.push_back(w);
    }
    std::size_t tile_w = 0, tile_h = 0;
    for (const Gray8& t : tiles) {
        tile_w = std::max(tile_w, t.width);
        tile_h = std::max(tile_h, t.height);
    }
    std::size_t cell_w = tile_w;
    for (std::size_t i = 0; i < p.panels.size(); ++i)
        cell_w = std::max({cell_w, font::text_width(p.panels[i].title), font::text_width(format_window(windows[i]))});
    const std::size_t cols = std::min(layout.columns, std::max<std::size_t>(1, tiles.size()));
    const std::size_t rows = (tiles.size() + cols - 1) / cols;
    const std::size_t cell_h = tile_h + layout.caption_height;
    Gray8 out(cols * cell_w + (cols + 1) * layout.margin, rows * cell_h + (rows + 1) * layout.margin, 0);
    for (std::size_t i = 0; i < tiles.size(); ++i) {
        const std::size_t x0 = layout.margin + (i % cols) * (cell_w + layout.margin);
        const std::size_t y0 = layout.margin + (i / cols) * (cell_h + layout.margin);
        out.blit(tiles[i], x0, y0);
        font::draw_text(out, x0, y0 + tile_h + 2, p.panels[i].title);
        font::draw_text(out, x0, y0 + tile_h + 2 + font::glyph_height + 2, format_window(windows[i]), 180);
    }
    return out;
}

} // namespace mriaug
