// Copyright (c) 2026 the parima authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <cmath>
#include <set>
#include <span>
#include <vector>

#include "parima/errors.hpp"
#include "parima/geometry.hpp"

namespace parima {

struct Tile {
    int row = 0;
    int col = 0;
    auto operator<=>(const Tile&) const = default;
};

/// Spatial tiling of a frame. Tile dimensions must divide the frame
/// exactly; anything else is rejected up front.
struct TileGrid {
    int rows = 8;
    int cols = 8;
    double frame_width = 3840.0;
    double frame_height = 1920.0;

    TileGrid() = default;
    TileGrid(int m, int n, double width, double height)
        : rows(m), cols(n), frame_width(width), frame_height(height) {
        if (rows < 1 || cols < 1) throw InvalidInput("TileGrid: need at least one tile");
        if (width <= 0 || height <= 0) throw InvalidInput("TileGrid: bad frame dims");
        if (std::fmod(width, cols) != 0.0 || std::fmod(height, rows) != 0.0)
            throw InvalidInput("TileGrid: tile dimensions must divide the frame exactly");
    }

    double tile_width() const { return frame_width / cols; }
    double tile_height() const { return frame_height / rows; }
    int tile_count() const { return rows * cols; }
};

/// Media-player viewport dimensions in pixels.
struct PlayerFov {
    double width = 600.0;
    double height = 300.0;
};

/// Per-tile bitrate map for one chunk; entries sum to the preferred total.
struct TileAllocation {
    int rows = 0;
    int cols = 0;
    std::vector<double> bitrates; // row-major
    double total = 0.0;

    double at(int r, int c) const { return bitrates[static_cast<std::size_t>(r) * cols + c]; }
    double& at(int r, int c) { return bitrates[static_cast<std::size_t>(r) * cols + c]; }
};

inline Tile viewport_to_tile(const EquirectPoint& v, const TileGrid& grid) {
    int row = static_cast<int>(std::floor(v.y / grid.tile_height()));
    int col = static_cast<int>(std::floor(v.x / grid.tile_width()));
    row = std::clamp(row, 0, grid.rows - 1);
    col = std::clamp(col, 0, grid.cols - 1);
    return {row, col};
}

inline EquirectPoint tile_center(const Tile& t, const TileGrid& grid) {
    return {(t.col + 0.5) * grid.tile_width(), (t.row + 0.5) * grid.tile_height()};
}

/// Toroidal Manhattan distance; both axes wrap, so the maximum possible
/// distance on an m x n grid is (m + n) / 2.
inline int tile_distance(const Tile& a, const Tile& b, const TileGrid& grid) {
    const int dr = std::abs(a.row - b.row);
    const int dc = std::abs(a.col - b.col);
    return std::min(dr, grid.rows - dr) + std::min(dc, grid.cols - dc);
}

inline double max_tile_distance(const TileGrid& grid) {
    return (grid.rows + grid.cols) / 2.0;
}

namespace detail {

// Tile indices along one axis whose span intersects [lo, hi), cyclically.
inline std::set<int> spanned_indices(double lo, double hi, double tile_size, int count) {
    std::set<int> out;
    int k = static_cast<int>(std::floor(lo / tile_size));
    for (int steps = 0; k * tile_size < hi - 1e-9 && steps < count; ++k, ++steps) {
        int idx = k % count;
        if (idx < 0) idx += count;
        out.insert(idx);
    }
    return out;
}

// FoV membership mask around a viewport point. The horizontal axis always
// wraps; the vertical axis either clamps to the frame (the physical player
// rectangle) or wraps too (the allocator's fully toroidal reading).
inline std::vector<char> fov_mask(const EquirectPoint& center, const TileGrid& grid,
                                  const PlayerFov& fov, bool wrap_vertical) {
    const auto cols = spanned_indices(center.x - fov.width / 2, center.x + fov.width / 2,
                                      grid.tile_width(), grid.cols);
    std::set<int> rows;
    if (wrap_vertical) {
        rows = spanned_indices(center.y - fov.height / 2, center.y + fov.height / 2,
                               grid.tile_height(), grid.rows);
    } else {
        const double y0 = std::max(0.0, center.y - fov.height / 2);
        const double y1 = std::min(grid.frame_height, center.y + fov.height / 2);
        rows = spanned_indices(y0, y1, grid.tile_height(), grid.rows);
    }
    std::vector<char> mask(static_cast<std::size_t>(grid.tile_count()), 0);
    for (int r : rows)
        for (int c : cols) mask[static_cast<std::size_t>(r) * grid.cols + c] = 1;
    return mask;
}

} // namespace detail

/// Tiles intersecting the player rectangle centered at the viewport point,
/// wrapping horizontally and clamped vertically. Row-major sorted.
inline std::vector<Tile> fov_tiles(const EquirectPoint& center, const TileGrid& grid, const PlayerFov& fov) {
    const auto mask = detail::fov_mask(center, grid, fov, false);
    std::vector<Tile> out;
    for (int r = 0; r < grid.rows; ++r)
        for (int c = 0; c < grid.cols; ++c)
            if (mask[static_cast<std::size_t>(r) * grid.cols + c]) out.push_back({r, c});
    return out;
}

/// FoV around a tile's center, for when no sub-tile point is available.
inline std::vector<Tile> fov_tiles(const Tile& center, const TileGrid& grid, const PlayerFov& fov) {
    return fov_tiles(tile_center(center, grid), grid, fov);
}

/// Pyramid bitrate allocation: per predicted frame, the viewport tile gains
/// a full unit, tiles inside the player FoV gain 1 - d/(2*max_d) and the
/// rest gain 1 - d/max_d, with max_d = (m+n)/2 the grid-wide constant.
/// Weights are then normalized to the preferred bitrate. FoV membership is
/// toroidal in both axes here, matching the distance normalization.
inline TileAllocation allocate_pyramid(std::span<const EquirectPoint> predicted, const TileGrid& grid,
                                       const PlayerFov& fov, double preferred_bitrate) {
    if (predicted.empty()) throw InvalidInput("allocate_pyramid: need at least one frame");
    const double max_d = max_tile_distance(grid);
    std::vector<double> weight(static_cast<std::size_t>(grid.tile_count()), 1.0);
    for (const auto& point : predicted) {
        const Tile vt = viewport_to_tile(point, grid);
        const auto mask = detail::fov_mask(point, grid, fov, true);
        for (int r = 0; r < grid.rows; ++r) {
            for (int c = 0; c < grid.cols; ++c) {
                const std::size_t idx = static_cast<std::size_t>(r) * grid.cols + c;
                if (r == vt.row && c == vt.col) {
                    weight[idx] += 1.0;
                    continue;
                }
                const double d = tile_distance({r, c}, vt, grid);
                weight[idx] += mask[idx] ? 1.0 - d / (2.0 * max_d) : 1.0 - d / max_d;
            }
        }
    }
    double sum = 0.0;
    for (double w : weight) sum += w;
    TileAllocation out{grid.rows, grid.cols, std::move(weight), preferred_bitrate};
    for (double& w : out.bitrates) w = w / sum * preferred_bitrate;
    return out;
}

/// Pyramid allocation from viewport tiles; the FoV is taken around each
/// tile's center.
inline TileAllocation allocate_pyramid(std::span<const Tile> predicted, const TileGrid& grid,
                                       const PlayerFov& fov, double preferred_bitrate) {
    std::vector<EquirectPoint> centers;
    centers.reserve(predicted.size());
    for (const auto& t : predicted) centers.push_back(tile_center(t, grid));
    return allocate_pyramid(std::span<const EquirectPoint>(centers), grid, fov, preferred_bitrate);
}

/// Non-adaptive baseline: every tile gets B_p / (m * n).
inline TileAllocation allocate_naba(const TileGrid& grid, double preferred_bitrate) {
    TileAllocation out{grid.rows, grid.cols,
                       std::vector<double>(static_cast<std::size_t>(grid.tile_count()),
                                           preferred_bitrate / grid.tile_count()),
                       preferred_bitrate};
    return out;
}

} // namespace parima
