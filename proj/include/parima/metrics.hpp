// Copyright (c) 2026 the parima authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <cmath>
#include <set>
#include <span>
#include <vector>

#include "parima/allocator.hpp"
#include "parima/errors.hpp"
#include "parima/geometry.hpp"

namespace parima {

/// Everything needed to score one chunk: the actual viewports, the bitrate
/// map the client chose (from predictions) and the viewing geometry.
struct ChunkRecord {
    int chunk = 0;
    std::vector<EquirectPoint> actual;
    TileAllocation allocation;
    PlayerFov fov;
    TileGrid grid;
};

struct QoeChunk {
    double q1 = 0.0; // viewport bitrate level
    double q2 = 0.0; // intra-frame FoV bitrate spread
    double q3 = 0.0; // across-frame FoV bitrate spread
    double q4 = 0.0; // |Q1 - previous Q1|, zero for the first chunk
};

struct QoeReport {
    std::vector<QoeChunk> chunks;
    double aggregate_q = 0.0;
    double mean_tile_error = 0.0; // filled by the caller when predictions exist
};

/// Tile prediction error: toroidal Manhattan distance.
inline int manhattan_tile_error(const Tile& actual, const Tile& predicted, const TileGrid& grid) {
    return tile_distance(actual, predicted, grid);
}

namespace detail {

inline double population_stddev(std::span<const double> values) {
    if (values.empty()) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    return std::sqrt(var / static_cast<double>(values.size()));
}

// Number of distinct viewport-center tiles in the chunk.
inline int distinct_viewport_tiles(const ChunkRecord& rec) {
    std::set<Tile> tiles;
    for (const auto& p : rec.actual) tiles.insert(viewport_to_tile(p, rec.grid));
    return static_cast<int>(tiles.size());
}

// Per-frame mean bitrate over the FoV tile set of the actual viewport.
inline std::vector<double> per_frame_fov_means(const ChunkRecord& rec) {
    std::vector<double> means;
    means.reserve(rec.actual.size());
    for (const auto& p : rec.actual) {
        const auto tiles = fov_tiles(p, rec.grid, rec.fov);
        double sum = 0.0;
        for (const auto& t : tiles) sum += rec.allocation.at(t.row, t.col);
        means.push_back(sum / static_cast<double>(tiles.size()));
    }
    return means;
}

} // namespace detail

/// Average bitrate the user actually saw: per frame, the mean over the FoV
/// tiles of the actual viewport; summed over frames and normalized by the
/// number of distinct viewport tiles in the chunk.
inline double q1(const ChunkRecord& rec) {
    if (rec.actual.empty()) throw InvalidInput("q1: chunk has no frames");
    const auto means = detail::per_frame_fov_means(rec);
    double sum = 0.0;
    for (double m : means) sum += m;
    return sum / detail::distinct_viewport_tiles(rec);
}

/// Bitrate spread inside the viewport, per frame (population stddev).
inline double q2(const ChunkRecord& rec) {
    if (rec.actual.empty()) throw InvalidInput("q2: chunk has no frames");
    double sum = 0.0;
    for (const auto& p : rec.actual) {
        const auto tiles = fov_tiles(p, rec.grid, rec.fov);
        std::vector<double> rates;
        rates.reserve(tiles.size());
        for (const auto& t : tiles) rates.push_back(rec.allocation.at(t.row, t.col));
        sum += detail::population_stddev(rates);
    }
    return sum / detail::distinct_viewport_tiles(rec);
}

/// Spread of the per-frame mean FoV bitrate across the chunk's frames.
inline double q3(const ChunkRecord& rec) {
    if (rec.actual.empty()) throw InvalidInput("q3: chunk has no frames");
    const auto means = detail::per_frame_fov_means(rec);
    return detail::population_stddev(means) / detail::distinct_viewport_tiles(rec);
}

/// Viewport bitrate jump between successive chunks.
inline double q4(double q1_curr, double q1_prev) {
    return std::abs(q1_curr - q1_prev);
}

/// Q = sum(Q1 - Q2 - Q3) - sum_{c>=2} Q4 over the chunks, in order.
inline QoeReport aggregate_qoe(std::span<const ChunkRecord> records) {
    if (records.empty()) throw InvalidInput("aggregate_qoe: need at least one chunk");
    QoeReport report;
    report.chunks.reserve(records.size());
    double q = 0.0;
    for (std::size_t c = 0; c < records.size(); ++c) {
        QoeChunk qc;
        qc.q1 = q1(records[c]);
        qc.q2 = q2(records[c]);
        qc.q3 = q3(records[c]);
        qc.q4 = c > 0 ? q4(qc.q1, report.chunks[c - 1].q1) : 0.0;
        q += qc.q1 - qc.q2 - qc.q3;
        if (c > 0) q -= qc.q4;
        report.chunks.push_back(qc);
    }
    report.aggregate_q = q;
    return report;
}

} // namespace parima
