// Copyright (c) 2026 the parima authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "parima/allocator.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace parima;

namespace {

// =====================================================================
// Brute-force oracle: an independent rendering of the pyramid scheme,
// with its own distance and rectangle-overlap membership code.
// =====================================================================

int oracle_distance(int r1, int c1, int r2, int c2, int m, int n) {
    int dr = std::abs(r1 - r2);
    int dc = std::abs(c1 - c2);
    dr = std::min(dr, m - dr);
    dc = std::min(dc, n - dc);
    return dr + dc;
}

// Does [a0, a1) overlap [b0, b1) on a circle of the given period? Checked
// by shifting one interval through all three candidate positions.
bool cyclic_overlap(double a0, double a1, double b0, double b1, double period) {
    for (int s = -1; s <= 1; ++s) {
        const double lo = b0 + s * period, hi = b1 + s * period;
        if (a0 < hi - 1e-9 && lo < a1 - 1e-9) return true;
    }
    return false;
}

std::vector<double> oracle_pyramid(const std::vector<EquirectPoint>& predicted, const TileGrid& g,
                                   const PlayerFov& fov, double bp) {
    const double maxd = (g.rows + g.cols) / 2.0;
    std::vector<double> w(static_cast<std::size_t>(g.rows * g.cols), 1.0);
    for (const auto& p : predicted) {
        const int vr = std::min(g.rows - 1, static_cast<int>(p.y / g.tile_height()));
        const int vc = std::min(g.cols - 1, static_cast<int>(p.x / g.tile_width()));
        for (int r = 0; r < g.rows; ++r) {
            for (int c = 0; c < g.cols; ++c) {
                if (r == vr && c == vc) {
                    w[static_cast<std::size_t>(r) * g.cols + c] += 1.0;
                    continue;
                }
                const double d = oracle_distance(r, c, vr, vc, g.rows, g.cols);
                const bool in_fov =
                    cyclic_overlap(c * g.tile_width(), (c + 1) * g.tile_width(),
                                   p.x - fov.width / 2, p.x + fov.width / 2, g.frame_width) &&
                    cyclic_overlap(r * g.tile_height(), (r + 1) * g.tile_height(),
                                   p.y - fov.height / 2, p.y + fov.height / 2, g.frame_height);
                w[static_cast<std::size_t>(r) * g.cols + c] += in_fov ? 1.0 - d / (2 * maxd) : 1.0 - d / maxd;
            }
        }
    }
    double sum = 0.0;
    for (double v : w) sum += v;
    for (double& v : w) v = v / sum * bp;
    return w;
}

} // namespace

TEST_CASE("tile grid validation") {
    CHECK_THROWS_AS(TileGrid(8, 7, 3840, 1920), InvalidInput); // 3840 % 7 != 0
    CHECK_THROWS_AS(TileGrid(0, 8, 3840, 1920), InvalidInput);
    const TileGrid g(8, 8, 3840, 1920);
    CHECK(g.tile_width() == Catch::Approx(480));
    CHECK(g.tile_height() == Catch::Approx(240));
}

TEST_CASE("viewport_to_tile corners and floor rule") {
    const TileGrid g(8, 8, 3840, 1920);
    CHECK(viewport_to_tile({0, 0}, g) == Tile{0, 0});
    CHECK(viewport_to_tile({3839, 1919}, g) == Tile{7, 7});
    CHECK(viewport_to_tile({500, 500}, g) == Tile{2, 1});
}

TEST_CASE("tile_distance wraps both axes and peaks at (m+n)/2") {
    const TileGrid g(8, 8, 3840, 1920);
    CHECK(tile_distance({3, 3}, {3, 3}, g) == 0);
    CHECK(tile_distance({0, 0}, {7, 7}, g) == 2);
    CHECK(tile_distance({0, 0}, {4, 4}, g) == 8);
    CHECK(max_tile_distance(g) == 8.0);

    int observed_max = 0;
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c)
            observed_max = std::max(observed_max, tile_distance({0, 0}, {r, c}, g));
    CHECK(observed_max == 8);
}

TEST_CASE("fov_tiles: single tile, 2x2 corner case and seam wrap") {
    const TileGrid g(8, 8, 3840, 1920);

    // Player smaller than one tile, centered mid-tile.
    const PlayerFov small{100, 100};
    CHECK(fov_tiles(EquirectPoint{720, 360}, g, small) == std::vector<Tile>{{1, 1}});

    // 600x300 player centered exactly on a tile corner covers 2x2 tiles.
    const PlayerFov player{600, 300};
    const auto corner = fov_tiles(EquirectPoint{480, 240}, g, player);
    CHECK(corner == std::vector<Tile>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});

    // Center on the seam: both column 0 and column n-1 appear.
    const auto seam = fov_tiles(EquirectPoint{0, 960}, g, player);
    bool has_first = false, has_last = false;
    for (const auto& t : seam) {
        has_first |= t.col == 0;
        has_last |= t.col == 7;
    }
    CHECK(has_first);
    CHECK(has_last);
}

TEST_CASE("pyramid allocation: hand-derived 2x2 example") {
    const TileGrid g(2, 2, 200, 100);
    const PlayerFov fov{10, 10};
    const std::vector<EquirectPoint> predicted{{50, 25}}; // center of tile (0,0)
    const auto alloc = allocate_pyramid(std::span<const EquirectPoint>(predicted), g, fov, 8.0);
    CHECK(alloc.at(0, 0) == Catch::Approx(2.6667).margin(1e-4));
    CHECK(alloc.at(0, 1) == Catch::Approx(2.0).margin(1e-4));
    CHECK(alloc.at(1, 0) == Catch::Approx(2.0).margin(1e-4));
    CHECK(alloc.at(1, 1) == Catch::Approx(1.3333).margin(1e-4));
}

TEST_CASE("pyramid allocation matches the brute-force oracle") {
    std::mt19937_64 rng(73);
    const TileGrid grids[] = {TileGrid(8, 8, 3840, 1920), TileGrid(4, 6, 1200, 400), TileGrid(3, 5, 1000, 300)};
    for (const auto& g : grids) {
        const PlayerFov fov{g.frame_width / 5, g.frame_height / 5};
        std::uniform_real_distribution<double> ux(0, g.frame_width), uy(0, g.frame_height);
        for (int round = 0; round < 30; ++round) {
            std::vector<EquirectPoint> predicted;
            const int frames = 1 + static_cast<int>(rng() % 30);
            for (int f = 0; f < frames; ++f) predicted.push_back({ux(rng), uy(rng)});
            const auto alloc = allocate_pyramid(std::span<const EquirectPoint>(predicted), g, fov, 8.0);
            const auto want = oracle_pyramid(predicted, g, fov, 8.0);
            for (std::size_t i = 0; i < want.size(); ++i)
                CHECK(alloc.bitrates[i] == Catch::Approx(want[i]).margin(1e-9));
        }
    }
}

TEST_CASE("uniformly spread viewports give the uniform NABA allocation") {
    const TileGrid g(4, 4, 2400, 1200);
    const PlayerFov fov{600, 300};
    std::vector<Tile> predicted;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) predicted.push_back({r, c});
    const auto alloc = allocate_pyramid(std::span<const Tile>(predicted), g, fov, 8.0);
    const auto naba = allocate_naba(g, 8.0);
    for (std::size_t i = 0; i < alloc.bitrates.size(); ++i)
        CHECK(alloc.bitrates[i] == Catch::Approx(naba.bitrates[i]).margin(1e-9));
}

TEST_CASE("zero preferred bitrate degenerates to an all-zero allocation") {
    const TileGrid g(2, 2, 200, 100);
    const std::vector<EquirectPoint> predicted{{50, 25}};
    const auto alloc = allocate_pyramid(std::span<const EquirectPoint>(predicted), g, {10, 10}, 0.0);
    double sum = 0.0;
    for (double b : alloc.bitrates) {
        CHECK(b == 0.0);
        sum += b;
    }
    CHECK(sum == 0.0);
}

TEST_CASE("conservation: allocations sum to the preferred bitrate") {
    std::mt19937_64 rng(79);
    const TileGrid g(8, 8, 3840, 1920);
    const PlayerFov fov{600, 300};
    std::uniform_real_distribution<double> ux(0, g.frame_width), uy(0, g.frame_height), ub(0.1, 50);
    for (int round = 0; round < 1000; ++round) {
        std::vector<EquirectPoint> predicted;
        const int frames = 1 + static_cast<int>(rng() % 40);
        for (int f = 0; f < frames; ++f) predicted.push_back({ux(rng), uy(rng)});
        const double bp = ub(rng);
        const auto alloc = allocate_pyramid(std::span<const EquirectPoint>(predicted), g, fov, bp);
        double sum = 0.0;
        for (double b : alloc.bitrates) {
            sum += b;
            CHECK(b > 0.0);
        }
        CHECK(std::abs(sum - bp) / bp < 1e-9);
    }
}

TEST_CASE("the always-predicted tile holds the strict weight peak") {
    const TileGrid g(8, 8, 3840, 1920);
    const std::vector<Tile> predicted(30, Tile{5, 2});
    const auto alloc = allocate_pyramid(std::span<const Tile>(predicted), g, {600, 300}, 8.0);
    const double peak = alloc.at(5, 2);
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c)
            if (r != 5 || c != 2) CHECK(alloc.at(r, c) < peak);
}

TEST_CASE("weight decays monotonically with distance within an FoV class") {
    const TileGrid g(8, 8, 3840, 1920);
    const PlayerFov fov{600, 300};
    const std::vector<EquirectPoint> predicted{tile_center({4, 4}, g)};
    const auto alloc = allocate_pyramid(std::span<const EquirectPoint>(predicted), g, fov, 8.0);
    const auto mask = detail::fov_mask(predicted[0], g, fov, true);

    for (int pass = 0; pass < 2; ++pass) {
        const bool want_in_fov = pass == 0;
        std::vector<std::pair<int, double>> by_distance;
        for (int r = 0; r < 8; ++r)
            for (int c = 0; c < 8; ++c) {
                if (r == 4 && c == 4) continue;
                if (static_cast<bool>(mask[static_cast<std::size_t>(r) * 8 + c]) != want_in_fov) continue;
                by_distance.emplace_back(tile_distance({r, c}, {4, 4}, g), alloc.at(r, c));
            }
        std::sort(by_distance.begin(), by_distance.end());
        for (std::size_t i = 1; i < by_distance.size(); ++i)
            CHECK(by_distance[i].second <= by_distance[i - 1].second + 1e-12);
    }
}

TEST_CASE("cyclically shifting predicted tiles shifts the allocation") {
    std::mt19937_64 rng(83);
    const TileGrid g(8, 8, 3840, 1920);
    const PlayerFov fov{600, 300};
    for (int round = 0; round < 20; ++round) {
        std::vector<Tile> predicted;
        const int frames = 1 + static_cast<int>(rng() % 30);
        for (int f = 0; f < frames; ++f)
            predicted.push_back({static_cast<int>(rng() % 8), static_cast<int>(rng() % 8)});
        const int dr = static_cast<int>(rng() % 8), dc = static_cast<int>(rng() % 8);
        std::vector<Tile> shifted;
        for (const auto& t : predicted) shifted.push_back({(t.row + dr) % 8, (t.col + dc) % 8});

        const auto base = allocate_pyramid(std::span<const Tile>(predicted), g, fov, 8.0);
        const auto moved = allocate_pyramid(std::span<const Tile>(shifted), g, fov, 8.0);
        for (int r = 0; r < 8; ++r)
            for (int c = 0; c < 8; ++c)
                CHECK(moved.at((r + dr) % 8, (c + dc) % 8) == Catch::Approx(base.at(r, c)).margin(1e-9));
    }
}

TEST_CASE("naba splits the bitrate evenly") {
    const auto alloc = allocate_naba(TileGrid(8, 8, 3840, 1920), 8.0);
    for (double b : alloc.bitrates) CHECK(b == Catch::Approx(0.125));

    const auto single = allocate_naba(TileGrid(1, 1, 3840, 1920), 8.0);
    CHECK(single.bitrates.size() == 1);
    CHECK(single.bitrates[0] == Catch::Approx(8.0));

    double sum = 0.0;
    for (double b : alloc.bitrates) sum += b;
    CHECK(sum == Catch::Approx(8.0).margin(1e-12));
}
