// Copyright (c) 2026 the parima authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "parima/allocator.hpp"
#include "parima/errors.hpp"
#include "parima/predictor.hpp"
#include "parima/timeseries.hpp"

namespace parima {

enum class ModelVariant { parima, arima_only, pa_only, naba };

inline std::string_view variant_name(ModelVariant v) {
    switch (v) {
        case ModelVariant::parima: return "parima";
        case ModelVariant::arima_only: return "arima_only";
        case ModelVariant::pa_only: return "pa_only";
        case ModelVariant::naba: return "naba";
    }
    return "unknown";
}

inline ModelVariant variant_from_name(std::string_view name) {
    if (name == "parima") return ModelVariant::parima;
    if (name == "arima_only") return ModelVariant::arima_only;
    if (name == "pa_only") return ModelVariant::pa_only;
    if (name == "naba") return ModelVariant::naba;
    throw InvalidInput("unknown model variant: " + std::string(name));
}

/// One experiment's full configuration, pre-filled with the reference
/// defaults: 8x8 tiles, 1-second chunks, ARIMA orders (2,1,1)/(3,1,0),
/// C = 0.01, epsilon = 0.001, a 600x300 player and 8 Mbps.
struct ExperimentConfig {
    int grid_rows = 8;
    int grid_cols = 8;
    double frame_width = 3840.0;
    double frame_height = 1920.0;
    double player_width = 600.0;
    double player_height = 300.0;
    double preferred_bitrate_mbps = 8.0;
    int fps = 30;
    double chunk_seconds = 1.0;
    double warmup_seconds = 5.0;
    ArimaOrder order_x{2, 1, 1};
    ArimaOrder order_y{3, 1, 0};
    PaHyperParams hyper;
    std::uint64_t seed = 42;
    ModelVariant variant = ModelVariant::parima;

    int chunk_size() const { return static_cast<int>(std::lround(fps * chunk_seconds)); }
    int warmup_frames() const { return static_cast<int>(std::lround(fps * warmup_seconds)); }

    TileGrid grid() const { return TileGrid(grid_rows, grid_cols, frame_width, frame_height); }
    PlayerFov fov() const { return {player_width, player_height}; }

    PredictorConfig predictor() const {
        PredictorConfig cfg;
        cfg.frame_width = frame_width;
        cfg.frame_height = frame_height;
        cfg.chunk_size = chunk_size();
        cfg.warmup_frames = warmup_frames();
        cfg.order_x = order_x;
        cfg.order_y = order_y;
        cfg.hyper = hyper;
        cfg.seed = seed;
        return cfg;
    }

    void validate() const {
        grid(); // rejects non-divisible tile dimensions
        if (fps < 1) throw InvalidInput("config: fps must be >= 1");
        if (chunk_size() < 1) throw InvalidInput("config: chunk must span at least one frame");
        if (warmup_frames() < chunk_size()) throw InvalidInput("config: warmup must cover at least one chunk");
        if (player_width <= 0 || player_height <= 0 || player_width >= frame_width || player_height >= frame_height)
            throw InvalidInput("config: player must be smaller than the frame");
        if (preferred_bitrate_mbps < 0) throw InvalidInput("config: negative bitrate");
        if (hyper.aggressiveness <= 0 || hyper.epsilon < 0) throw InvalidInput("config: bad PA hyperparameters");
    }
};

} // namespace parima
