// Copyright (c) 2026 the parima authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "parima/errors.hpp"
#include "parima/geometry.hpp"
#include "parima/timeseries.hpp"

namespace parima {

/// Passive-Aggressive regression hyperparameters. alpha scales the update
/// step; the standard rule uses 1.
struct PaHyperParams {
    double aggressiveness = 0.01; // C
    double epsilon = 0.001;       // hinge tolerance
    double alpha = 1.0;
};

/// Online linear model over (bias, intermediate viewport, object positions).
/// Object IDs never seen keep an implicit weight of exactly 0.
struct PaModel {
    double bias = 0.0;
    double w_intermediate = 0.0;
    std::map<int, double> w_objects;
    PaHyperParams hyper;

    double predict(double intermediate, const std::map<int, double>& objects) const {
        double out = bias + w_intermediate * intermediate;
        for (const auto& [id, value] : objects) {
            const auto it = w_objects.find(id);
            if (it != w_objects.end()) out += it->second * value;
        }
        return out;
    }

    /// Hinge-loss PA update. Inside the epsilon dead zone the model is
    /// untouched; otherwise every present feature moves by
    /// alpha * loss / (||x||^2 + 1/(2C)) in the sign of the error.
    void update(double intermediate, const std::map<int, double>& objects, double target) {
        const double predicted = predict(intermediate, objects);
        const double loss = std::abs(target - predicted) - hyper.epsilon;
        if (loss <= 0.0) return;
        double norm2 = 1.0 + intermediate * intermediate;
        for (const auto& [id, value] : objects) norm2 += value * value;
        const double tau = hyper.alpha * loss / (norm2 + 1.0 / (2.0 * hyper.aggressiveness));
        const double step = target > predicted ? tau : -tau;
        bias += step;
        w_intermediate += step * intermediate;
        for (const auto& [id, value] : objects) w_objects[id] += step * value;
    }

    /// Share of the prediction magnitude explained by object positions.
    double contribution(double intermediate, const std::map<int, double>& objects) const {
        double object_term = 0.0;
        for (const auto& [id, value] : objects) {
            const auto it = w_objects.find(id);
            if (it != w_objects.end()) object_term += it->second * value;
        }
        const double base_term = bias + w_intermediate * intermediate;
        const double denom = std::abs(object_term) + std::abs(base_term);
        return denom == 0.0 ? 0.0 : std::abs(object_term) / denom;
    }
};

/// Object positions visible in one frame, keyed by track ID.
struct ObjectFrame {
    std::int64_t frame = 0;
    std::map<int, EquirectPoint> coords;
};

struct PredictorConfig {
    double frame_width = 3840.0;
    double frame_height = 1920.0;
    int chunk_size = 30;      // frames per chunk (fps for 1-second chunks)
    int warmup_frames = 150;  // 5 * fps
    ArimaOrder order_x{2, 1, 1};
    ArimaOrder order_y{3, 1, 0};
    PaHyperParams hyper;
    std::uint64_t seed = 0;
};

struct PredictedViewport {
    double x = 0.0;
    double y = 0.0;
    double intermediate_x = 0.0;
    double intermediate_y = 0.0;
    double object_contribution = 0.0; // x-coordinate share, per frame
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(base ^ (a * 0x9e3779b97f4a7c15ULL)) ^ b);
}

} // namespace detail

/// Per-axis feature map of one frame's objects: ID -> x (or y) pixel.
inline std::map<int, double> axis_features(const ObjectFrame& frame, bool horizontal) {
    std::map<int, double> out;
    for (const auto& [id, pt] : frame.coords) out[id] = horizontal ? pt.x : pt.y;
    return out;
}

namespace detail {

inline std::map<int, double> axis_features(const ObjectFrame* frame, bool horizontal) {
    if (!frame) return {};
    return parima::axis_features(*frame, horizontal);
}

} // namespace detail

/// One user's online prediction session: a fresh ARIMA pair per chunk for
/// the intermediate viewport, a persistent PA pair fused on top. Alternate
/// predict_chunk / observe_chunk after the initial warmup.
class PredictorSession {
public:
    PaModel pa_x;
    PaModel pa_y;

    explicit PredictorSession(PredictorConfig cfg) : cfg_(cfg) {
        if (cfg_.chunk_size < 1) throw InvalidInput("PredictorSession: chunk_size must be >= 1");
        if (cfg_.warmup_frames < cfg_.chunk_size)
            throw InvalidInput("PredictorSession: warmup must cover at least one chunk");
        if (cfg_.frame_width <= 0 || cfg_.frame_height <= 0)
            throw InvalidInput("PredictorSession: bad frame dims");
        pa_x.hyper = cfg_.hyper;
        pa_y.hyper = cfg_.hyper;
    }

    const PredictorConfig& config() const { return cfg_; }
    bool warmed_up() const { return warmed_; }
    std::span<const EquirectPoint> history() const { return history_; }

    /// Initial training pass: each frame's feature is the previous frame's
    /// actual viewport, the standard stand-in before any forecast exists.
    void warmup(std::span<const EquirectPoint> actual, std::span<const ObjectFrame> objects) {
        if (warmed_) throw InvalidState("warmup: session already warmed up");
        if (static_cast<int>(actual.size()) < cfg_.warmup_frames)
            throw InsufficientData("warmup: fewer frames than the warm-up length");
        for (std::size_t f = 1; f < actual.size(); ++f) {
            const ObjectFrame* of = f < objects.size() ? &objects[f] : nullptr;
            pa_x.update(actual[f - 1].x, detail::axis_features(of, true), actual[f].x);
            pa_y.update(actual[f - 1].y, detail::axis_features(of, false), actual[f].y);
        }
        history_.assign(actual.end() - cfg_.chunk_size, actual.end());
        warmed_ = true;
    }

    /// Predicts the next chunk from the previous chunk's actual viewports
    /// and the object positions of the upcoming frames. Frames with no
    /// object data are treated as empty object maps.
    std::vector<PredictedViewport> predict_chunk(std::span<const ObjectFrame> objects) {
        if (!warmed_) throw InvalidState("predict_chunk: warmup required");
        std::vector<double> xs, ys;
        xs.reserve(history_.size());
        ys.reserve(history_.size());
        for (const auto& p : history_) {
            xs.push_back(p.x);
            ys.push_back(p.y);
        }
        const auto tx = apply_transforms(xs, cfg_.frame_width,
                                         detail::derive_seed(cfg_.seed, static_cast<std::uint64_t>(chunk_index_), 0), true);
        const auto ty = apply_transforms(ys, cfg_.frame_width,
                                         detail::derive_seed(cfg_.seed, static_cast<std::uint64_t>(chunk_index_), 1), false);
        const auto mx = fit(tx.values, cfg_.order_x);
        const auto my = fit(ty.values, cfg_.order_y);
        pending_int_x_ = invert_forecast(forecast(mx, cfg_.chunk_size), tx.chain, cfg_.frame_width);
        pending_int_y_ = invert_forecast(forecast(my, cfg_.chunk_size), ty.chain, cfg_.frame_width);

        std::vector<PredictedViewport> out;
        out.reserve(static_cast<std::size_t>(cfg_.chunk_size));
        for (int f = 0; f < cfg_.chunk_size; ++f) {
            const ObjectFrame* of = static_cast<std::size_t>(f) < objects.size() ? &objects[static_cast<std::size_t>(f)] : nullptr;
            const auto fx = detail::axis_features(of, true);
            const auto fy = detail::axis_features(of, false);
            PredictedViewport p;
            p.intermediate_x = pending_int_x_[static_cast<std::size_t>(f)];
            p.intermediate_y = pending_int_y_[static_cast<std::size_t>(f)];
            p.x = wrap_positive(pa_x.predict(p.intermediate_x, fx), cfg_.frame_width);
            p.y = std::clamp(pa_y.predict(p.intermediate_y, fy), 0.0, cfg_.frame_height - 1.0);
            p.object_contribution = pa_x.contribution(p.intermediate_x, fx);
            out.push_back(p);
        }
        ++chunk_index_;
        return out;
    }

    /// Consumes the rendered chunk's actual viewports: one PA update per
    /// frame, in order, against the features used at prediction time.
    void observe_chunk(std::span<const EquirectPoint> actual, std::span<const ObjectFrame> objects) {
        if (!warmed_) throw InvalidState("observe_chunk: warmup required");
        if (pending_int_x_.empty()) throw InvalidState("observe_chunk: no preceding predict_chunk");
        if (static_cast<int>(actual.size()) != cfg_.chunk_size)
            throw InvalidInput("observe_chunk: chunk length mismatch");
        for (int f = 0; f < cfg_.chunk_size; ++f) {
            const ObjectFrame* of = static_cast<std::size_t>(f) < objects.size() ? &objects[static_cast<std::size_t>(f)] : nullptr;
            pa_x.update(pending_int_x_[static_cast<std::size_t>(f)], detail::axis_features(of, true),
                        actual[static_cast<std::size_t>(f)].x);
            pa_y.update(pending_int_y_[static_cast<std::size_t>(f)], detail::axis_features(of, false),
                        actual[static_cast<std::size_t>(f)].y);
        }
        history_.assign(actual.begin(), actual.end());
        pending_int_x_.clear();
        pending_int_y_.clear();
    }

    /// X-coordinate object-contribution of this session's PA model for the
    /// given frame features and intermediate value.
    double object_contribution(const ObjectFrame& objects, double intermediate) const {
        return pa_x.contribution(intermediate, detail::axis_features(&objects, true));
    }

private:
    PredictorConfig cfg_;
    std::vector<EquirectPoint> history_;
    std::vector<double> pending_int_x_;
    std::vector<double> pending_int_y_;
    int chunk_index_ = 0;
    bool warmed_ = false;
};

} // namespace parima
