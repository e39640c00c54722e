// Copyright (c) 2026 the parima authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "parima/allocator.hpp"
#include "parima/config.hpp"
#include "parima/errors.hpp"
#include "parima/geometry.hpp"
#include "parima/io.hpp"
#include "parima/metrics.hpp"
#include "parima/predictor.hpp"
#include "parima/timeseries.hpp"

namespace parima {

struct ResampledTrace {
    std::vector<EquirectPoint> viewports;
    std::vector<std::string> warnings;
};

/// Converts a head trace to per-frame viewports: frame f is taken at time
/// f/fps from the nearest sample (earlier sample wins ties). Sample gaps
/// above one second are reported as warnings, not errors.
inline ResampledTrace resample_trace(const io::HeadTrace& trace, int fps, double width, double height,
                                     std::optional<double> duration_seconds = {}) {
    if (trace.samples.empty()) throw InvalidInput("resample_trace: empty trace");
    if (fps < 1) throw InvalidInput("resample_trace: fps must be >= 1");
    ResampledTrace out;

    for (std::size_t i = 1; i < trace.samples.size(); ++i) {
        const double gap = trace.samples[i].timestamp - trace.samples[i - 1].timestamp;
        if (gap > 1.0)
            out.warnings.push_back("sample gap of " + io::format_double(gap) + " s at t=" +
                                   io::format_double(trace.samples[i - 1].timestamp));
    }

    const double last = trace.samples.back().timestamp;
    const double duration = duration_seconds.value_or(last);
    if (duration < 0 || duration > last + 1.0 / fps)
        throw InvalidInput("resample_trace: trace does not span the requested duration");
    const int frames = std::max(1, static_cast<int>(std::lround(duration * fps)));

    std::size_t cursor = 0;
    int normalized = 0;
    for (int f = 0; f < frames; ++f) {
        const double t = static_cast<double>(f) / fps;
        while (cursor + 1 < trace.samples.size() &&
               std::abs(trace.samples[cursor + 1].timestamp - t) < std::abs(trace.samples[cursor].timestamp - t))
            ++cursor;
        const HeadQuaternion& q = trace.samples[cursor];
        const double norm = std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
        if (std::abs(norm - 1.0) > 1e-6) ++normalized;
        out.viewports.push_back(quaternion_to_viewport(q, width, height));
    }
    if (normalized > 0)
        out.warnings.push_back(std::to_string(normalized) + " samples off unit norm were normalized");
    return out;
}

struct ChunkTiming {
    double update_ms = 0.0;
    double predict_ms = 0.0;
    double allocate_ms = 0.0;
};

/// Everything a single experiment run produces. Tile error and object
/// contribution are NaN for variants that do not predict (naba) or do not
/// use objects (arima_only).
struct RunReport {
    ExperimentConfig config;
    QoeReport qoe;
    double mean_tile_error = std::numeric_limits<double>::quiet_NaN();
    double mean_object_contribution = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> per_chunk_tile_error;
    std::vector<double> per_chunk_object_contribution;
    std::vector<ChunkTiming> timings;
    int chunks = 0;
    int frames_consumed = 0;
};

struct ExperimentResult {
    RunReport report;
    std::vector<io::PredictionRow> predictions;   // empty for naba
    std::vector<TileAllocation> allocations;      // one per chunk
};

namespace detail {

inline double ms_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

// Densifies sparse object frames onto [0, n): slot i holds the objects of
// absolute frame i, or an empty map.
inline std::vector<ObjectFrame> densify_objects(std::span<const ObjectFrame> objects, std::size_t n) {
    std::vector<ObjectFrame> dense(n);
    for (std::size_t i = 0; i < n; ++i) dense[i].frame = static_cast<std::int64_t>(i);
    for (const auto& of : objects)
        if (of.frame >= 0 && of.frame < static_cast<std::int64_t>(n)) dense[static_cast<std::size_t>(of.frame)] = of;
    return dense;
}

inline double mean_or_nan(std::span<const double> values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

} // namespace detail

/// Runs the full client loop on one viewport trace: warm up, then per chunk
/// predict -> allocate -> score against the actual viewports -> update.
/// The variant comes from the config.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, std::span<const EquirectPoint> viewports,
                                       std::span<const ObjectFrame> objects) {
    cfg.validate();
    const int chunk_size = cfg.chunk_size();
    const int warmup = cfg.warmup_frames();
    const int total = static_cast<int>(viewports.size());
    const int chunks = (total - warmup) / chunk_size;
    if (chunks < 1) throw InvalidInput("run_experiment: inputs must cover the warmup plus at least one chunk");

    const auto dense = detail::densify_objects(objects, viewports.size());
    const TileGrid grid = cfg.grid();
    const PlayerFov fov = cfg.fov();
    const ModelVariant variant = cfg.variant;

    // Variant state.
    std::optional<PredictorSession> session;
    PaModel pa_feedback_x, pa_feedback_y;       // pa_only
    EquirectPoint feedback{0, 0};               // pa_only running predicted viewport
    std::vector<EquirectPoint> arima_history;   // arima_only

    const auto warmup_actual = viewports.first(static_cast<std::size_t>(warmup));
    const auto warmup_objects = std::span<const ObjectFrame>(dense).first(static_cast<std::size_t>(warmup));
    if (variant == ModelVariant::parima) {
        session.emplace(cfg.predictor());
        session->warmup(warmup_actual, warmup_objects);
    } else if (variant == ModelVariant::pa_only) {
        pa_feedback_x.hyper = cfg.hyper;
        pa_feedback_y.hyper = cfg.hyper;
        for (int f = 1; f < warmup; ++f) {
            const auto fx = axis_features(dense[static_cast<std::size_t>(f)], true);
            const auto fy = axis_features(dense[static_cast<std::size_t>(f)], false);
            pa_feedback_x.update(viewports[static_cast<std::size_t>(f - 1)].x, fx, viewports[static_cast<std::size_t>(f)].x);
            pa_feedback_y.update(viewports[static_cast<std::size_t>(f - 1)].y, fy, viewports[static_cast<std::size_t>(f)].y);
        }
        feedback = viewports[static_cast<std::size_t>(warmup - 1)];
    } else if (variant == ModelVariant::arima_only) {
        arima_history.assign(viewports.begin() + warmup - chunk_size, viewports.begin() + warmup);
    }

    ExperimentResult result;
    result.report.config = cfg;
    std::vector<ChunkRecord> records;
    std::vector<double> flat_tile_errors;
    std::vector<double> flat_contributions;

    for (int c = 0; c < chunks; ++c) {
        const int base = warmup + c * chunk_size;
        const auto actual = viewports.subspan(static_cast<std::size_t>(base), static_cast<std::size_t>(chunk_size));
        const auto chunk_objects =
            std::span<const ObjectFrame>(dense).subspan(static_cast<std::size_t>(base), static_cast<std::size_t>(chunk_size));

        ChunkTiming timing;
        std::vector<EquirectPoint> predicted;
        std::vector<double> contributions;
        std::vector<EquirectPoint> pa_inputs; // pa_only: feedback consumed per frame

        // Predict.
        auto t0 = std::chrono::steady_clock::now();
        if (variant == ModelVariant::parima) {
            const auto chunk = session->predict_chunk(chunk_objects);
            for (const auto& p : chunk) {
                predicted.push_back({p.x, p.y});
                contributions.push_back(p.object_contribution);
            }
        } else if (variant == ModelVariant::arima_only) {
            std::vector<double> xs, ys;
            for (const auto& p : arima_history) {
                xs.push_back(p.x);
                ys.push_back(p.y);
            }
            const auto tx = apply_transforms(xs, cfg.frame_width,
                                             detail::derive_seed(cfg.seed, static_cast<std::uint64_t>(c), 0), true);
            const auto ty = apply_transforms(ys, cfg.frame_width,
                                             detail::derive_seed(cfg.seed, static_cast<std::uint64_t>(c), 1), false);
            const auto ix = invert_forecast(forecast(fit(tx.values, cfg.order_x), chunk_size), tx.chain, cfg.frame_width);
            const auto iy = invert_forecast(forecast(fit(ty.values, cfg.order_y), chunk_size), ty.chain, cfg.frame_width);
            for (int f = 0; f < chunk_size; ++f)
                predicted.push_back({wrap_positive(ix[static_cast<std::size_t>(f)], cfg.frame_width),
                                     std::clamp(iy[static_cast<std::size_t>(f)], 0.0, cfg.frame_height - 1.0)});
        } else if (variant == ModelVariant::pa_only) {
            for (int f = 0; f < chunk_size; ++f) {
                const auto& of = chunk_objects[static_cast<std::size_t>(f)];
                const auto fx = axis_features(of, true);
                const auto fy = axis_features(of, false);
                pa_inputs.push_back(feedback);
                const EquirectPoint p{wrap_positive(pa_feedback_x.predict(feedback.x, fx), cfg.frame_width),
                                      std::clamp(pa_feedback_y.predict(feedback.y, fy), 0.0, cfg.frame_height - 1.0)};
                contributions.push_back(pa_feedback_x.contribution(feedback.x, fx));
                predicted.push_back(p);
                feedback = p; // the predicted output feeds the next frame
            }
        }
        timing.predict_ms = detail::ms_since(t0);

        // Allocate.
        t0 = std::chrono::steady_clock::now();
        TileAllocation allocation =
            variant == ModelVariant::naba
                ? allocate_naba(grid, cfg.preferred_bitrate_mbps)
                : allocate_pyramid(std::span<const EquirectPoint>(predicted), grid, fov, cfg.preferred_bitrate_mbps);
        timing.allocate_ms = detail::ms_since(t0);

        // Score.
        ChunkRecord rec;
        rec.chunk = c;
        rec.actual.assign(actual.begin(), actual.end());
        rec.allocation = allocation;
        rec.fov = fov;
        rec.grid = grid;
        records.push_back(std::move(rec));

        if (!predicted.empty()) {
            double err_sum = 0.0;
            for (int f = 0; f < chunk_size; ++f) {
                const int err = manhattan_tile_error(viewport_to_tile(actual[static_cast<std::size_t>(f)], grid),
                                                     viewport_to_tile(predicted[static_cast<std::size_t>(f)], grid), grid);
                err_sum += err;
                flat_tile_errors.push_back(err);
                io::PredictionRow row;
                row.chunk = c;
                row.frame = base + f;
                row.pred_x = predicted[static_cast<std::size_t>(f)].x;
                row.pred_y = predicted[static_cast<std::size_t>(f)].y;
                row.actual_x = actual[static_cast<std::size_t>(f)].x;
                row.actual_y = actual[static_cast<std::size_t>(f)].y;
                row.obj_contrib = contributions.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                        : contributions[static_cast<std::size_t>(f)];
                result.predictions.push_back(row);
            }
            result.report.per_chunk_tile_error.push_back(err_sum / chunk_size);
        }
        if (!contributions.empty()) {
            result.report.per_chunk_object_contribution.push_back(detail::mean_or_nan(contributions));
            for (double v : contributions) flat_contributions.push_back(v);
        }

        // Update from the rendered chunk.
        t0 = std::chrono::steady_clock::now();
        if (variant == ModelVariant::parima) {
            session->observe_chunk(actual, chunk_objects);
        } else if (variant == ModelVariant::arima_only) {
            arima_history.assign(actual.begin(), actual.end());
        } else if (variant == ModelVariant::pa_only) {
            for (int f = 0; f < chunk_size; ++f) {
                const auto& of = chunk_objects[static_cast<std::size_t>(f)];
                const auto& prev = pa_inputs[static_cast<std::size_t>(f)];
                pa_feedback_x.update(prev.x, axis_features(of, true), actual[static_cast<std::size_t>(f)].x);
                pa_feedback_y.update(prev.y, axis_features(of, false), actual[static_cast<std::size_t>(f)].y);
            }
        }
        timing.update_ms = detail::ms_since(t0);

        result.report.timings.push_back(timing);
        result.allocations.push_back(std::move(allocation));
    }

    result.report.chunks = chunks;
    result.report.frames_consumed = warmup + chunks * chunk_size;
    if (result.report.frames_consumed > total)
        throw Error("run_experiment: chunk accounting overran the input");
    result.report.qoe = aggregate_qoe(records);
    result.report.qoe.mean_tile_error = detail::mean_or_nan(flat_tile_errors);
    result.report.mean_tile_error = result.report.qoe.mean_tile_error;
    result.report.mean_object_contribution = detail::mean_or_nan(flat_contributions);
    return result;
}

// ---------------------------------------------------------------------
// Variant comparison
// ---------------------------------------------------------------------

struct ComparisonRow {
    std::string variant;
    double aggregate_q = 0.0;
    double q1_sum = 0.0;
    double mean_tile_error = std::numeric_limits<double>::quiet_NaN();
    double mean_object_contribution = std::numeric_limits<double>::quiet_NaN();
};

struct ComparisonResult {
    std::vector<ComparisonRow> rows;
    std::vector<RunReport> reports; // same order as rows; carries timings
};

/// Runs every requested variant on identical inputs and seeds.
inline ComparisonResult compare_variants(const ExperimentConfig& base, std::span<const ModelVariant> variants,
                                         std::span<const EquirectPoint> viewports,
                                         std::span<const ObjectFrame> objects) {
    ComparisonResult out;
    for (const ModelVariant v : variants) {
        ExperimentConfig cfg = base;
        cfg.variant = v;
        auto result = run_experiment(cfg, viewports, objects);
        ComparisonRow row;
        row.variant = std::string(variant_name(v));
        row.aggregate_q = result.report.qoe.aggregate_q;
        double q1_sum = 0.0;
        for (const auto& c : result.report.qoe.chunks) q1_sum += c.q1;
        row.q1_sum = q1_sum;
        row.mean_tile_error = result.report.mean_tile_error;
        row.mean_object_contribution = result.report.mean_object_contribution;
        out.rows.push_back(std::move(row));
        out.reports.push_back(std::move(result.report));
    }
    return out;
}

// ---------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------

namespace detail {

inline std::string csv_cell(double v) {
    return std::isnan(v) ? std::string() : io::format_double(v);
}

inline nlohmann::json json_number(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

} // namespace detail

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    return {
        {"grid_rows", cfg.grid_rows},
        {"grid_cols", cfg.grid_cols},
        {"frame_width", cfg.frame_width},
        {"frame_height", cfg.frame_height},
        {"player_width", cfg.player_width},
        {"player_height", cfg.player_height},
        {"preferred_bitrate_mbps", cfg.preferred_bitrate_mbps},
        {"fps", cfg.fps},
        {"chunk_seconds", cfg.chunk_seconds},
        {"warmup_seconds", cfg.warmup_seconds},
        {"order_x", {cfg.order_x.p, cfg.order_x.d, cfg.order_x.q}},
        {"order_y", {cfg.order_y.p, cfg.order_y.d, cfg.order_y.q}},
        {"pa_c", cfg.hyper.aggressiveness},
        {"pa_epsilon", cfg.hyper.epsilon},
        {"pa_alpha", cfg.hyper.alpha},
        {"seed", cfg.seed},
        {"variant", std::string(variant_name(cfg.variant))},
    };
}

inline nlohmann::json qoe_to_json(const QoeReport& qoe) {
    nlohmann::json chunks = {{"q1", nlohmann::json::array()},
                             {"q2", nlohmann::json::array()},
                             {"q3", nlohmann::json::array()},
                             {"q4", nlohmann::json::array()}};
    for (const auto& c : qoe.chunks) {
        chunks["q1"].push_back(c.q1);
        chunks["q2"].push_back(c.q2);
        chunks["q3"].push_back(c.q3);
        chunks["q4"].push_back(c.q4);
    }
    return {{"schema", "parima.qoe_report"},
            {"schema_version", 1},
            {"chunks", chunks},
            {"aggregate_q", qoe.aggregate_q},
            {"mean_tile_error", detail::json_number(qoe.mean_tile_error)}};
}

/// Deterministic by default; wall-clock timings only appear on request.
inline nlohmann::json report_to_json(const RunReport& report, bool include_timings = false) {
    nlohmann::json j{{"schema", "parima.run_report"},
                     {"schema_version", 1},
                     {"config", config_to_json(report.config)},
                     {"qoe", qoe_to_json(report.qoe)},
                     {"mean_tile_error", detail::json_number(report.mean_tile_error)},
                     {"mean_object_contribution", detail::json_number(report.mean_object_contribution)},
                     {"per_chunk_tile_error", report.per_chunk_tile_error},
                     {"per_chunk_object_contribution", report.per_chunk_object_contribution},
                     {"chunks", report.chunks},
                     {"frames_consumed", report.frames_consumed}};
    if (include_timings) {
        nlohmann::json timings = nlohmann::json::array();
        for (const auto& t : report.timings)
            timings.push_back({{"update_ms", t.update_ms}, {"predict_ms", t.predict_ms}, {"allocate_ms", t.allocate_ms}});
        j["timings"] = timings;
    }
    return j;
}

inline std::string comparison_to_csv(const ComparisonResult& cmp) {
    std::string out = "# parima.compare v1\n";
    out += "variant,aggregate_q,q1_sum,mean_tile_error,mean_obj_contribution\n";
    for (const auto& row : cmp.rows) {
        out += row.variant;
        out += ',';
        out += io::format_double(row.aggregate_q);
        out += ',';
        out += io::format_double(row.q1_sum);
        out += ',';
        out += detail::csv_cell(row.mean_tile_error);
        out += ',';
        out += detail::csv_cell(row.mean_object_contribution);
        out += '\n';
    }
    return out;
}

inline nlohmann::json comparison_to_json(const ComparisonResult& cmp, const ExperimentConfig& base) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : cmp.rows)
        rows.push_back({{"variant", row.variant},
                        {"aggregate_q", row.aggregate_q},
                        {"q1_sum", row.q1_sum},
                        {"mean_tile_error", detail::json_number(row.mean_tile_error)},
                        {"mean_obj_contribution", detail::json_number(row.mean_object_contribution)}});
    return {{"schema", "parima.compare"}, {"schema_version", 1}, {"config", config_to_json(base)}, {"rows", rows}};
}

} // namespace parima
