// Copyright (c) 2026 the parima authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).
//
// Command-line harness around the library: object tracking, viewport
// prediction, bitrate allocation, QoE evaluation, variant comparison and
// synthetic trace generation. All outputs are versioned CSV/JSON; failures
// exit nonzero with an error JSON on stderr.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "parima/config.hpp"
#include "parima/harness.hpp"
#include "parima/io.hpp"
#include "parima/synthetic.hpp"
#include "parima/tracker.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOptions {
    parima::ExperimentConfig cfg;
    std::string variant = "parima";
    std::string arima_x = "2,1,1";
    std::string arima_y = "3,1,0";
};

parima::ArimaOrder parse_order(const std::string& text) {
    int p = 0, d = 0, q = 0;
    if (std::sscanf(text.c_str(), "%d,%d,%d", &p, &d, &q) != 3)
        throw parima::InvalidInput("bad ARIMA order '" + text + "', expected p,d,q");
    return {p, d, q};
}

void add_config_flags(CLI::App* cmd, CommonOptions& opts) {
    auto& cfg = opts.cfg;
    cmd->add_option("--width", cfg.frame_width, "Frame width in px");
    cmd->add_option("--height", cfg.frame_height, "Frame height in px");
    cmd->add_option("--rows", cfg.grid_rows, "Tile rows");
    cmd->add_option("--cols", cfg.grid_cols, "Tile columns");
    cmd->add_option("--player-width", cfg.player_width, "Player FoV width in px");
    cmd->add_option("--player-height", cfg.player_height, "Player FoV height in px");
    cmd->add_option("--bitrate", cfg.preferred_bitrate_mbps, "Preferred bitrate in Mbps");
    cmd->add_option("--fps", cfg.fps, "Frames per second");
    cmd->add_option("--chunk-seconds", cfg.chunk_seconds, "Chunk duration in seconds");
    cmd->add_option("--warmup-seconds", cfg.warmup_seconds, "Warm-up duration in seconds");
    cmd->add_option("--arima-x", opts.arima_x, "ARIMA order p,d,q for x");
    cmd->add_option("--arima-y", opts.arima_y, "ARIMA order p,d,q for y");
    cmd->add_option("--pa-c", cfg.hyper.aggressiveness, "PA aggressiveness C");
    cmd->add_option("--pa-epsilon", cfg.hyper.epsilon, "PA hinge tolerance");
    cmd->add_option("--pa-alpha", cfg.hyper.alpha, "PA step scale");
    cmd->add_option("--seed", cfg.seed, "RNG seed");
    cmd->add_option("--variant", opts.variant, "Model variant: parima|arima_only|pa_only|naba");
}

parima::ExperimentConfig finalize_config(CommonOptions& opts) {
    opts.cfg.order_x = parse_order(opts.arima_x);
    opts.cfg.order_y = parse_order(opts.arima_y);
    opts.cfg.variant = parima::variant_from_name(opts.variant);
    opts.cfg.validate();
    return opts.cfg;
}

std::string out_path(const std::string& dir, const std::string& name) {
    fs::create_directories(dir);
    return (fs::path(dir) / name).string();
}

void warn_all(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

// Loads per-frame viewports either directly or by resampling a head trace.
std::vector<parima::EquirectPoint> load_viewports(const std::string& viewports_path,
                                                  const std::string& trace_path,
                                                  const parima::ExperimentConfig& cfg) {
    if (viewports_path.empty() == trace_path.empty())
        throw parima::InvalidInput("provide exactly one of --viewports or --trace");
    if (!viewports_path.empty()) {
        auto in = parima::io::open_input(viewports_path);
        return parima::io::read_viewports(in);
    }
    auto in = parima::io::open_input(trace_path);
    const auto trace = parima::io::read_head_trace(in);
    auto res = parima::resample_trace(trace, cfg.fps, cfg.frame_width, cfg.frame_height);
    warn_all(res.warnings);
    return std::move(res.viewports);
}

std::vector<parima::ObjectFrame> load_objects(const std::string& path) {
    if (path.empty()) return {};
    auto in = parima::io::open_input(path);
    return parima::io::read_trajectories(in);
}

// ---------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------

int cmd_track(const std::string& detections_path, const std::string& out,
              double width, double height, int deactivate_after, double max_angle) {
    auto in = parima::io::open_input(detections_path);
    const auto detections = parima::io::read_detections(in);
    parima::TrackerConfig cfg{deactivate_after, max_angle};
    const auto tracks = parima::run_tracker(detections, width, height, cfg);
    auto os = parima::io::open_output(out);
    parima::io::write_trajectories(os, tracks);
    std::cerr << "tracked " << tracks.size() << " objects over " << detections.size() << " detections\n";
    return 0;
}

int cmd_synth(const std::string& scenario, double seconds, double noise, CommonOptions& opts,
              const std::string& out_dir) {
    const auto cfg = finalize_config(opts);
    const int frames = static_cast<int>(std::lround(seconds * cfg.fps));
    const auto trace = parima::generate_synthetic(parima::scenario_from_name(scenario), frames,
                                                  cfg.frame_width, cfg.frame_height, cfg.seed, noise);
    {
        auto os = parima::io::open_output(out_path(out_dir, "viewports.csv"));
        parima::io::write_viewports(os, trace.viewports);
    }
    {
        auto os = parima::io::open_output(out_path(out_dir, "trajectories.csv"));
        parima::io::write_object_frames(os, trace.objects);
    }
    return 0;
}

int cmd_predict(const std::string& trajectories, const std::string& viewports_path,
                const std::string& trace_path, CommonOptions& opts, const std::string& out_dir) {
    const auto cfg = finalize_config(opts);
    if (cfg.variant == parima::ModelVariant::naba)
        throw parima::InvalidInput("the naba variant performs no prediction");
    const auto viewports = load_viewports(viewports_path, trace_path, cfg);
    const auto objects = load_objects(trajectories);
    const auto result = parima::run_experiment(cfg, viewports, objects);
    {
        auto os = parima::io::open_output(out_path(out_dir, "predictions.csv"));
        parima::io::write_predictions(os, result.predictions);
    }
    {
        auto os = parima::io::open_output(out_path(out_dir, "run_report.json"));
        os << parima::report_to_json(result.report, /*include_timings=*/true).dump(2) << '\n';
    }
    return 0;
}

int cmd_allocate(const std::string& predictions_path, const std::string& scheme, CommonOptions& opts,
                 const std::string& out) {
    const auto cfg = finalize_config(opts);
    if (scheme != "pyramid" && scheme != "naba")
        throw parima::InvalidInput("allocate: unknown scheme '" + scheme + "'");
    auto in = parima::io::open_input(predictions_path);
    const auto rows = parima::io::read_predictions(in);
    if (rows.empty()) throw parima::InvalidInput("allocate: no prediction rows");
    const auto grid = cfg.grid();
    const auto fov = cfg.fov();

    std::vector<parima::TileAllocation> allocations;
    std::vector<parima::EquirectPoint> chunk_points;
    int current = rows.front().chunk;
    auto flush = [&] {
        if (chunk_points.empty()) return;
        allocations.push_back(scheme == "naba"
                                  ? parima::allocate_naba(grid, cfg.preferred_bitrate_mbps)
                                  : parima::allocate_pyramid(std::span<const parima::EquirectPoint>(chunk_points),
                                                             grid, fov, cfg.preferred_bitrate_mbps));
        chunk_points.clear();
    };
    for (const auto& r : rows) {
        if (r.chunk != current) {
            flush();
            current = r.chunk;
        }
        chunk_points.push_back({r.pred_x, r.pred_y});
    }
    flush();

    auto os = parima::io::open_output(out);
    parima::io::write_allocations(os, allocations);
    return 0;
}

int cmd_evaluate(const std::string& predictions_path, const std::string& allocations_path,
                 CommonOptions& opts, const std::string& out) {
    const auto cfg = finalize_config(opts);
    const auto grid = cfg.grid();
    auto pin = parima::io::open_input(predictions_path);
    const auto rows = parima::io::read_predictions(pin);
    if (rows.empty()) throw parima::InvalidInput("evaluate: no prediction rows");
    auto ain = parima::io::open_input(allocations_path);
    const auto allocations = parima::io::read_allocations(ain, cfg.grid_rows, cfg.grid_cols);

    std::vector<parima::ChunkRecord> records;
    double err_sum = 0.0;
    for (const auto& r : rows) {
        if (r.chunk < 0 || r.chunk >= static_cast<int>(allocations.size()))
            throw parima::InvalidInput("evaluate: prediction chunk " + std::to_string(r.chunk) +
                                       " has no allocation");
        if (r.chunk == static_cast<int>(records.size())) {
            parima::ChunkRecord rec;
            rec.chunk = r.chunk;
            rec.allocation = allocations[static_cast<std::size_t>(r.chunk)];
            rec.fov = cfg.fov();
            rec.grid = grid;
            records.push_back(std::move(rec));
        }
        records.back().actual.push_back({r.actual_x, r.actual_y});
        err_sum += parima::manhattan_tile_error(parima::viewport_to_tile({r.actual_x, r.actual_y}, grid),
                                                parima::viewport_to_tile({r.pred_x, r.pred_y}, grid), grid);
    }
    auto report = parima::aggregate_qoe(records);
    report.mean_tile_error = err_sum / static_cast<double>(rows.size());

    auto os = parima::io::open_output(out);
    os << parima::qoe_to_json(report).dump(2) << '\n';
    return 0;
}

int cmd_compare(const std::string& scenario, double seconds, double noise, const std::string& viewports_path,
                const std::string& trajectories_path, const std::string& variants_csv, CommonOptions& opts,
                const std::string& out_dir, const std::string& timing_report) {
    const auto cfg = finalize_config(opts);

    std::vector<parima::EquirectPoint> viewports;
    std::vector<parima::ObjectFrame> objects;
    if (!scenario.empty()) {
        const int frames = static_cast<int>(std::lround(seconds * cfg.fps));
        auto trace = parima::generate_synthetic(parima::scenario_from_name(scenario), frames,
                                                cfg.frame_width, cfg.frame_height, cfg.seed, noise);
        viewports = std::move(trace.viewports);
        objects = std::move(trace.objects);
    } else if (!viewports_path.empty()) {
        auto in = parima::io::open_input(viewports_path);
        viewports = parima::io::read_viewports(in);
        objects = load_objects(trajectories_path);
    } else {
        throw parima::InvalidInput("compare: provide --scenario or --viewports");
    }

    std::vector<parima::ModelVariant> variants;
    std::stringstream ss(variants_csv);
    std::string name;
    while (std::getline(ss, name, ',')) variants.push_back(parima::variant_from_name(name));
    if (variants.empty()) throw parima::InvalidInput("compare: empty variant list");

    const auto cmp = parima::compare_variants(cfg, variants, viewports, objects);
    {
        auto os = parima::io::open_output(out_path(out_dir, "compare.csv"));
        os << parima::comparison_to_csv(cmp);
    }
    {
        auto os = parima::io::open_output(out_path(out_dir, "compare.json"));
        os << parima::comparison_to_json(cmp, cfg).dump(2) << '\n';
    }
    if (!timing_report.empty()) {
        json reports = json::array();
        for (const auto& r : cmp.reports) reports.push_back(parima::report_to_json(r, true));
        auto os = parima::io::open_output(timing_report);
        os << reports.dump(2) << '\n';
    }
    std::cout << parima::comparison_to_csv(cmp);
    return 0;
}

int fail(const std::string& kind, const std::string& message) {
    std::cerr << json{{"error", {{"type", kind}, {"message", message}}}}.dump() << '\n';
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Viewport-adaptive 360-degree streaming harness"};
    app.require_subcommand(1);

    CommonOptions opts;

    // track
    std::string detections_path, track_out = "trajectories.csv";
    double track_width = 3840, track_height = 1920, max_angle = parima::pi;
    int deactivate_after = 30;
    auto* track = app.add_subcommand("track", "Assign stable object IDs to detection boxes");
    track->add_option("--detections", detections_path, "Detection CSV")->required();
    track->add_option("--out", track_out, "Output trajectory CSV");
    track->add_option("--width", track_width, "Frame width in px");
    track->add_option("--height", track_height, "Frame height in px");
    track->add_option("--deactivate-after", deactivate_after, "Missed frames before a track dies");
    track->add_option("--max-match-angle", max_angle, "Matching cap in radians");

    // synth
    std::string scenario, out_dir = ".";
    double seconds = 60.0, noise = 15.0;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic viewing scenario");
    synth->add_option("--scenario", scenario, "object_follower|wanderer|seam_crosser")->required();
    synth->add_option("--seconds", seconds, "Trace length in seconds");
    synth->add_option("--noise", noise, "Follower noise sigma in px");
    synth->add_option("--out-dir", out_dir, "Output directory");
    add_config_flags(synth, opts);

    // predict
    std::string trajectories_path, viewports_path, trace_path;
    auto* predict = app.add_subcommand("predict", "Predict per-chunk viewports");
    predict->add_option("--trajectories", trajectories_path, "Object trajectory CSV");
    predict->add_option("--viewports", viewports_path, "Per-frame viewport CSV");
    predict->add_option("--trace", trace_path, "Quaternion head-trace CSV");
    predict->add_option("--out-dir", out_dir, "Output directory");
    add_config_flags(predict, opts);

    // allocate
    std::string predictions_path, alloc_out = "allocations.csv", scheme = "pyramid";
    auto* allocate = app.add_subcommand("allocate", "Assign per-tile bitrates from predictions");
    allocate->add_option("--predictions", predictions_path, "Prediction CSV")->required();
    allocate->add_option("--scheme", scheme, "pyramid|naba");
    allocate->add_option("--out", alloc_out, "Output allocation CSV");
    add_config_flags(allocate, opts);

    // evaluate
    std::string allocations_path, eval_out = "qoe_report.json";
    auto* evaluate = app.add_subcommand("evaluate", "Score allocations against actual viewports");
    evaluate->add_option("--predictions", predictions_path, "Prediction CSV")->required();
    evaluate->add_option("--allocations", allocations_path, "Allocation CSV")->required();
    evaluate->add_option("--out", eval_out, "Output QoE JSON");
    add_config_flags(evaluate, opts);

    // compare
    std::string variants_csv = "parima,arima_only,pa_only,naba", timing_report;
    auto* compare = app.add_subcommand("compare", "Run several variants on identical inputs");
    compare->add_option("--scenario", scenario, "object_follower|wanderer|seam_crosser");
    compare->add_option("--seconds", seconds, "Synthetic trace length in seconds");
    compare->add_option("--noise", noise, "Follower noise sigma in px");
    compare->add_option("--viewports", viewports_path, "Per-frame viewport CSV");
    compare->add_option("--trajectories", trajectories_path, "Object trajectory CSV");
    compare->add_option("--variants", variants_csv, "Comma-separated variant list");
    compare->add_option("--out-dir", out_dir, "Output directory");
    compare->add_option("--timing-report", timing_report, "Optional per-chunk timing JSON path");
    add_config_flags(compare, opts);

    try {
        app.parse(argc, argv);
        if (*track) return cmd_track(detections_path, track_out, track_width, track_height, deactivate_after, max_angle);
        if (*synth) return cmd_synth(scenario, seconds, noise, opts, out_dir);
        if (*predict) return cmd_predict(trajectories_path, viewports_path, trace_path, opts, out_dir);
        if (*allocate) return cmd_allocate(predictions_path, scheme, opts, alloc_out);
        if (*evaluate) return cmd_evaluate(predictions_path, allocations_path, opts, eval_out);
        if (*compare)
            return cmd_compare(scenario, seconds, noise, viewports_path, trajectories_path, variants_csv, opts,
                               out_dir, timing_report);
        return fail("InvalidInput", "no subcommand");
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        if (code != 0) std::cerr << json{{"error", {{"type", "UsageError"}, {"message", e.what()}}}}.dump() << '\n';
        return code;
    } catch (const parima::DegenerateInput& e) {
        return fail("DegenerateInput", e.what());
    } catch (const parima::OutOfFrame& e) {
        return fail("OutOfFrame", e.what());
    } catch (const parima::InvalidQuaternion& e) {
        return fail("InvalidQuaternion", e.what());
    } catch (const parima::InsufficientData& e) {
        return fail("InsufficientData", e.what());
    } catch (const parima::InvalidState& e) {
        return fail("InvalidState", e.what());
    } catch (const parima::InvalidInput& e) {
        return fail("InvalidInput", e.what());
    } catch (const parima::Error& e) {
        return fail("Error", e.what());
    } catch (const std::exception& e) {
        return fail("Internal", e.what());
    }
}
