// Copyright (c) 2026 the parima authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "parima/errors.hpp"
#include "parima/geometry.hpp"

namespace parima {

/// One externally produced bounding box. Boxes flagged `wrap` cross the
/// horizontal seam: x_min is near the right edge, x_max near the left.
struct Detection {
    std::int64_t frame = 0;
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;
    bool wrap = false;
};

struct TrackPoint {
    std::int64_t frame = 0;
    EquirectPoint centroid;
};

enum class TrackState { active, deactivated };

/// A single object's centroid trajectory. After run_tracker finishes, the
/// point list has no internal frame gaps (missing frames are interpolated).
struct ObjectTrack {
    int id = 0;
    std::vector<TrackPoint> points;
    TrackState state = TrackState::active;
    int missing_streak = 0;
};

struct TrackerConfig {
    int deactivate_after = 30;        // missed frames tolerated before a track dies
    double max_match_angle = pi;      // pi = uncapped
};

/// Centroid of a detection box; wrapped boxes take the shorter-arc midpoint
/// modulo the frame width.
inline EquirectPoint centroid(const Detection& d, double width, double /*height*/) {
    if (d.y_min > d.y_max) throw InvalidInput("centroid: y_min > y_max");
    if (!d.wrap && d.x_min > d.x_max) throw InvalidInput("centroid: x_min > x_max on non-wrapped box");
    const double cy = (d.y_min + d.y_max) / 2.0;
    if (!d.wrap) return {(d.x_min + d.x_max) / 2.0, cy};
    return {wrap_positive((d.x_min + d.x_max + width) / 2.0, width), cy};
}

/// Mutual-nearest matching between two centroid sets by spherical angle.
/// Returns (index in a, index in b) pairs. A pair forms iff each point is
/// the other's angular argmin; ties break toward the lower index.
inline std::vector<std::pair<int, int>> mutual_nearest_pairs(std::span<const EquirectPoint> a,
                                                             std::span<const EquirectPoint> b,
                                                             double width, double height,
                                                             double max_angle = pi) {
    const int na = static_cast<int>(a.size());
    const int nb = static_cast<int>(b.size());
    std::vector<double> dist(static_cast<std::size_t>(na) * nb);
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j)
            dist[static_cast<std::size_t>(i) * nb + j] = angular_distance(a[i], b[j], width, height);

    auto row_min = [&](int i) {
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int j = 0; j < nb; ++j) {
            const double d = dist[static_cast<std::size_t>(i) * nb + j];
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        return best;
    };
    auto col_min = [&](int j) {
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int i = 0; i < na; ++i) {
            const double d = dist[static_cast<std::size_t>(i) * nb + j];
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        return best;
    };

    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < na; ++i) {
        const int j = row_min(i);
        if (j < 0) continue;
        if (col_min(j) != i) continue;
        if (dist[static_cast<std::size_t>(i) * nb + j] > max_angle) continue;
        pairs.emplace_back(i, j);
    }
    return pairs;
}

/// Online centroid tracker. Feed frames in increasing order via step();
/// tracks() returns every track created so far, IDs dense from 0 in
/// activation order.
class Tracker {
public:
    Tracker(double width, double height, TrackerConfig cfg = {})
        : width_(width), height_(height), cfg_(cfg) {
        if (width_ <= 0.0 || height_ <= 0.0) throw InvalidInput("Tracker: bad frame dims");
        if (cfg_.deactivate_after < 1) throw InvalidInput("Tracker: deactivate_after must be >= 1");
    }

    /// Processes one frame. Returns the track ID assigned to each detection,
    /// in detection order. Detections must carry the given frame index.
    std::vector<int> step(std::int64_t frame, std::span<const Detection> detections) {
        if (!tracks_.empty() && frame <= last_frame_)
            throw InvalidInput("Tracker::step: frames must strictly increase");
        for (const auto& d : detections)
            if (d.frame != frame) throw InvalidInput("Tracker::step: detection from a different frame");
        last_frame_ = frame;

        std::vector<EquirectPoint> current;
        current.reserve(detections.size());
        for (const auto& d : detections) current.push_back(centroid(d, width_, height_));

        std::vector<int> active_ids;
        std::vector<EquirectPoint> active_pts;
        for (const auto& [id, tr] : tracks_) {
            if (tr.state != TrackState::active) continue;
            active_ids.push_back(id);
            active_pts.push_back(tr.points.back().centroid);
        }

        const auto pairs = mutual_nearest_pairs(current, active_pts, width_, height_, cfg_.max_match_angle);

        std::vector<int> assignment(detections.size(), -1);
        std::vector<bool> active_matched(active_ids.size(), false);
        for (const auto& [ci, aj] : pairs) {
            const int id = active_ids[aj];
            ObjectTrack& tr = tracks_.at(id);
            append_with_interpolation(tr, frame, current[ci]);
            tr.missing_streak = 0;
            assignment[ci] = id;
            active_matched[aj] = true;
        }
        for (std::size_t ci = 0; ci < current.size(); ++ci) {
            if (assignment[ci] >= 0) continue;
            const int id = next_id_++;
            ObjectTrack tr;
            tr.id = id;
            tr.points.push_back({frame, current[ci]});
            tracks_.emplace(id, std::move(tr));
            assignment[ci] = id;
        }
        for (std::size_t aj = 0; aj < active_ids.size(); ++aj) {
            if (active_matched[aj]) continue;
            ObjectTrack& tr = tracks_.at(active_ids[aj]);
            if (++tr.missing_streak > cfg_.deactivate_after) tr.state = TrackState::deactivated;
        }
        return assignment;
    }

    /// All tracks created so far, sorted by ID.
    std::vector<ObjectTrack> tracks() const {
        std::vector<ObjectTrack> out;
        out.reserve(tracks_.size());
        for (const auto& [id, tr] : tracks_) out.push_back(tr);
        return out;
    }

private:
    void append_with_interpolation(ObjectTrack& tr, std::int64_t frame, const EquirectPoint& pt) {
        const TrackPoint last = tr.points.back();
        const std::int64_t gap = frame - last.frame - 1;
        if (gap > 0) {
            // Shorter modular arc in x, straight segment in y.
            const double dx = std::remainder(pt.x - last.centroid.x, width_);
            const double dy = pt.y - last.centroid.y;
            for (std::int64_t k = 1; k <= gap; ++k) {
                const double t = static_cast<double>(k) / static_cast<double>(gap + 1);
                tr.points.push_back({last.frame + k,
                                     {wrap_positive(last.centroid.x + dx * t, width_),
                                      last.centroid.y + dy * t}});
            }
        }
        tr.points.push_back({frame, pt});
    }

    double width_;
    double height_;
    TrackerConfig cfg_;
    std::map<int, ObjectTrack> tracks_;
    int next_id_ = 0;
    std::int64_t last_frame_ = std::numeric_limits<std::int64_t>::min();
};

/// Runs the tracker over a full detection list (frames in increasing order,
/// gaps allowed) and returns the finalized tracks.
inline std::vector<ObjectTrack> run_tracker(std::span<const Detection> detections,
                                            double width, double height, TrackerConfig cfg = {}) {
    if (detections.empty()) return {};
    std::int64_t min_frame = detections.front().frame;
    std::int64_t max_frame = min_frame;
    std::int64_t prev = min_frame;
    for (const auto& d : detections) {
        if (d.frame < prev) throw InvalidInput("run_tracker: frames out of order");
        prev = d.frame;
        min_frame = std::min(min_frame, d.frame);
        max_frame = std::max(max_frame, d.frame);
    }

    Tracker tracker(width, height, cfg);
    std::size_t next = 0;
    for (std::int64_t frame = min_frame; frame <= max_frame; ++frame) {
        std::vector<Detection> of_frame;
        while (next < detections.size() && detections[next].frame == frame)
            of_frame.push_back(detections[next++]);
        tracker.step(frame, of_frame);
    }
    return tracker.tracks();
}

} // namespace parima
