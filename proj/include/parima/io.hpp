// Copyright (c) 2026 the parima authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "parima/allocator.hpp"
#include "parima/errors.hpp"
#include "parima/geometry.hpp"
#include "parima/predictor.hpp"
#include "parima/tracker.hpp"

namespace parima::io {

// CSV files open with a schema comment (`# parima.<kind> v1`) followed by a
// header row. Readers tolerate a missing schema line but reject a wrong one.

/// Shortest round-trip decimal rendering; stable across runs.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// One recorded head orientation trace (generic CSV: timestamp,w,x,y,z).
struct HeadTrace {
    std::string user_id;
    std::string video_id;
    std::vector<HeadQuaternion> samples; // timestamps non-decreasing
};

/// One row of the per-frame prediction contract.
struct PredictionRow {
    int chunk = 0;
    std::int64_t frame = 0;
    double pred_x = 0.0;
    double pred_y = 0.0;
    double actual_x = 0.0;
    double actual_y = 0.0;
    double obj_contrib = 0.0;
};

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    for (auto& f : out) {
        while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
        while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) f.remove_suffix(1);
    }
    return out;
}

inline double parse_double(std::string_view s, int line_no) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw InvalidInput("line " + std::to_string(line_no) + ": bad number '" + std::string(s) + "'");
    return v;
}

inline std::int64_t parse_int(std::string_view s, int line_no) {
    std::int64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw InvalidInput("line " + std::to_string(line_no) + ": bad integer '" + std::string(s) + "'");
    return v;
}

struct CsvReader {
    std::istream& in;
    std::string kind;
    int line_no = 0;

    // Consumes schema/comment lines and the header; verifies both.
    void expect_header(std::string_view header) {
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            if (line.front() == '#') {
                if (line.find("parima.") != std::string::npos && line.find("parima." + kind) == std::string::npos)
                    throw InvalidInput("expected a parima." + kind + " file, got: " + line);
                continue;
            }
            if (line != header)
                throw InvalidInput(kind + ": expected header '" + std::string(header) + "', got '" + line + "'");
            return;
        }
        throw InvalidInput(kind + ": empty file");
    }

    bool next_row(std::vector<std::string_view>& fields, std::string& storage, std::size_t expected) {
        while (std::getline(in, storage)) {
            ++line_no;
            if (!storage.empty() && storage.back() == '\r') storage.pop_back();
            if (storage.empty() || storage.front() == '#') continue;
            fields = split_csv(storage);
            if (fields.size() != expected)
                throw InvalidInput(kind + " line " + std::to_string(line_no) + ": expected " +
                                   std::to_string(expected) + " fields, got " + std::to_string(fields.size()));
            return true;
        }
        return false;
    }
};

} // namespace detail

// ---------------------------------------------------------------------
// Detections (tracker input)
// ---------------------------------------------------------------------

inline void write_detections(std::ostream& out, std::span<const Detection> detections) {
    out << "# parima.detections v1\n";
    out << "frame,x_min,y_min,x_max,y_max,wrap\n";
    for (const auto& d : detections)
        out << d.frame << ',' << format_double(d.x_min) << ',' << format_double(d.y_min) << ','
            << format_double(d.x_max) << ',' << format_double(d.y_max) << ',' << (d.wrap ? 1 : 0) << '\n';
}

inline std::vector<Detection> read_detections(std::istream& in) {
    detail::CsvReader reader{in, "detections"};
    reader.expect_header("frame,x_min,y_min,x_max,y_max,wrap");
    std::vector<Detection> out;
    std::vector<std::string_view> f;
    std::string storage;
    while (reader.next_row(f, storage, 6)) {
        Detection d;
        d.frame = detail::parse_int(f[0], reader.line_no);
        d.x_min = detail::parse_double(f[1], reader.line_no);
        d.y_min = detail::parse_double(f[2], reader.line_no);
        d.x_max = detail::parse_double(f[3], reader.line_no);
        d.y_max = detail::parse_double(f[4], reader.line_no);
        d.wrap = detail::parse_int(f[5], reader.line_no) != 0;
        out.push_back(d);
    }
    return out;
}

// ---------------------------------------------------------------------
// Trajectories (tracker output, predictor input)
// ---------------------------------------------------------------------

inline void write_trajectories(std::ostream& out, std::span<const ObjectTrack> tracks) {
    out << "# parima.trajectories v1\n";
    out << "frame,object_id,cx,cy\n";
    // Frame-major so the file reads as a per-frame object table.
    std::int64_t lo = 0, hi = -1;
    for (const auto& t : tracks) {
        if (t.points.empty()) continue;
        if (hi < lo) {
            lo = t.points.front().frame;
            hi = t.points.back().frame;
        } else {
            lo = std::min(lo, t.points.front().frame);
            hi = std::max(hi, t.points.back().frame);
        }
    }
    for (std::int64_t frame = lo; frame <= hi; ++frame) {
        for (const auto& t : tracks) {
            if (t.points.empty() || frame < t.points.front().frame || frame > t.points.back().frame) continue;
            const auto& p = t.points[static_cast<std::size_t>(frame - t.points.front().frame)];
            out << frame << ',' << t.id << ',' << format_double(p.centroid.x) << ','
                << format_double(p.centroid.y) << '\n';
        }
    }
}

/// Same trajectory contract, but from per-frame object maps.
inline void write_object_frames(std::ostream& out, std::span<const ObjectFrame> frames) {
    out << "# parima.trajectories v1\n";
    out << "frame,object_id,cx,cy\n";
    for (const auto& of : frames)
        for (const auto& [id, pt] : of.coords)
            out << of.frame << ',' << id << ',' << format_double(pt.x) << ',' << format_double(pt.y) << '\n';
}

/// Reads a trajectory file into per-frame object maps, sorted by frame.
/// Only frames that carry at least one object appear.
inline std::vector<ObjectFrame> read_trajectories(std::istream& in) {
    detail::CsvReader reader{in, "trajectories"};
    reader.expect_header("frame,object_id,cx,cy");
    std::map<std::int64_t, ObjectFrame> by_frame;
    std::vector<std::string_view> f;
    std::string storage;
    while (reader.next_row(f, storage, 4)) {
        const std::int64_t frame = detail::parse_int(f[0], reader.line_no);
        const int id = static_cast<int>(detail::parse_int(f[1], reader.line_no));
        const double cx = detail::parse_double(f[2], reader.line_no);
        const double cy = detail::parse_double(f[3], reader.line_no);
        auto& of = by_frame[frame];
        of.frame = frame;
        of.coords[id] = {cx, cy};
    }
    std::vector<ObjectFrame> out;
    out.reserve(by_frame.size());
    for (auto& [frame, of] : by_frame) out.push_back(std::move(of));
    return out;
}

// ---------------------------------------------------------------------
// Per-frame viewports
// ---------------------------------------------------------------------

inline void write_viewports(std::ostream& out, std::span<const EquirectPoint> viewports) {
    out << "# parima.viewports v1\n";
    out << "frame,x,y\n";
    for (std::size_t f = 0; f < viewports.size(); ++f)
        out << f << ',' << format_double(viewports[f].x) << ',' << format_double(viewports[f].y) << '\n';
}

inline std::vector<EquirectPoint> read_viewports(std::istream& in) {
    detail::CsvReader reader{in, "viewports"};
    reader.expect_header("frame,x,y");
    std::vector<EquirectPoint> out;
    std::vector<std::string_view> f;
    std::string storage;
    std::int64_t expected = 0;
    while (reader.next_row(f, storage, 3)) {
        const std::int64_t frame = detail::parse_int(f[0], reader.line_no);
        if (frame != expected)
            throw InvalidInput("viewports line " + std::to_string(reader.line_no) +
                               ": frames must be dense from 0, got " + std::to_string(frame));
        ++expected;
        out.push_back({detail::parse_double(f[1], reader.line_no), detail::parse_double(f[2], reader.line_no)});
    }
    return out;
}

// ---------------------------------------------------------------------
// Head traces (generic quaternion CSV)
// ---------------------------------------------------------------------

inline void write_head_trace(std::ostream& out, const HeadTrace& trace) {
    out << "# parima.head_trace v1\n";
    out << "timestamp,w,x,y,z\n";
    for (const auto& s : trace.samples)
        out << format_double(s.timestamp) << ',' << format_double(s.w) << ',' << format_double(s.x) << ','
            << format_double(s.y) << ',' << format_double(s.z) << '\n';
}

inline HeadTrace read_head_trace(std::istream& in) {
    detail::CsvReader reader{in, "head_trace"};
    reader.expect_header("timestamp,w,x,y,z");
    HeadTrace trace;
    std::vector<std::string_view> f;
    std::string storage;
    double prev = -1e300;
    while (reader.next_row(f, storage, 5)) {
        HeadQuaternion q;
        q.timestamp = detail::parse_double(f[0], reader.line_no);
        q.w = detail::parse_double(f[1], reader.line_no);
        q.x = detail::parse_double(f[2], reader.line_no);
        q.y = detail::parse_double(f[3], reader.line_no);
        q.z = detail::parse_double(f[4], reader.line_no);
        if (q.timestamp < prev)
            throw InvalidInput("head_trace line " + std::to_string(reader.line_no) + ": timestamps decrease");
        prev = q.timestamp;
        trace.samples.push_back(q);
    }
    return trace;
}

// ---------------------------------------------------------------------
// Predictions
// ---------------------------------------------------------------------

inline void write_predictions(std::ostream& out, std::span<const PredictionRow> rows) {
    out << "# parima.predictions v1\n";
    out << "chunk,frame,pred_x,pred_y,actual_x,actual_y,obj_contrib\n";
    for (const auto& r : rows)
        out << r.chunk << ',' << r.frame << ',' << format_double(r.pred_x) << ',' << format_double(r.pred_y)
            << ',' << format_double(r.actual_x) << ',' << format_double(r.actual_y) << ','
            << format_double(r.obj_contrib) << '\n';
}

inline std::vector<PredictionRow> read_predictions(std::istream& in) {
    detail::CsvReader reader{in, "predictions"};
    reader.expect_header("chunk,frame,pred_x,pred_y,actual_x,actual_y,obj_contrib");
    std::vector<PredictionRow> out;
    std::vector<std::string_view> f;
    std::string storage;
    while (reader.next_row(f, storage, 7)) {
        PredictionRow r;
        r.chunk = static_cast<int>(detail::parse_int(f[0], reader.line_no));
        r.frame = detail::parse_int(f[1], reader.line_no);
        r.pred_x = detail::parse_double(f[2], reader.line_no);
        r.pred_y = detail::parse_double(f[3], reader.line_no);
        r.actual_x = detail::parse_double(f[4], reader.line_no);
        r.actual_y = detail::parse_double(f[5], reader.line_no);
        r.obj_contrib = detail::parse_double(f[6], reader.line_no);
        out.push_back(r);
    }
    return out;
}

// ---------------------------------------------------------------------
// Allocations
// ---------------------------------------------------------------------

inline void write_allocations(std::ostream& out, std::span<const TileAllocation> allocations) {
    out << "# parima.allocations v1\n";
    out << "chunk,row,col,bitrate_mbps\n";
    for (std::size_t c = 0; c < allocations.size(); ++c) {
        const auto& a = allocations[c];
        for (int r = 0; r < a.rows; ++r)
            for (int col = 0; col < a.cols; ++col)
                out << c << ',' << r << ',' << col << ',' << format_double(a.at(r, col)) << '\n';
    }
}

inline std::vector<TileAllocation> read_allocations(std::istream& in, int rows, int cols) {
    detail::CsvReader reader{in, "allocations"};
    reader.expect_header("chunk,row,col,bitrate_mbps");
    std::vector<TileAllocation> out;
    std::vector<std::string_view> f;
    std::string storage;
    while (reader.next_row(f, storage, 4)) {
        const int chunk = static_cast<int>(detail::parse_int(f[0], reader.line_no));
        const int r = static_cast<int>(detail::parse_int(f[1], reader.line_no));
        const int c = static_cast<int>(detail::parse_int(f[2], reader.line_no));
        const double b = detail::parse_double(f[3], reader.line_no);
        if (chunk < 0 || chunk > static_cast<int>(out.size()))
            throw InvalidInput("allocations line " + std::to_string(reader.line_no) + ": chunks must be dense");
        if (chunk == static_cast<int>(out.size()))
            out.push_back({rows, cols, std::vector<double>(static_cast<std::size_t>(rows) * cols, 0.0), 0.0});
        if (r < 0 || r >= rows || c < 0 || c >= cols)
            throw InvalidInput("allocations line " + std::to_string(reader.line_no) + ": tile out of range");
        out[static_cast<std::size_t>(chunk)].at(r, c) = b;
        out[static_cast<std::size_t>(chunk)].total += b;
    }
    return out;
}

// ---------------------------------------------------------------------
// File helpers
// ---------------------------------------------------------------------

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open for reading: " + path);
    return in;
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot open for writing: " + path);
    return out;
}

} // namespace parima::io
