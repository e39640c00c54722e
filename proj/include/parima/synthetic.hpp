// Copyright (c) 2026 the parima authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "parima/errors.hpp"
#include "parima/geometry.hpp"
#include "parima/predictor.hpp"

namespace parima {

enum class Scenario { object_follower, wanderer, seam_crosser };

inline std::string_view scenario_name(Scenario s) {
    switch (s) {
        case Scenario::object_follower: return "object_follower";
        case Scenario::wanderer: return "wanderer";
        case Scenario::seam_crosser: return "seam_crosser";
    }
    return "unknown";
}

inline Scenario scenario_from_name(std::string_view name) {
    if (name == "object_follower") return Scenario::object_follower;
    if (name == "wanderer") return Scenario::wanderer;
    if (name == "seam_crosser") return Scenario::seam_crosser;
    throw InvalidInput("unknown scenario: " + std::string(name));
}

/// A generated viewing session: per-frame viewports plus aligned per-frame
/// object positions.
struct SyntheticTrace {
    std::vector<EquirectPoint> viewports;
    std::vector<ObjectFrame> objects;
};

namespace detail {

// Smooth closed-form trajectory: linear drift plus one sinusoid per axis.
struct SmoothPath {
    double x0, vx, ax, wx, px;
    double yc, ay, wy, py;

    static SmoothPath random(std::mt19937_64& rng, double width, double height) {
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        SmoothPath p{};
        p.x0 = u01(rng) * width;
        p.vx = (u01(rng) * 2 - 1) * 6.0;
        p.ax = 250.0 + u01(rng) * 300.0;
        p.wx = 0.015 + u01(rng) * 0.03;
        p.px = u01(rng) * 2 * pi;
        p.yc = (0.35 + u01(rng) * 0.3) * height;
        p.ay = 100.0 + u01(rng) * 200.0;
        p.wy = 0.015 + u01(rng) * 0.03;
        p.py = u01(rng) * 2 * pi;
        return p;
    }

    EquirectPoint at(std::int64_t f, double width, double height) const {
        const double t = static_cast<double>(f);
        return {wrap_positive(x0 + vx * t + ax * std::sin(wx * t + px), width),
                std::clamp(yc + ay * std::sin(wy * t + py), 0.0, height - 1.0)};
    }
};

// Slow background drifter, the texture of incidental scene objects.
struct DrifterPath {
    double xc, ax, wx, px;
    double yc, ay, wy, py;

    static DrifterPath random(std::mt19937_64& rng, double width, double height) {
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        DrifterPath p{};
        p.xc = u01(rng) * width;
        p.ax = 60.0 + u01(rng) * 120.0;
        p.wx = 0.003 + u01(rng) * 0.005;
        p.px = u01(rng) * 2 * pi;
        p.yc = (0.2 + u01(rng) * 0.6) * height;
        p.ay = 40.0 + u01(rng) * 80.0;
        p.wy = 0.003 + u01(rng) * 0.005;
        p.py = u01(rng) * 2 * pi;
        return p;
    }

    EquirectPoint at(std::int64_t f, double width, double height) const {
        const double t = static_cast<double>(f);
        return {wrap_positive(xc + ax * std::sin(wx * t + px), width),
                std::clamp(yc + ay * std::sin(wy * t + py), 0.0, height - 1.0)};
    }
};

// Piecewise-constant velocity with random direction switches, reflected off
// soft walls so the path never touches the seam. A forecaster without the
// object's future path cannot see the switches coming.
struct SwitchingPath {
    EquirectPoint pos;
    double vx = 0.0, vy = 0.0;
    int until_switch = 0;
    double x_lo, x_hi, y_lo, y_hi;

    static SwitchingPath start(std::mt19937_64& rng, double width, double height) {
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        SwitchingPath p{};
        p.x_lo = 0.1 * width;
        p.x_hi = 0.9 * width;
        p.y_lo = 0.12 * height;
        p.y_hi = 0.88 * height;
        p.pos = {p.x_lo + u01(rng) * (p.x_hi - p.x_lo), p.y_lo + u01(rng) * (p.y_hi - p.y_lo)};
        p.draw_segment(rng);
        return p;
    }

    void draw_segment(std::mt19937_64& rng) {
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        vx = (10.0 + u01(rng) * 15.0) * (u01(rng) < 0.5 ? -1.0 : 1.0);
        vy = (3.0 + u01(rng) * 9.0) * (u01(rng) < 0.5 ? -1.0 : 1.0);
        until_switch = 45 + static_cast<int>(u01(rng) * 90.0);
    }

    EquirectPoint step(std::mt19937_64& rng) {
        if (--until_switch <= 0) draw_segment(rng);
        double nx = pos.x + vx, ny = pos.y + vy;
        if (nx < x_lo || nx > x_hi) {
            vx = -vx;
            nx = std::clamp(nx, x_lo, x_hi);
        }
        if (ny < y_lo || ny > y_hi) {
            vy = -vy;
            ny = std::clamp(ny, y_lo, y_hi);
        }
        pos = {nx, ny};
        return pos;
    }
};

} // namespace detail

/// Deterministic scenario generator.
///   object_follower: the viewport tracks object 0 plus optional noise, so
///     the ground truth depends on an object trajectory by construction.
///   wanderer: a smooth random walk with objects that move independently.
///   seam_crosser: steady azimuthal drift that wraps the x = 0 seam, which
///     forces the width-adjustment branch of the series transform.
inline SyntheticTrace generate_synthetic(Scenario scenario, int frames, double width, double height,
                                         std::uint64_t seed, double follower_noise = 15.0) {
    if (frames < 1) throw InvalidInput("generate_synthetic: need at least one frame");
    std::mt19937_64 rng(detail::splitmix64(seed ^ 0x5e0a1a5ea5edULL));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    SyntheticTrace out;
    out.viewports.reserve(static_cast<std::size_t>(frames));
    out.objects.reserve(static_cast<std::size_t>(frames));

    switch (scenario) {
        case Scenario::object_follower: {
            auto primary = detail::SwitchingPath::start(rng, width, height);
            const auto extra1 = detail::DrifterPath::random(rng, width, height);
            // The gaze alternates between locking onto the prime object and
            // roaming on a personal momentum walk, with smooth hand-offs and
            // occasional saccades. The personal share scales with the noise
            // knob, so zero noise pins the gaze to the object exactly.
            const double personal_scale = std::min(1.0, follower_noise / 15.0);
            EquirectPoint personal{0.12 * width + u01(rng) * 0.76 * width,
                                   0.15 * height + u01(rng) * 0.7 * height};
            double pvx = 0.0, pvy = 0.0;
            bool roaming = false;
            int dwell = 120 + static_cast<int>(u01(rng) * 120.0);
            double mix_level = 0.05; // running share of the personal component
            for (std::int64_t f = 0; f < frames; ++f) {
                ObjectFrame of{f, {}};
                const EquirectPoint target = f == 0 ? primary.pos : primary.step(rng);
                // Detector boxes jitter frame to frame: the prime object is
                // large and tracks cleanly, background boxes flicker more.
                // Both match the gaze target exactly in the zero-noise case.
                const double prime_jitter = 0.7 * follower_noise;
                const double back_jitter = 6.0 * follower_noise;
                of.coords[0] = {wrap_positive(target.x + gauss(rng) * prime_jitter, width),
                                std::clamp(target.y + gauss(rng) * prime_jitter, 0.0, height - 1.0)};
                const EquirectPoint d1 = extra1.at(f, width, height);
                of.coords[1] = {wrap_positive(d1.x + gauss(rng) * back_jitter, width),
                                std::clamp(d1.y + gauss(rng) * back_jitter, 0.0, height - 1.0)};

                pvx = 0.985 * pvx + gauss(rng) * 1.0;
                pvy = 0.985 * pvy + gauss(rng) * 0.6;
                personal.x += pvx;
                personal.y += pvy;
                if (u01(rng) < 1.0 / 75.0) {
                    // Saccade: the viewer snaps to another part of the scene.
                    personal.x += personal_scale * (300.0 + u01(rng) * 600.0) * (u01(rng) < 0.5 ? -1.0 : 1.0);
                    personal.y += personal_scale * (100.0 + u01(rng) * 200.0) * (u01(rng) < 0.5 ? -1.0 : 1.0);
                    pvx = 0.0;
                    pvy = 0.0;
                } else {
                    u01(rng); // keep the per-frame draw count fixed
                    u01(rng);
                    u01(rng);
                    u01(rng);
                }
                if (personal.x < 0.12 * width || personal.x > 0.88 * width) {
                    pvx = -pvx;
                    personal.x = std::clamp(personal.x, 0.12 * width, 0.88 * width);
                }
                if (personal.y < 0.15 * height || personal.y > 0.85 * height) {
                    pvy = -pvy;
                    personal.y = std::clamp(personal.y, 0.15 * height, 0.85 * height);
                }

                if (--dwell <= 0) {
                    roaming = !roaming;
                    dwell = roaming ? 60 + static_cast<int>(u01(rng) * 90.0)
                                    : 120 + static_cast<int>(u01(rng) * 120.0);
                } else {
                    u01(rng);
                }
                // Smooth hand-off between attention states, ~0.7 s ramps.
                mix_level += ((roaming ? 0.95 : 0.05) - mix_level) * 0.05;
                const double mix = personal_scale * mix_level;
                const EquirectPoint vp{
                    wrap_positive((1.0 - mix) * target.x + mix * personal.x + gauss(rng) * follower_noise, width),
                    std::clamp((1.0 - mix) * target.y + mix * personal.y + gauss(rng) * follower_noise, 0.0,
                               height - 1.0)};
                out.viewports.push_back(vp);
                out.objects.push_back(std::move(of));
            }
            break;
        }
        case Scenario::wanderer: {
            const auto obj0 = detail::SmoothPath::random(rng, width, height);
            const auto obj1 = detail::SmoothPath::random(rng, width, height);
            const auto obj2 = detail::SmoothPath::random(rng, width, height);
            EquirectPoint pos{u01(rng) * width, (0.3 + u01(rng) * 0.4) * height};
            double vx = 0.0, vy = 0.0;
            for (std::int64_t f = 0; f < frames; ++f) {
                vx = 0.95 * vx + gauss(rng) * 3.0;
                vy = 0.95 * vy + gauss(rng) * 3.0;
                pos.x = wrap_positive(pos.x + vx, width);
                double ny = pos.y + vy;
                if (ny < 0.0 || ny > height - 1.0) {
                    vy = -vy;
                    ny = std::clamp(ny, 0.0, height - 1.0);
                }
                pos.y = ny;
                out.viewports.push_back(pos);
                ObjectFrame of{f, {}};
                of.coords[0] = obj0.at(f, width, height);
                of.coords[1] = obj1.at(f, width, height);
                of.coords[2] = obj2.at(f, width, height);
                out.objects.push_back(std::move(of));
            }
            break;
        }
        case Scenario::seam_crosser: {
            const double speed = (15.0 + u01(rng) * 10.0) * (u01(rng) < 0.5 ? -1.0 : 1.0);
            const double x0 = u01(rng) * width;
            const double yc = height / 2.0;
            const double ay = 80.0 + u01(rng) * 120.0;
            const double wy = 0.02 + u01(rng) * 0.02;
            const double offset = 50.0 + u01(rng) * 100.0;
            const auto distractor = detail::SmoothPath::random(rng, width, height);
            for (std::int64_t f = 0; f < frames; ++f) {
                const double t = static_cast<double>(f);
                const EquirectPoint vp{wrap_positive(x0 + speed * t, width),
                                       std::clamp(yc + ay * std::sin(wy * t), 0.0, height - 1.0)};
                out.viewports.push_back(vp);
                ObjectFrame of{f, {}};
                of.coords[0] = {wrap_positive(vp.x + offset, width), vp.y};
                of.coords[1] = distractor.at(f, width, height);
                out.objects.push_back(std::move(of));
            }
            break;
        }
    }
    return out;
}

} // namespace parima
