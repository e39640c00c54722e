// Copyright (c) 2026 the parima authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "parima/errors.hpp"

namespace parima {

inline constexpr double pi = std::numbers::pi;

/// Point on the sphere: radial distance, azimuth in [-pi, pi],
/// polar elevation in [-pi/2, pi/2]. All angles in radians.
struct SphericalPoint {
    double rho = 1.0;
    double theta = 0.0;
    double phi = 0.0;
};

/// Pixel position inside an equirectangular frame, x in [0, width),
/// y in [0, height). Sub-pixel positions are meaningful.
struct EquirectPoint {
    double x = 0.0;
    double y = 0.0;
};

enum class CubeFace : int { front = 0, right = 1, back = 2, left = 3, top = 4, bottom = 5 };

/// Face-local position on one side of a cubemap, u/v in [0, size).
struct CubemapPoint {
    CubeFace face = CubeFace::front;
    double u = 0.0;
    double v = 0.0;
};

/// Head orientation sample: unit quaternion plus capture timestamp.
struct HeadQuaternion {
    double w = 1.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double timestamp = 0.0;
};

/// Wraps an angle into [-pi, pi).
inline double wrap_angle(double a) {
    a = std::fmod(a + pi, 2.0 * pi);
    if (a < 0.0) a += 2.0 * pi;
    return a - pi;
}

/// Wraps x into [0, m). m must be positive.
inline double wrap_positive(double x, double m) {
    x = std::fmod(x, m);
    if (x < 0.0) x += m;
    return x;
}

inline SphericalPoint cartesian_to_spherical(double cx, double cy, double cz) {
    const double rho = std::sqrt(cx * cx + cy * cy + cz * cz);
    if (rho == 0.0) throw DegenerateInput("cartesian_to_spherical: zero vector");
    // atan2(0, 0) at the poles is taken as 0.
    const double theta = (cx == 0.0 && cy == 0.0) ? 0.0 : std::atan2(cy, cx);
    const double phi = std::asin(std::clamp(cz / rho, -1.0, 1.0));
    return {rho, theta, phi};
}

/// Direction vector (scaled by rho) for a spherical point.
inline void spherical_to_cartesian(const SphericalPoint& s, double& cx, double& cy, double& cz) {
    cx = s.rho * std::cos(s.phi) * std::cos(s.theta);
    cy = s.rho * std::cos(s.phi) * std::sin(s.theta);
    cz = s.rho * std::sin(s.phi);
}

inline SphericalPoint equirect_to_spherical(const EquirectPoint& p, double width, double height) {
    if (width <= 0.0 || height <= 0.0) throw InvalidInput("equirect_to_spherical: bad frame dims");
    if (p.x < 0.0 || p.x >= width || p.y < 0.0 || p.y >= height)
        throw OutOfFrame("equirect_to_spherical: pixel outside frame");
    const double theta = p.x * 2.0 * pi / width - pi;
    const double phi = p.y * pi / height - pi / 2.0;
    return {width / (2.0 * pi), theta, phi};
}

inline EquirectPoint spherical_to_equirect(const SphericalPoint& s, double width, double height) {
    if (width <= 0.0 || height <= 0.0) throw InvalidInput("spherical_to_equirect: bad frame dims");
    double x = wrap_positive((s.theta + pi) * width / (2.0 * pi), width);
    double y = (s.phi + pi / 2.0) * height / pi;
    y = std::clamp(y, 0.0, std::nextafter(height, 0.0));
    return {x, y};
}

namespace detail {

// Lateral face whose quarter-turn azimuth interval contains theta.
// Intervals are half-open; theta is expected in [-pi, pi).
inline CubeFace lateral_face(double theta, double& center_azimuth) {
    if (theta >= -pi / 4 && theta < pi / 4) {
        center_azimuth = 0.0;
        return CubeFace::front;
    }
    if (theta >= pi / 4 && theta < 3 * pi / 4) {
        center_azimuth = pi / 2;
        return CubeFace::right;
    }
    if (theta >= -3 * pi / 4 && theta < -pi / 4) {
        center_azimuth = -pi / 2;
        return CubeFace::left;
    }
    center_azimuth = theta < 0 ? -pi : pi;
    return CubeFace::back;
}

inline double clamp_face_coord(double c, double size) {
    return std::clamp(c, 0.0, std::nextafter(size, 0.0));
}

} // namespace detail

/// Projects a spherical point onto one of the six cube faces of a cubemap
/// with the given face size. Every point maps to exactly one face; the
/// lateral faces win ties against top/bottom via half-open intervals.
inline CubemapPoint spherical_to_cubemap(const SphericalPoint& s, double size) {
    if (size <= 0.0) throw InvalidInput("spherical_to_cubemap: bad face size");
    const double theta = wrap_angle(s.theta);
    const double phi = s.phi;

    double center = 0.0;
    const CubeFace lateral = detail::lateral_face(theta, center);
    const double local = theta - center; // in [-pi/4, pi/4)
    const double a = std::tan(local);
    const double b = std::tan(phi) / std::cos(local); // tan(phi) * sec(local)

    CubemapPoint out;
    if (b >= -1.0 && b < 1.0) {
        out.face = lateral;
        out.u = (a + 1.0) / 2.0 * size;
        out.v = (b + 1.0) / 2.0 * size;
    } else {
        // |tan(phi) sec(local)| >= 1 forces the top or bottom face.
        double cx = 0.0, cy = 0.0, cz = 0.0;
        spherical_to_cartesian({1.0, theta, phi}, cx, cy, cz);
        out.face = phi > 0.0 ? CubeFace::top : CubeFace::bottom;
        out.u = (cx / cz + 1.0) / 2.0 * size;
        out.v = (cy / cz + 1.0) / 2.0 * size;
    }
    out.u = detail::clamp_face_coord(out.u, size);
    out.v = detail::clamp_face_coord(out.v, size);
    return out;
}

/// Inverse of spherical_to_cubemap on face interiors. The returned radial
/// distance is 2 * size.
inline SphericalPoint cubemap_to_spherical(const CubemapPoint& c, double size) {
    if (size <= 0.0) throw InvalidInput("cubemap_to_spherical: bad face size");
    const double a = 2.0 * c.u / size - 1.0;
    const double b = 2.0 * c.v / size - 1.0;
    double dx = 0.0, dy = 0.0, dz = 0.0;
    switch (c.face) {
        case CubeFace::front:  dx = 1.0;  dy = a;    dz = b;    break;
        case CubeFace::right:  dx = -a;   dy = 1.0;  dz = b;    break;
        case CubeFace::back:   dx = -1.0; dy = -a;   dz = b;    break;
        case CubeFace::left:   dx = a;    dy = -1.0; dz = b;    break;
        case CubeFace::top:    dx = a;    dy = b;    dz = 1.0;  break;
        case CubeFace::bottom: dx = -a;   dy = -b;   dz = -1.0; break;
    }
    SphericalPoint s = cartesian_to_spherical(dx, dy, dz);
    s.rho = 2.0 * size;
    return s;
}

/// Rotates the reference gaze direction (1, 0, 0) by q and converts the
/// result to an equirectangular pixel. The identity quaternion therefore
/// looks at the frame center. Quaternions within 1e-3 of unit norm are
/// normalized; anything farther off is rejected.
inline EquirectPoint quaternion_to_viewport(const HeadQuaternion& q, double width, double height) {
    const double norm = std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
    if (std::abs(norm - 1.0) > 1e-3) throw InvalidQuaternion("quaternion_to_viewport: non-unit quaternion");
    const double w = q.w / norm, x = q.x / norm, y = q.y / norm, z = q.z / norm;
    // First column of the rotation matrix, i.e. the rotated (1, 0, 0).
    const double vx = 1.0 - 2.0 * (y * y + z * z);
    const double vy = 2.0 * (x * y + w * z);
    const double vz = 2.0 * (x * z - w * y);
    return spherical_to_equirect(cartesian_to_spherical(vx, vy, vz), width, height);
}

/// Central angle between the unit-sphere projections of two equirectangular
/// pixels. Monotone in the solid angle of the sector they span, so it is an
/// equivalent matching criterion and immune to the horizontal seam.
inline double angular_distance(const EquirectPoint& a, const EquirectPoint& b,
                               double width, double height) {
    const SphericalPoint sa = equirect_to_spherical(a, width, height);
    const SphericalPoint sb = equirect_to_spherical(b, width, height);
    double ax, ay, az, bx, by, bz;
    spherical_to_cartesian({1.0, sa.theta, sa.phi}, ax, ay, az);
    spherical_to_cartesian({1.0, sb.theta, sb.phi}, bx, by, bz);
    const double dot = std::clamp(ax * bx + ay * by + az * bz, -1.0, 1.0);
    return std::acos(dot);
}

} // namespace parima
