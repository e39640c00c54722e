// Copyright (c) 2026 the parima authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "parima/geometry.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <random>

using namespace parima;

namespace {

constexpr double kWidth = 3840.0;
constexpr double kHeight = 1920.0;

// Reference quaternion rotation via the full rotation matrix, kept
// independent of the production rotate-then-project path.
std::array<double, 3> rotate_oracle(const HeadQuaternion& q, const std::array<double, 3>& v) {
    const double w = q.w, x = q.x, y = q.y, z = q.z;
    const double m[3][3] = {
        {1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
        {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
        {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)},
    };
    std::array<double, 3> out{};
    for (int r = 0; r < 3; ++r)
        out[r] = m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2];
    return out;
}

double wrapped_pixel_error(double a, double b, double width) {
    const double d = std::abs(a - b);
    return std::min(d, width - d);
}

} // namespace

TEST_CASE("cartesian_to_spherical axis cases and direct evaluation") {
    auto s = cartesian_to_spherical(1, 0, 0);
    CHECK(s.rho == Catch::Approx(1.0));
    CHECK(s.theta == Catch::Approx(0.0).margin(1e-12));
    CHECK(s.phi == Catch::Approx(0.0).margin(1e-12));

    s = cartesian_to_spherical(0, 0, 1);
    CHECK(s.rho == Catch::Approx(1.0));
    CHECK(s.theta == Catch::Approx(0.0).margin(1e-12)); // atan2(0,0) defined as 0
    CHECK(s.phi == Catch::Approx(pi / 2));

    s = cartesian_to_spherical(1, 1, 0);
    CHECK(s.rho == Catch::Approx(std::sqrt(2.0)));
    CHECK(s.theta == Catch::Approx(pi / 4));
    CHECK(s.phi == Catch::Approx(0.0).margin(1e-12));

    CHECK_THROWS_AS(cartesian_to_spherical(0, 0, 0), DegenerateInput);
}

TEST_CASE("cartesian_to_spherical preserves the input norm") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng), y = u(rng), z = u(rng);
        const double norm = std::sqrt(x * x + y * y + z * z);
        if (norm == 0.0) continue;
        CHECK(cartesian_to_spherical(x, y, z).rho == Catch::Approx(norm).epsilon(1e-14));
    }
}

TEST_CASE("equirect_to_spherical frame center and origin") {
    auto s = equirect_to_spherical({kWidth / 2, kHeight / 2}, kWidth, kHeight);
    CHECK(s.theta == Catch::Approx(0.0).margin(1e-12));
    CHECK(s.phi == Catch::Approx(0.0).margin(1e-12));
    CHECK(s.rho == Catch::Approx(kWidth / (2 * pi)));

    s = equirect_to_spherical({0, 0}, kWidth, kHeight);
    CHECK(s.theta == Catch::Approx(-pi));
    CHECK(s.phi == Catch::Approx(-pi / 2));

    CHECK_THROWS_AS(equirect_to_spherical({kWidth, 0}, kWidth, kHeight), OutOfFrame);
    CHECK_THROWS_AS(equirect_to_spherical({0, -1}, kWidth, kHeight), OutOfFrame);
}

TEST_CASE("spherical_to_equirect inverts the named examples") {
    auto p = spherical_to_equirect({1, 0, 0}, kWidth, kHeight);
    CHECK(p.x == Catch::Approx(kWidth / 2));
    CHECK(p.y == Catch::Approx(kHeight / 2));

    p = spherical_to_equirect({1, -pi, -pi / 2}, kWidth, kHeight);
    CHECK(p.x == Catch::Approx(0.0).margin(1e-9));
    CHECK(p.y == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("equirect<->spherical round trip on random interior points") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(0.0, kWidth);
    std::uniform_real_distribution<double> uy(0.0, kHeight);
    double max_err = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const EquirectPoint p{ux(rng), uy(rng)};
        const EquirectPoint q = spherical_to_equirect(equirect_to_spherical(p, kWidth, kHeight), kWidth, kHeight);
        max_err = std::max(max_err, wrapped_pixel_error(p.x, q.x, kWidth));
        max_err = std::max(max_err, std::abs(p.y - q.y));
    }
    CHECK(max_err < 1e-6);
}

TEST_CASE("spherical_to_cubemap face centers and forced poles") {
    const double size = 512.0;
    auto c = spherical_to_cubemap({1, 0, 0}, size);
    CHECK(c.face == CubeFace::front);
    CHECK(c.u == Catch::Approx(size / 2));
    CHECK(c.v == Catch::Approx(size / 2));

    c = spherical_to_cubemap({1, 0, pi / 2}, size);
    CHECK(c.face == CubeFace::top);
    CHECK(c.u == Catch::Approx(size / 2));
    CHECK(c.v == Catch::Approx(size / 2));
}

TEST_CASE("spherical_to_cubemap matches the projected-point formulas") {
    // Hand oracle: the projection of (theta, phi) onto the front plane is
    // (rho, rho tan(theta), rho tan(phi) sec(theta)).
    const double size = 512.0;
    const double theta = pi / 6, phi = pi / 6;
    const double a = std::tan(theta);
    const double b = std::tan(phi) / std::cos(theta);
    REQUIRE(std::abs(b) < 1.0); // stays on the front face

    const auto c = spherical_to_cubemap({1, theta, phi}, size);
    CHECK(c.face == CubeFace::front);
    CHECK(c.u == Catch::Approx((a + 1) / 2 * size).epsilon(1e-12));
    CHECK(c.v == Catch::Approx((b + 1) / 2 * size).epsilon(1e-12));
}

TEST_CASE("cubemap_to_spherical inverts the examples and reports rho = 2 * size") {
    const double size = 512.0;
    auto s = cubemap_to_spherical({CubeFace::front, size / 2, size / 2}, size);
    CHECK(s.rho == Catch::Approx(2 * size));
    CHECK(s.theta == Catch::Approx(0.0).margin(1e-12));
    CHECK(s.phi == Catch::Approx(0.0).margin(1e-12));

    s = cubemap_to_spherical({CubeFace::top, size / 2, size / 2}, size);
    CHECK(s.phi == Catch::Approx(pi / 2));

    const double theta = pi / 6, phi = pi / 6;
    const auto c = spherical_to_cubemap({1, theta, phi}, size);
    s = cubemap_to_spherical(c, size);
    CHECK(s.theta == Catch::Approx(theta).epsilon(1e-10));
    CHECK(s.phi == Catch::Approx(phi).epsilon(1e-10));
}

TEST_CASE("spherical<->cubemap round trip on random points") {
    const double size = 512.0;
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> ut(-pi, pi);
    std::uniform_real_distribution<double> up(-pi / 2 + 1e-9, pi / 2 - 1e-9);
    double max_err = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const SphericalPoint s{1.0, ut(rng), up(rng)};
        const auto back = cubemap_to_spherical(spherical_to_cubemap(s, size), size);
        max_err = std::max(max_err, std::abs(wrap_angle(back.theta - s.theta)));
        max_err = std::max(max_err, std::abs(back.phi - s.phi));
    }
    CHECK(max_err < 1e-6);
}

TEST_CASE("every spherical point maps to exactly one in-range face position") {
    const double size = 256.0;
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ut(-pi, pi);
    std::uniform_real_distribution<double> up(-pi / 2, pi / 2);
    for (int i = 0; i < 10000; ++i) {
        const auto c = spherical_to_cubemap({1.0, ut(rng), up(rng)}, size);
        CHECK(c.u >= 0.0);
        CHECK(c.u < size);
        CHECK(c.v >= 0.0);
        CHECK(c.v < size);
    }
}

TEST_CASE("quaternion_to_viewport conventions") {
    const HeadQuaternion identity{1, 0, 0, 0, 0};
    auto p = quaternion_to_viewport(identity, kWidth, kHeight);
    CHECK(p.x == Catch::Approx(kWidth / 2));
    CHECK(p.y == Catch::Approx(kHeight / 2));

    // Yaw by pi about z lands on the seam column after wrapping.
    const HeadQuaternion yaw_pi{0, 0, 0, 1, 0};
    p = quaternion_to_viewport(yaw_pi, kWidth, kHeight);
    CHECK(wrapped_pixel_error(p.x, 0.0, kWidth) < 1e-6);
    CHECK(p.y == Catch::Approx(kHeight / 2));

    // Pitch by pi/2 about y sends the gaze to the top row.
    const double h = std::sqrt(0.5);
    const HeadQuaternion pitch{h, 0, h, 0, 0};
    const auto v = rotate_oracle(pitch, {1, 0, 0});
    CHECK(v[2] == Catch::Approx(-1.0)); // oracle confirms straight down in z
    p = quaternion_to_viewport(pitch, kWidth, kHeight);
    CHECK(p.y == Catch::Approx(0.0).margin(1e-6));
}

TEST_CASE("quaternion_to_viewport agrees with the rotation-matrix oracle") {
    std::mt19937_64 rng(19);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        HeadQuaternion q{g(rng), g(rng), g(rng), g(rng), 0};
        const double n = std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
        if (n < 1e-6) continue;
        q.w /= n;
        q.x /= n;
        q.y /= n;
        q.z /= n;
        const auto v = rotate_oracle(q, {1, 0, 0});
        const auto want = spherical_to_equirect(cartesian_to_spherical(v[0], v[1], v[2]), kWidth, kHeight);
        const auto got = quaternion_to_viewport(q, kWidth, kHeight);
        CHECK(wrapped_pixel_error(got.x, want.x, kWidth) < 1e-6);
        CHECK(std::abs(got.y - want.y) < 1e-6);
    }
}

TEST_CASE("quaternion double cover: q and -q give the same viewport") {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        HeadQuaternion q{g(rng), g(rng), g(rng), g(rng), 0};
        const double n = std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
        if (n < 1e-6) continue;
        q.w /= n;
        q.x /= n;
        q.y /= n;
        q.z /= n;
        const HeadQuaternion m{-q.w, -q.x, -q.y, -q.z, 0};
        const auto a = quaternion_to_viewport(q, kWidth, kHeight);
        const auto b = quaternion_to_viewport(m, kWidth, kHeight);
        CHECK(a.x == Catch::Approx(b.x).margin(1e-9));
        CHECK(a.y == Catch::Approx(b.y).margin(1e-9));
    }
}

TEST_CASE("quaternion norm handling") {
    // Slightly off-norm quaternions are normalized.
    const HeadQuaternion near_unit{1.0005, 0, 0, 0, 0};
    const auto p = quaternion_to_viewport(near_unit, kWidth, kHeight);
    CHECK(p.x == Catch::Approx(kWidth / 2));

    const HeadQuaternion bad{1.5, 0, 0, 0, 0};
    CHECK_THROWS_AS(quaternion_to_viewport(bad, kWidth, kHeight), InvalidQuaternion);
}

TEST_CASE("angular_distance basics and seam behaviour") {
    const EquirectPoint a{100, kHeight / 2};
    CHECK(angular_distance(a, a, kWidth, kHeight) == Catch::Approx(0.0).margin(1e-12));

    // Antipodal points subtend pi.
    const EquirectPoint p{kWidth / 4, kHeight / 2};
    const EquirectPoint q{kWidth * 3 / 4, kHeight / 2};
    CHECK(angular_distance(p, q, kWidth, kHeight) == Catch::Approx(pi));

    // Small-angle oracle: 10 px across the seam at the equator.
    const EquirectPoint left{kWidth - 4, kHeight / 2};
    const EquirectPoint right{6, kHeight / 2};
    CHECK(angular_distance(left, right, kWidth, kHeight) ==
          Catch::Approx(2 * pi * 10 / kWidth).epsilon(1e-6));
}
