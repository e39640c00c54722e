// Copyright (c) 2026 the parima authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "parima/timeseries.hpp"
#include "parima/geometry.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

using namespace parima;

namespace {

constexpr double kWidth = 3840.0;

// Test-local OLS oracle for an AR(1) with intercept:
// phi = cov(x_t, x_{t-1}) / var(x_{t-1}) on the paired samples.
double ar1_ols_oracle(const std::vector<double>& x) {
    const std::size_t n = x.size() - 1;
    double mean_lag = 0.0, mean_cur = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        mean_lag += x[t];
        mean_cur += x[t + 1];
    }
    mean_lag /= static_cast<double>(n);
    mean_cur /= static_cast<double>(n);
    double cov = 0.0, var = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        cov += (x[t] - mean_lag) * (x[t + 1] - mean_cur);
        var += (x[t] - mean_lag) * (x[t] - mean_lag);
    }
    return cov / var;
}

// Reconstructs a series from its first differences and initial value.
std::vector<double> undiff_oracle(double head, const std::vector<double>& diffs) {
    std::vector<double> out{head};
    for (double d : diffs) out.push_back(out.back() + d);
    return out;
}

} // namespace

TEST_CASE("difference basics") {
    CHECK(difference(std::vector<double>{1, 3, 6}, 1) == std::vector<double>{2, 3});
    CHECK(difference(std::vector<double>{4, 7, 9}, 0) == std::vector<double>{4, 7, 9});
    CHECK(difference(std::vector<double>{1, 3, 6, 10}, 2) == std::vector<double>{1, 1});
    CHECK_THROWS_AS(difference(std::vector<double>{1, 2}, 2), InsufficientData);
}

TEST_CASE("difference then cumulative sum reproduces the series exactly") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-100, 100);
    std::vector<double> series;
    for (int i = 0; i < 200; ++i) series.push_back(u(rng));
    const auto diffs = difference(series, 1);
    const auto back = undiff_oracle(series[0], diffs);
    REQUIRE(back.size() == series.size());
    for (std::size_t i = 0; i < series.size(); ++i)
        CHECK(back[i] == Catch::Approx(series[i]).margin(1e-9));
}

TEST_CASE("AR(1) coefficient recovery on synthetic data") {
    std::mt19937_64 rng(1234);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> x{0.0};
    for (int t = 1; t < 10000; ++t) x.push_back(0.6 * x.back() + noise(rng));

    const auto model = fit(x, {1, 0, 0});
    REQUIRE(model.ar.size() == 1);
    CHECK(model.ar[0] > 0.55);
    CHECK(model.ar[0] < 0.65);
    CHECK(model.ar[0] == Catch::Approx(ar1_ols_oracle(x)).margin(1e-9));
}

TEST_CASE("constant series with order (0,1,0) is an all-zero random walk") {
    const std::vector<double> series(40, 5.0);
    const auto model = fit(series, {0, 1, 0});
    CHECK(model.ar.empty());
    CHECK(model.ma.empty());
    CHECK(model.intercept == 0.0);
    for (double v : forecast(model, 4)) CHECK(v == Catch::Approx(5.0));
}

TEST_CASE("(0,1,0) forecast equals the last observation for any horizon") {
    std::vector<double> series;
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(0, 500);
    for (int i = 0; i < 60; ++i) series.push_back(u(rng));
    const auto model = fit(series, {0, 1, 0});
    for (double v : forecast(model, 7)) CHECK(v == Catch::Approx(series.back()));
}

TEST_CASE("manual AR(1) model forecasts decay geometrically") {
    ArimaModel m;
    m.order = {1, 0, 0};
    m.ar = {0.5};
    m.tail_values = {8.0};
    const auto f = forecast(m, 2);
    REQUIRE(f.size() == 2);
    CHECK(f[0] == Catch::Approx(4.0));
    CHECK(f[1] == Catch::Approx(2.0));
}

TEST_CASE("(2,1,1) on a deterministic ramp continues the ramp") {
    std::vector<double> ramp;
    for (int i = 1; i <= 100; ++i) ramp.push_back(static_cast<double>(i));
    const auto model = fit(ramp, {2, 1, 1});
    const auto f = forecast(model, 5);
    for (int s = 0; s < 5; ++s) CHECK(std::abs(f[static_cast<std::size_t>(s)] - (101.0 + s)) < 0.5);
}

TEST_CASE("fit rejects bad orders and short series") {
    const std::vector<double> series(40, 1.0);
    CHECK_THROWS_AS(fit(series, {0, 0, 0}), InvalidInput);
    const std::vector<double> tiny(10, 1.0);
    CHECK_THROWS_AS(fit(tiny, {1, 0, 0}), InsufficientData);
}

TEST_CASE("width_adjust follows the unwrap rule, running left to right") {
    // Forward seam crossing: previous running value 3800, raw next 10.
    const auto fwd = width_adjust(std::vector<double>{3800, 10}, kWidth);
    CHECK(fwd == std::vector<double>{3800, 3850});

    // Backward seam crossing: previous 40, raw next 3830 unwraps to -10.
    const auto bwd = width_adjust(std::vector<double>{40, 3830}, kWidth);
    CHECK(bwd == std::vector<double>{40, -10});

    // No crossing: values pass through.
    const auto none = width_adjust(std::vector<double>{100, 160, 220}, kWidth);
    CHECK(none == std::vector<double>{100, 160, 220});
}

TEST_CASE("apply_transforms shifts, jitters within (0, 0.1) and logs") {
    const std::vector<double> xs{40, 3830};
    const auto t = apply_transforms(xs, kWidth, 99, true);
    REQUIRE(t.values.size() == 2);
    CHECK(t.chain.shift == kWidth);
    // Unwrapped -10 shifts to 3830; jitter is sub-0.1 so exp stays close.
    CHECK(std::exp(t.values[1]) == Catch::Approx(3830.0).margin(0.1 + 1e-9));
    CHECK(std::exp(t.values[0]) >= 3880.0);
    CHECK(std::exp(t.values[0]) < 3880.1);
}

TEST_CASE("apply_transforms is bit-identical for a fixed seed") {
    std::vector<double> xs;
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> u(0, kWidth);
    for (int i = 0; i < 30; ++i) xs.push_back(u(rng));
    const auto a = apply_transforms(xs, kWidth, 7, true);
    const auto b = apply_transforms(xs, kWidth, 7, true);
    CHECK(a.values == b.values);
    const auto c = apply_transforms(xs, kWidth, 8, true);
    CHECK(a.values != c.values);
}

TEST_CASE("vertical axis gets no shift and rejects negative input") {
    const std::vector<double> ys{120, 500};
    const auto t = apply_transforms(ys, kWidth, 5, false);
    CHECK(t.chain.shift == 0.0);
    CHECK(std::exp(t.values[0]) == Catch::Approx(120.0).margin(0.11));

    CHECK_THROWS_AS(apply_transforms(std::vector<double>{-5.0}, kWidth, 5, false), InvalidState);
}

TEST_CASE("invert_forecast undoes shift and log, and clamps overflow") {
    TransformChain x_chain{kWidth, 0, true};
    const auto vals = invert_forecast(std::vector<double>{std::log(3850.0)}, x_chain, kWidth);
    CHECK(vals[0] == Catch::Approx(10.0).margin(1e-9));

    // Overflowing exponentiation clamps to 2 * width before shift removal.
    const auto big = invert_forecast(std::vector<double>{800.0}, x_chain, kWidth);
    CHECK(big[0] == Catch::Approx(2 * kWidth - kWidth));

    TransformChain y_chain{0.0, 0, true};
    const auto ys = invert_forecast(std::vector<double>{std::log(321.0)}, y_chain, kWidth);
    CHECK(ys[0] == Catch::Approx(321.0).margin(1e-9));
}

TEST_CASE("invert after apply recovers input within the jitter amplitude") {
    // Smooth wrapped walk, the shape head-movement series actually have.
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> step(-50, 50);
    std::vector<double> xs{1800.0};
    for (int i = 1; i < 40; ++i) xs.push_back(wrap_positive(xs.back() + step(rng), kWidth));
    const auto t = apply_transforms(xs, kWidth, 11, true);
    const auto back = invert_forecast(t.values, t.chain, kWidth);
    const auto unwrapped = width_adjust(xs, kWidth);
    REQUIRE(back.size() == xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        CHECK(back[i] - unwrapped[i] >= 0.0);
        CHECK(back[i] - unwrapped[i] < 0.1);
    }
}

TEST_CASE("forecasts stay finite even for explosive coefficients") {
    ArimaModel m;
    m.order = {1, 1, 0};
    m.ar = {2.0};
    m.tail_values = {100.0};
    m.integration_heads = {1000.0};
    for (double v : forecast(m, 200)) CHECK(std::isfinite(v));
}

TEST_CASE("fit on jittery log-scale data stays sane") {
    // Near-constant viewport chunk, the everyday predictor input.
    std::vector<double> xs(30, 1980.0);
    const auto t = apply_transforms(xs, kWidth, 3, true);
    const auto m = fit(t.values, {2, 1, 1});
    const auto f = forecast(m, 30);
    const auto back = invert_forecast(f, t.chain, kWidth);
    for (double v : back) CHECK(std::abs(v - 1980.0) < 5.0);
}
