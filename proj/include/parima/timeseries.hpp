// Copyright (c) 2026 the parima authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "parima/errors.hpp"

namespace parima {

struct ArimaOrder {
    int p = 0;
    int d = 0;
    int q = 0;
};

/// Fitted ARIMA(p,d,q) model with the trailing state needed to forecast.
struct ArimaModel {
    ArimaOrder order;
    std::vector<double> ar;                  // p coefficients, lag 1 first
    std::vector<double> ma;                  // q coefficients, lag 1 first
    double intercept = 0.0;
    bool ma_dropped = false;                 // singular stage 2 fell back to pure AR

    std::vector<double> tail_values;         // last p differenced values, oldest first
    std::vector<double> tail_residuals;      // last q residuals, oldest first
    std::vector<double> integration_heads;   // last value of each k-times-differenced series, k=0..d-1
};

/// Record of the stationarity transforms applied before an ARIMA fit, so a
/// forecast can be mapped back to viewport coordinates. Jitter is additive
/// sub-pixel noise and is intentionally not inverted.
struct TransformChain {
    double shift = 0.0;             // frame width for the horizontal axis, 0 for vertical
    std::uint64_t jitter_seed = 0;
    bool log_applied = true;
};

struct TransformedSeries {
    std::vector<double> values;
    TransformChain chain;
};

/// d-fold first differences; output length shrinks by d.
inline std::vector<double> difference(std::span<const double> series, int d) {
    if (d < 0) throw InvalidInput("difference: negative order");
    if (static_cast<int>(series.size()) <= d) throw InsufficientData("difference: series too short");
    std::vector<double> out(series.begin(), series.end());
    for (int k = 0; k < d; ++k) {
        for (std::size_t i = 0; i + 1 < out.size(); ++i) out[i] = out[i + 1] - out[i];
        out.pop_back();
    }
    return out;
}

namespace detail {

// Ordinary least squares via column-equilibrated normal equations.
// rows[r] holds the regressors of observation r. Returns nullopt when the
// system is numerically singular (collinear or zero columns).
inline std::optional<std::vector<double>> least_squares(const std::vector<std::vector<double>>& rows,
                                                        std::span<const double> y) {
    const std::size_t n = rows.size();
    if (n == 0) return std::nullopt;
    const std::size_t k = rows[0].size();
    if (n < k) return std::nullopt;

    std::vector<double> scale(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) s += rows[r][j] * rows[r][j];
        if (s <= 0.0) return std::nullopt;
        scale[j] = std::sqrt(s);
    }

    // Normal equations on the scaled columns; their Gram diagonal is 1.
    std::vector<std::vector<double>> a(k, std::vector<double>(k + 1, 0.0));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < n; ++r) s += rows[r][i] * rows[r][j];
            a[i][j] = s / (scale[i] * scale[j]);
            a[j][i] = a[i][j];
        }
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) s += rows[r][i] * y[r];
        a[i][k] = s / scale[i];
    }

    constexpr double kPivotTol = 1e-10;
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < k; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) < kPivotTol) return std::nullopt;
        std::swap(a[col], a[pivot]);
        for (std::size_t r = 0; r < k; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c <= k; ++c) a[r][c] -= f * a[col][c];
        }
    }
    std::vector<double> beta(k);
    for (std::size_t j = 0; j < k; ++j) beta[j] = a[j][k] / a[j][j] / scale[j];
    for (double b : beta)
        if (!std::isfinite(b)) return std::nullopt;
    return beta;
}

// Regress w_t on an intercept, p lags of w and q lags of e.
inline std::optional<std::vector<double>> arma_regression(std::span<const double> w,
                                                          std::span<const double> e,
                                                          int p, int q, int start) {
    const int n = static_cast<int>(w.size());
    std::vector<std::vector<double>> rows;
    std::vector<double> targets;
    for (int t = start; t < n; ++t) {
        std::vector<double> row;
        row.reserve(1 + static_cast<std::size_t>(p) + static_cast<std::size_t>(q));
        row.push_back(1.0);
        for (int i = 1; i <= p; ++i) row.push_back(w[static_cast<std::size_t>(t - i)]);
        for (int j = 1; j <= q; ++j) row.push_back(e[static_cast<std::size_t>(t - j)]);
        rows.push_back(std::move(row));
        targets.push_back(w[static_cast<std::size_t>(t)]);
    }
    return least_squares(rows, targets);
}

inline double clamp_forecast_value(double v) {
    if (std::isnan(v)) return 0.0;
    return std::clamp(v, -1e9, 1e9);
}

// Uniform draw in the open interval (0, hi); bit-stable given the engine.
inline double open_uniform(std::mt19937_64& rng, double hi) {
    const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    return u * hi;
}

} // namespace detail

/// Fits an ARIMA(p,d,q) by two-stage least squares on the differenced
/// series: a long autoregression estimates innovations, then the final
/// regression uses p lags and q lagged innovations. Singular fits drop the
/// MA terms, then fall back to an intercept-only model.
inline ArimaModel fit(std::span<const double> series, const ArimaOrder& order) {
    if (order.p < 0 || order.d < 0 || order.q < 0 || (order.p + order.q < 1 && order.d < 1))
        throw InvalidInput("fit: order must difference or regress on something");
    const int required = std::max(30, 3 * (order.p + order.q) + order.d);
    if (static_cast<int>(series.size()) < required) throw InsufficientData("fit: series too short for order");

    ArimaModel m;
    m.order = order;

    // Heads of every intermediate differencing level, for re-integration.
    std::vector<double> level(series.begin(), series.end());
    for (int k = 0; k < order.d; ++k) {
        m.integration_heads.push_back(level.back());
        for (std::size_t i = 0; i + 1 < level.size(); ++i) level[i] = level[i + 1] - level[i];
        level.pop_back();
    }
    const std::vector<double> w = std::move(level);
    const int n = static_cast<int>(w.size());
    const int p = order.p, q = order.q;

    std::vector<double> e(w.size(), 0.0);
    bool estimated = false;
    if (p + q > 0) {
        if (q > 0) {
            const int long_order = std::max(1, std::min(10, n / 4));
            if (auto stage1 = detail::arma_regression(w, e, long_order, 0, long_order)) {
                for (int t = long_order; t < n; ++t) {
                    double pred = (*stage1)[0];
                    for (int i = 1; i <= long_order; ++i)
                        pred += (*stage1)[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(t - i)];
                    e[static_cast<std::size_t>(t)] = w[static_cast<std::size_t>(t)] - pred;
                }
                const int start = std::max(p, long_order + q);
                if (auto stage2 = detail::arma_regression(w, e, p, q, start)) {
                    m.intercept = (*stage2)[0];
                    m.ar.assign(stage2->begin() + 1, stage2->begin() + 1 + p);
                    m.ma.assign(stage2->begin() + 1 + p, stage2->end());
                    estimated = true;
                }
            }
        }
        if (!estimated && p > 0) {
            // Pure AR fallback (also the direct path when q == 0).
            if (auto fitted = detail::arma_regression(w, e, p, 0, p)) {
                m.intercept = (*fitted)[0];
                m.ar.assign(fitted->begin() + 1, fitted->end());
                m.ma_dropped = q > 0;
                estimated = true;
            }
        }
        if (!estimated) {
            // Intercept-only: the series carries no usable lag structure.
            double mean = 0.0;
            for (double v : w) mean += v;
            m.intercept = n > 0 ? mean / n : 0.0;
            m.ma_dropped = q > 0;
        }
    }

    const int np = static_cast<int>(m.ar.size());
    const int nq = static_cast<int>(m.ma.size());
    if (nq > 0) {
        // In-sample innovations of the final model, recursively.
        std::vector<double> r(w.size(), 0.0);
        for (int t = np; t < n; ++t) {
            double pred = m.intercept;
            for (int i = 1; i <= np; ++i) pred += m.ar[static_cast<std::size_t>(i - 1)] * w[static_cast<std::size_t>(t - i)];
            for (int j = 1; j <= nq; ++j)
                if (t - j >= 0) pred += m.ma[static_cast<std::size_t>(j - 1)] * r[static_cast<std::size_t>(t - j)];
            r[static_cast<std::size_t>(t)] = w[static_cast<std::size_t>(t)] - pred;
        }
        m.tail_residuals.assign(r.end() - nq, r.end());
    }
    if (np > 0) m.tail_values.assign(w.end() - np, w.end());
    return m;
}

/// h-step-ahead mean forecast: recursive AR/MA propagation with future
/// innovations at zero, then re-integration to the level scale. Output is
/// always finite.
inline std::vector<double> forecast(const ArimaModel& m, int h) {
    if (h < 1) throw InvalidInput("forecast: horizon must be >= 1");
    std::vector<double> w(m.tail_values);
    std::vector<double> e(m.tail_residuals);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(h));
    const int np = static_cast<int>(m.ar.size());
    const int nq = static_cast<int>(m.ma.size());
    for (int s = 0; s < h; ++s) {
        double v = m.intercept;
        for (int i = 1; i <= np; ++i) v += m.ar[static_cast<std::size_t>(i - 1)] * w[w.size() - static_cast<std::size_t>(i)];
        for (int j = 1; j <= nq; ++j)
            if (static_cast<std::size_t>(j) <= e.size()) v += m.ma[static_cast<std::size_t>(j - 1)] * e[e.size() - static_cast<std::size_t>(j)];
        v = detail::clamp_forecast_value(v);
        out.push_back(v);
        if (np > 0) w.push_back(v);
        if (nq > 0) e.push_back(0.0);
    }
    // Undifference, innermost level outward.
    for (int k = m.order.d - 1; k >= 0; --k) {
        double running = m.integration_heads[static_cast<std::size_t>(k)];
        for (double& v : out) {
            running = detail::clamp_forecast_value(running + v);
            v = running;
        }
    }
    return out;
}

/// Unwraps a horizontal viewport coordinate series so seam crossings form a
/// continuous path: each sample may move by +-width to get closest to the
/// running previous value.
inline std::vector<double> width_adjust(std::span<const double> series, double width) {
    std::vector<double> out;
    out.reserve(series.size());
    double prev = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        double x = series[i];
        if (i > 0) {
            if (std::abs(x + width - prev) < std::abs(x - prev)) x += width;
            else if (std::abs(x - width - prev) < std::abs(x - prev)) x -= width;
        }
        out.push_back(x);
        prev = x;
    }
    return out;
}

/// Stationarity transform chain: seam unwrap and +width shift (horizontal
/// axis only), seeded sub-pixel jitter, then natural log.
inline TransformedSeries apply_transforms(std::span<const double> series, double width,
                                          std::uint64_t jitter_seed, bool horizontal) {
    TransformedSeries out;
    out.chain.shift = horizontal ? width : 0.0;
    out.chain.jitter_seed = jitter_seed;
    out.chain.log_applied = true;

    std::vector<double> values = horizontal ? width_adjust(series, width)
                                            : std::vector<double>(series.begin(), series.end());
    std::mt19937_64 rng(jitter_seed);
    for (double& v : values) {
        v += out.chain.shift;
        v += detail::open_uniform(rng, 0.1);
        if (v <= 0.0) throw InvalidState("apply_transforms: non-positive value after shift");
        v = std::log(v);
    }
    out.values = std::move(values);
    return out;
}

/// Maps forecast values back to viewport coordinates: exponentiation with
/// overflow clamped into [1, 2*width], then shift removal. Any final
/// mod-width wrap is the caller's concern.
inline std::vector<double> invert_forecast(std::span<const double> values, const TransformChain& chain,
                                           double width) {
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) {
        double z = chain.log_applied ? std::exp(v) : v;
        if (!std::isfinite(z) || z > 2.0 * width) z = 2.0 * width;
        if (z < 1.0) z = 1.0;
        out.push_back(z - chain.shift);
    }
    return out;
}

} // namespace parima
