#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace incilab {

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;      // log-log intercept
    double residual_max = 0.0;   // max |log count - fitted|
    std::size_t used_pairs = 0;
    std::size_t dropped_zero = 0;
};

// Ordinary least squares on (log N, log count); zero counts are dropped and
// flagged (log of zero; the thickened-count regime is delta > 0 anyway).
inline FitResult fit_exponent(const std::vector<std::pair<double, double>>& pairs) {
    FitResult r;
    std::vector<std::pair<double, double>> logs;
    logs.reserve(pairs.size());
    for (const auto& [n, c] : pairs) {
        if (!(n > 0.0)) throw std::invalid_argument("fit_exponent: N must be positive");
        if (c > 0.0)
            logs.emplace_back(std::log(n), std::log(c));
        else
            ++r.dropped_zero;
    }
    if (logs.size() < 2)
        throw std::invalid_argument("fit_exponent: need at least 2 pairs with positive counts");

    double mx = 0, my = 0;
    for (const auto& [x, y] : logs) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(logs.size());
    my /= static_cast<double>(logs.size());
    double sxx = 0, sxy = 0;
    for (const auto& [x, y] : logs) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_exponent: all N equal");
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    for (const auto& [x, y] : logs)
        r.residual_max = std::max(r.residual_max, std::fabs(y - (r.intercept + r.slope * x)));
    r.used_pairs = logs.size();
    return r;
}

// A completed N-sweep against the predicted count exponent.
struct ScalingFit {
    std::vector<std::pair<double, double>> pairs;  // (N, count)
    FitResult fit;
    double predicted_exponent = 0.0;  // count bound exponent, 2 - 1/s
    double slack = 0.1;
    bool bound_respected = false;
    double delta_coefficient = 0.0;
};

inline ScalingFit make_scaling_fit(std::vector<std::pair<double, double>> pairs,
                                   double predicted_exponent, double slack,
                                   double delta_coefficient) {
    ScalingFit f;
    f.pairs = std::move(pairs);
    f.fit = fit_exponent(f.pairs);
    f.predicted_exponent = predicted_exponent;
    f.slack = slack;
    f.delta_coefficient = delta_coefficient;
    f.bound_respected = f.fit.slope <= predicted_exponent + slack;
    return f;
}

}  // namespace incilab
