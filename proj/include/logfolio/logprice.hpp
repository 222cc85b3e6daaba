#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "logfolio/errors.hpp"
#include "logfolio/market_data.hpp"
#include "logfolio/types.hpp"

namespace logfolio {

// Elementwise natural log of an aligned price panel. Same shape, same
// ids/dates; exp() of any cell recovers the source price.
struct LogPanel {
    std::vector<InstrumentId> ids;
    std::vector<Date> dates;
    Eigen::MatrixXd values;  // dates x ids

    std::size_t rows() const { return dates.size(); }
    std::size_t cols() const { return ids.size(); }

    Series column(std::size_t j) const {
        Series out(rows());
        for (std::size_t i = 0; i < rows(); ++i) out[i] = values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        return out;
    }
};

inline LogPanel log_transform(const AlignedPanel& panel) {
    LogPanel out;
    out.ids = panel.ids;
    out.dates = panel.dates;
    out.values = panel.values.array().log().matrix();
    return out;
}

inline double simple_return(double p1, double p2) {
    if (p1 <= 0.0) throw PreconditionError("simple_return: p1 must be positive");
    return p2 / p1 - 1.0;
}

inline double log_return(double p1, double p2) {
    if (p1 <= 0.0 || p2 <= 0.0) throw PreconditionError("log_return: prices must be positive");
    return std::log(p2) - std::log(p1);
}

// Per-date arithmetic mean of all log-price columns: the equal-weight
// log index C_t the selection algorithm regresses against.
inline Series equal_weight_log_index(const LogPanel& panel) {
    if (panel.cols() == 0) throw PreconditionError("equal_weight_log_index: panel has no columns");
    Eigen::VectorXd mean = panel.values.rowwise().mean();
    return Series(mean.data(), mean.data() + mean.size());
}

// Inverse standard normal CDF. Acklam's rational approximation followed by
// one Halley refinement against erfc, good to ~1e-15 over (0,1).
inline double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw PreconditionError("inverse_normal_cdf: p must lie strictly in (0,1)");
    }

    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    const double err = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
    const double u = err * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
    return x - u / (1.0 + x * u / 2.0);
}

// Standard normal CDF (companion to inverse_normal_cdf).
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Seeded inverse-CDF normal sampler. Uniforms come straight from the 53
// high bits of mt19937_64, so streams are identical across platforms.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : gen_(seed) {}

    // Uniform draw in the open interval (0,1).
    double next_uniform() {
        for (;;) {
            const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
            if (u > 0.0) return u;
        }
    }

    double next(double mean, double stddev) {
        return mean + stddev * inverse_normal_cdf(next_uniform());
    }

private:
    std::mt19937_64 gen_;
};

// Output of the two-asset rebalancing counterexample. All three return
// series cover steps 1..n; `rebalanced` reproduces `actual` to rounding,
// `naive` does not once the weights drift away from 1/2.
struct CounterexampleResult {
    Series naive_returns;       // r_t / 4, the fixed-weight shortcut
    Series actual_returns;      // C_t / C_{t-1} - 1
    Series rebalanced_returns;  // weights re-read at t-1
    double max_abs_deviation = 0.0;
    std::uint64_t seed = 0;
};

// Core simulation with caller-supplied daily return draws (already in
// decimal units). Exposed so tests can inject degenerate draw sequences.
template <typename DrawFn>
CounterexampleResult simulate_counterexample_with(int steps, double a0, double b0, DrawFn&& draw,
                                                  std::uint64_t seed = 0) {
    if (steps < 1) throw PreconditionError("simulate_counterexample: step count must be positive");
    if (a0 <= 0.0 || b0 <= 0.0) {
        throw PreconditionError("simulate_counterexample: initial prices must be positive");
    }

    CounterexampleResult result;
    result.seed = seed;
    result.naive_returns.reserve(static_cast<std::size_t>(steps));
    result.actual_returns.reserve(static_cast<std::size_t>(steps));
    result.rebalanced_returns.reserve(static_cast<std::size_t>(steps));

    double a = a0;
    double b = b0;
    double c_prev = (a + b) / 2.0;
    for (int t = 0; t < steps; ++t) {
        const double r = draw();
        const double w_a = a / (a + b);  // weight of A entering this step
        a *= 1.0 + r;
        b *= 1.0 - r / 2.0;
        const double c = (a + b) / 2.0;

        const double naive = r / 4.0;
        const double actual = c / c_prev - 1.0;
        const double rebalanced = w_a * r + (1.0 - w_a) * (-r / 2.0);

        result.naive_returns.push_back(naive);
        result.actual_returns.push_back(actual);
        result.rebalanced_returns.push_back(rebalanced);
        result.max_abs_deviation = std::max(result.max_abs_deviation, std::abs(naive - actual));
        c_prev = c;
    }
    return result;
}

// Two-asset counterexample: A compounds at r_t, B at -r_t/2, the portfolio
// holds both at equal initial weight. mu and sigma are in percent per day
// (the draw is divided by 100). Draws that would push a price non-positive
// are rejected and redrawn.
inline CounterexampleResult simulate_counterexample(int steps, double mu_pct, double sigma_pct,
                                                    double a0, double b0, std::uint64_t seed) {
    if (steps < 1) throw PreconditionError("simulate_counterexample: step count must be positive");
    if (sigma_pct <= 0.0) throw PreconditionError("simulate_counterexample: sigma must be positive");

    NormalSampler sampler(seed);
    auto draw = [&]() {
        for (;;) {
            const double r = sampler.next(mu_pct, sigma_pct) / 100.0;
            if (1.0 + r > 0.0 && 1.0 - r / 2.0 > 0.0) return r;
        }
    };
    return simulate_counterexample_with(steps, a0, b0, draw, seed);
}

}  // namespace logfolio
