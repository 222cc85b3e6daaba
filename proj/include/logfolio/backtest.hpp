#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "logfolio/diagnostics.hpp"
#include "logfolio/errors.hpp"
#include "logfolio/logprice.hpp"
#include "logfolio/market_data.hpp"
#include "logfolio/ols.hpp"
#include "logfolio/strategies.hpp"

namespace logfolio {

// Dated net-asset-value path. nav[0] equals initial_capital exactly.
struct NavSeries {
    std::vector<Date> dates;
    Series nav;
    double initial_capital = 0.0;
};

struct TrackingStats {
    double mean_abs_error = 0.0;  // on log(nav) - log(target)
    double max_abs_error = 0.0;
    double realized_annual_rate = 0.0;
    double correlation = 0.0;  // Pearson, on the log series
};

// Holdout split and the residual diagnostics on both sides of it.
struct HoldoutReport {
    ResidualDiagnostics in_sample;
    ResidualDiagnostics out_of_sample;
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
};

namespace detail {

inline std::size_t column_of(const AlignedPanel& panel, const InstrumentId& id) {
    for (std::size_t j = 0; j < panel.cols(); ++j) {
        if (panel.ids[j] == id) return j;
    }
    throw PreconditionError("instrument '" + id.code + "' missing from panel");
}

}  // namespace detail

// NAV of the log-linear combination the regression actually fits:
// nav_t = capital * exp(sum_i beta_i * (ln P_i(t) - ln P_i(0))).
// This is the curve that needs no rebalancing; the intercept cancels.
inline NavSeries synthetic_nav(const PortfolioPlan& plan, const AlignedPanel& panel,
                               double capital) {
    if (capital <= 0.0) throw PreconditionError("synthetic_nav: capital must be positive");
    if (panel.rows() == 0) throw PreconditionError("synthetic_nav: empty panel");

    std::vector<std::size_t> cols;
    cols.reserve(plan.weights.size());
    for (const auto& [id, beta] : plan.weights) cols.push_back(detail::column_of(panel, id));

    NavSeries out;
    out.dates = panel.dates;
    out.initial_capital = capital;
    out.nav.resize(panel.rows());
    for (std::size_t t = 0; t < panel.rows(); ++t) {
        double log_growth = 0.0;
        for (std::size_t w = 0; w < plan.weights.size(); ++w) {
            const auto col = static_cast<Eigen::Index>(cols[w]);
            log_growth += plan.weights[w].second *
                          (std::log(panel.values(static_cast<Eigen::Index>(t), col)) -
                           std::log(panel.values(0, col)));
        }
        out.nav[t] = capital * std::exp(log_growth);
    }
    out.nav[0] = capital;
    return out;
}

// Literal implementation: buy the longs, open the shorts, and hold the share
// counts fixed. Short proceeds sit in a locked account at zero interest until
// the position closes; free cash accrues simple daily interest at cash_rate.
// Margin plans (S > 1) are rejected: the borrow cost is unspecified.
inline NavSeries buy_and_hold_nav(const PortfolioPlan& plan, const AlignedPanel& panel,
                                  double capital, double cash_rate = 0.0,
                                  int days_per_year = 252) {
    if (capital <= 0.0) throw PreconditionError("buy_and_hold_nav: capital must be positive");
    if (panel.rows() == 0) throw PreconditionError("buy_and_hold_nav: empty panel");
    if (plan.margin_fraction > 0.0) {
        throw PreconditionError(
            "buy_and_hold_nav: plan requires margin borrowing, which is unsupported");
    }

    struct Position {
        std::size_t col;
        double shares;  // positive = long, negative = short
    };
    std::vector<Position> positions;
    double locked_proceeds = 0.0;
    for (const auto& [id, beta] : plan.weights) {
        if (beta == 0.0) continue;
        const std::size_t col = detail::column_of(panel, id);
        const double p0 = panel.values(0, static_cast<Eigen::Index>(col));
        positions.push_back(Position{col, capital * beta / p0});
        if (beta < 0.0) locked_proceeds += capital * (-beta);
    }
    const double cash0 = capital * plan.cash_fraction;

    NavSeries out;
    out.dates = panel.dates;
    out.initial_capital = capital;
    out.nav.resize(panel.rows());
    out.nav[0] = capital;
    for (std::size_t t = 1; t < panel.rows(); ++t) {
        double value = locked_proceeds +
                       cash0 * (1.0 + cash_rate * static_cast<double>(t) / days_per_year);
        for (const auto& pos : positions) {
            value += pos.shares *
                     panel.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(pos.col));
        }
        if (!(value > 0.0)) {
            throw NumericError("buy_and_hold_nav: portfolio value non-positive at " +
                               panel.dates[t].iso);
        }
        out.nav[t] = value;
    }
    return out;
}

// Tracking quality of a NAV path against a target path, measured in log
// space so a constant multiple shows up as a constant error level.
inline TrackingStats tracking_stats(const NavSeries& nav, const Series& target,
                                    int days_per_year = 252) {
    const std::size_t n = nav.nav.size();
    if (target.size() != n) throw PreconditionError("tracking_stats: series lengths differ");
    if (n < 2) throw PreconditionError("tracking_stats: need at least 2 observations");

    Series log_nav(n);
    Series log_target(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(nav.nav[i] > 0.0) || !(target[i] > 0.0)) {
            throw PreconditionError("tracking_stats: values must be positive");
        }
        log_nav[i] = std::log(nav.nav[i]);
        log_target[i] = std::log(target[i]);
    }

    TrackingStats stats;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = std::abs(log_nav[i] - log_target[i]);
        stats.mean_abs_error += e;
        stats.max_abs_error = std::max(stats.max_abs_error, e);
    }
    stats.mean_abs_error /= static_cast<double>(n);
    stats.realized_annual_rate =
        (log_nav[n - 1] - log_nav[0]) * days_per_year / static_cast<double>(n - 1);

    const double mean_a = detail::sample_mean(log_nav);
    const double mean_b = detail::sample_mean(log_target);
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = log_nav[i] - mean_a;
        const double db = log_target[i] - mean_b;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    if (saa > 0.0 && sbb > 0.0) {
        stats.correlation = sab / std::sqrt(saa * sbb);
    } else {
        stats.correlation = (saa == 0.0 && sbb == 0.0) ? 1.0 : 0.0;
    }
    return stats;
}

// Chronological holdout: fit on the earliest floor((1-f)*n) rows, diagnose
// residuals there and on the reserved tail. The split is never shuffled.
inline HoldoutReport holdout_validate(const Series& target, const AlignedPanel& regressors,
                                      double holdout_fraction = 0.10,
                                      const StrategyOptions& opts = {}) {
    const std::size_t n = target.size();
    if (regressors.rows() != n) {
        throw PreconditionError("holdout_validate: target and panel row counts differ");
    }
    if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
        throw PreconditionError("holdout_validate: fraction must lie in (0,1)");
    }

    const std::size_t k = regressors.cols();
    const auto train = static_cast<std::size_t>(
        std::floor((1.0 - holdout_fraction) * static_cast<double>(n)));
    const std::size_t test = n - train;
    const std::size_t train_floor = std::max<std::size_t>(k + 2, 30);
    if (train < train_floor || test < 3) {
        throw PreconditionError("holdout_validate: too few rows (train " + std::to_string(train) +
                                ", test " + std::to_string(test) + ")");
    }

    const LogPanel logs = log_transform(regressors);
    std::vector<Series> x_train(k), x_test(k);
    for (std::size_t j = 0; j < k; ++j) {
        const Series col = logs.column(j);
        x_train[j].assign(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(train));
        x_test[j].assign(col.begin() + static_cast<std::ptrdiff_t>(train), col.end());
    }
    const Series y_train(target.begin(), target.begin() + static_cast<std::ptrdiff_t>(train));
    const Series y_test(target.begin() + static_cast<std::ptrdiff_t>(train), target.end());

    const RegressionFit f = fit(y_train, x_train, opts.include_intercept);
    const Series predicted = predict(f, x_test);
    Series out_resid(test);
    for (std::size_t i = 0; i < test; ++i) out_resid[i] = y_test[i] - predicted[i];

    HoldoutReport report;
    report.train_rows = train;
    report.test_rows = test;
    report.in_sample = diagnose(f.residuals, y_train);
    report.out_of_sample = diagnose(out_resid, y_test);
    return report;
}

}  // namespace logfolio
