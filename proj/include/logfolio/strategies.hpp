#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "logfolio/diagnostics.hpp"
#include "logfolio/errors.hpp"
#include "logfolio/logprice.hpp"
#include "logfolio/market_data.hpp"
#include "logfolio/ols.hpp"

namespace logfolio {

// Knobs shared by the three portfolio algorithms. The intercept is on by
// default; without it the residual mean is not forced to zero and the
// whiteness check loses its anchor. `--no-intercept` style callers can
// still request the literal through-the-origin reading.
struct StrategyOptions {
    bool include_intercept = true;
    std::size_t min_dates = 30;  // floor on usable common dates
    int days_per_year = 252;     // trading-day convention for the t grid
};

// One candidate fund's regression against the equal-weight log index.
struct FundRegression {
    InstrumentId fund;
    double beta = 0.0;
    double r_squared = 0.0;
    ResidualDiagnostics diagnostics;
    Series residuals;
};

struct SelectionReport {
    Series index_series;  // C_t
    std::vector<FundRegression> per_fund;
    std::vector<InstrumentId> ranking;  // whitest residuals first
};

// Cash ledger of a long-short weight vector. Short proceeds stay locked
// until positions close, so the actual outlay is the positive weights only.
struct CashAccounting {
    double sum_positive = 0.0;   // S
    double cash_fraction = 0.0;  // 1-S when S <= 1
    double margin_fraction = 0.0;  // S-1 when S > 1
};

inline CashAccounting cash_accounting(const std::vector<double>& betas) {
    CashAccounting c;
    for (double b : betas) c.sum_positive += std::max(b, 0.0);
    c.cash_fraction = std::max(0.0, 1.0 - c.sum_positive);
    c.margin_fraction = std::max(0.0, c.sum_positive - 1.0);
    return c;
}

// A fitted long-short portfolio: per-instrument weights (negative = short),
// the cash position implied by the locked-proceeds rule, and residual
// diagnostics of the fit that produced it.
struct PortfolioPlan {
    std::vector<std::pair<InstrumentId, double>> weights;
    double intercept = 0.0;
    double sum_positive = 0.0;
    double cash_fraction = 0.0;
    double margin_fraction = 0.0;
    std::optional<double> target_rate;  // per annum; set by construct_ultimate
    double r_squared = 0.0;
    ResidualDiagnostics diagnostics;
    Series residuals;

    std::vector<double> betas() const {
        std::vector<double> out;
        out.reserve(weights.size());
        for (const auto& [id, b] : weights) out.push_back(b);
        return out;
    }
};

namespace detail {

inline PortfolioPlan make_plan(const std::vector<InstrumentId>& ids, const RegressionFit& f,
                               const Series& dependent, std::optional<double> target_rate) {
    PortfolioPlan plan;
    for (std::size_t j = 0; j < ids.size(); ++j) plan.weights.emplace_back(ids[j], f.coefficients[j]);
    plan.intercept = f.intercept.value_or(0.0);
    const CashAccounting cash = cash_accounting(f.coefficients);
    plan.sum_positive = cash.sum_positive;
    plan.cash_fraction = cash.cash_fraction;
    plan.margin_fraction = cash.margin_fraction;
    plan.target_rate = target_rate;
    plan.r_squared = f.r_squared;
    plan.diagnostics = diagnose(f.residuals, dependent);
    plan.residuals = f.residuals;
    return plan;
}

inline std::vector<Series> log_columns(const LogPanel& logs) {
    std::vector<Series> cols;
    cols.reserve(logs.cols());
    for (std::size_t j = 0; j < logs.cols(); ++j) cols.push_back(logs.column(j));
    return cols;
}

}  // namespace detail

// Fund selection: regress the equal-weight log index on each candidate's
// log price and rank the candidates by residual whiteness. The neutral,
// index-like funds come out on top; out- and under-performers sink.
inline SelectionReport select_fund(const AlignedPanel& funds, const StrategyOptions& opts = {}) {
    if (funds.cols() < 2) throw PreconditionError("select_fund: need at least 2 candidate funds");
    if (funds.rows() < opts.min_dates) {
        throw PreconditionError("select_fund: " + std::to_string(funds.rows()) +
                                " common dates, need at least " + std::to_string(opts.min_dates));
    }

    const LogPanel logs = log_transform(funds);
    SelectionReport report;
    report.index_series = equal_weight_log_index(logs);

    std::vector<std::pair<std::string, ResidualDiagnostics>> labeled;
    for (std::size_t j = 0; j < funds.cols(); ++j) {
        const Series x = logs.column(j);
        const RegressionFit f = fit(report.index_series, {x}, opts.include_intercept);
        FundRegression fr;
        fr.fund = funds.ids[j];
        fr.beta = f.coefficients[0];
        fr.r_squared = f.r_squared;
        fr.residuals = f.residuals;
        fr.diagnostics = diagnose(f.residuals, report.index_series);
        labeled.emplace_back(fr.fund.code, fr.diagnostics);
        report.per_fund.push_back(std::move(fr));
    }

    for (const auto& code : rank_by_whiteness(labeled)) report.ranking.push_back(InstrumentId{code});
    return report;
}

// Fund replication: regress the fund's log price jointly on its holdings'
// log prices. Negative weights mean short positions; disclosed filing
// weights are never used.
inline PortfolioPlan replicate_fund(const PriceSeries& fund, const AlignedPanel& holdings,
                                    const StrategyOptions& opts = {}) {
    if (holdings.cols() < 1) throw PreconditionError("replicate_fund: need at least one holding");

    std::vector<PriceSeries> joint;
    joint.reserve(holdings.cols() + 1);
    joint.push_back(fund);
    for (auto& s : panel_to_series(holdings)) joint.push_back(std::move(s));
    const AlignedPanel aligned = align(joint);
    if (aligned.rows() < opts.min_dates) {
        throw PreconditionError("replicate_fund: fund and holdings share only " +
                                std::to_string(aligned.rows()) + " dates, need at least " +
                                std::to_string(opts.min_dates));
    }

    const LogPanel logs = log_transform(aligned);
    const Series y = logs.column(0);
    std::vector<Series> x;
    x.reserve(holdings.cols());
    for (std::size_t j = 1; j < logs.cols(); ++j) x.push_back(logs.column(j));

    const RegressionFit f = fit(y, x, opts.include_intercept);
    return detail::make_plan(holdings.ids, f, y, std::nullopt);
}

// Constant-growth construction: regress the target log curve r*t on the
// holdings' log prices. t runs over the aligned row index in trading-day
// years (row i maps to i / days_per_year, starting at 0).
inline PortfolioPlan construct_ultimate(const AlignedPanel& holdings, double annual_rate,
                                        const StrategyOptions& opts = {}) {
    if (annual_rate < 0.0) throw PreconditionError("construct_ultimate: rate must be >= 0");
    if (holdings.rows() < opts.min_dates) {
        throw PreconditionError("construct_ultimate: " + std::to_string(holdings.rows()) +
                                " common dates, need at least " + std::to_string(opts.min_dates));
    }

    Series target(holdings.rows());
    for (std::size_t i = 0; i < target.size(); ++i) {
        target[i] = annual_rate * (static_cast<double>(i) / opts.days_per_year);
    }

    const LogPanel logs = log_transform(holdings);
    const RegressionFit f = fit(target, detail::log_columns(logs), opts.include_intercept);
    return detail::make_plan(holdings.ids, f, target, annual_rate);
}

// One plan per requested rate, in input order. Doubling the rate doubles
// every beta (the fit is linear in the target), so the long outlay S grows
// with the desired rate.
inline std::vector<PortfolioPlan> sweep_target_rate(const AlignedPanel& holdings,
                                                    const std::vector<double>& rates,
                                                    const StrategyOptions& opts = {}) {
    if (rates.empty()) throw PreconditionError("sweep_target_rate: rate list is empty");
    for (double r : rates) {
        if (r < 0.0) throw PreconditionError("sweep_target_rate: rates must be >= 0");
    }
    std::vector<PortfolioPlan> plans;
    plans.reserve(rates.size());
    for (double r : rates) plans.push_back(construct_ultimate(holdings, r, opts));
    return plans;
}

}  // namespace logfolio
