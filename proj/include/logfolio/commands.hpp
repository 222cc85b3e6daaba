#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "logfolio/backtest.hpp"
#include "logfolio/errors.hpp"
#include "logfolio/logprice.hpp"
#include "logfolio/market_data.hpp"
#include "logfolio/report.hpp"
#include "logfolio/strategies.hpp"

// Command drivers shared by the CLI binary and the test suites. Each driver
// reads its input files, runs the corresponding pipeline, writes report.json
// plus the side CSVs into the output directory, and returns the report.

namespace logfolio {

struct CommandOptions {
    std::optional<Date> from;
    std::optional<Date> to;
    std::filesystem::path out_dir = ".";
    bool no_intercept = false;
    double cash_rate = 0.0;
    int days_per_year = 252;
};

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file '" + path.string() + "'");
    out << content;
}

inline StrategyOptions strategy_options(const CommandOptions& opts) {
    StrategyOptions s;
    s.include_intercept = !opts.no_intercept;
    s.days_per_year = opts.days_per_year;
    return s;
}

inline Json date_or_null(const std::optional<Date>& d) {
    return d ? Json(d->iso) : Json(nullptr);
}

inline std::vector<PriceSeries> load_prices_file(const std::filesystem::path& path,
                                                 const CommandOptions& opts, std::string& digest) {
    const std::string bytes = read_file(path);
    digest = content_digest(bytes);
    std::istringstream in(bytes);
    auto series = load_price_csv(in);
    auto filtered = filter_by_date(series, opts.from, opts.to);
    for (std::size_t i = 0; i < filtered.size(); ++i) {
        if (filtered[i].empty()) {
            throw PreconditionError("no observations left for '" + filtered[i].id.code +
                                    "' after date filter (had " + series[i].dates.front().iso +
                                    ".." + series[i].dates.back().iso + ")");
        }
    }
    return filtered;
}

inline HoldingsRecord load_holdings_file(const std::filesystem::path& path, std::string& digest) {
    const std::string bytes = read_file(path);
    digest = content_digest(bytes);
    std::istringstream in(bytes);
    return load_holdings(in);
}

// Selects the holdings' series from a price file, in filing order.
inline AlignedPanel holdings_panel(const std::vector<PriceSeries>& series,
                                   const HoldingsRecord& record) {
    std::vector<PriceSeries> picked;
    picked.reserve(record.holdings.size());
    for (const auto& id : record.holdings) {
        const PriceSeries* s = find_series(series, id);
        if (s == nullptr) {
            throw PreconditionError("holding '" + id.code + "' missing from the price file");
        }
        picked.push_back(*s);
    }
    return align(picked);
}

inline void write_dated_csv(const std::filesystem::path& path, const std::string& value_header,
                            const std::vector<Date>& dates, const Series& values) {
    std::string csv = "date," + value_header + "\n";
    for (std::size_t i = 0; i < dates.size(); ++i) {
        csv += dates[i].iso + "," + format_g12(values[i]) + "\n";
    }
    write_file(path, csv);
}

inline void finalize(RunReport& report, const CommandOptions& opts) {
    report.generated_at = utc_timestamp_now();
    const Json j = to_json(report);
    validate_report(j);
    write_file(opts.out_dir / "report.json", j.dump(2) + "\n");
}

inline void write_plan_residuals(const PortfolioPlan& plan, const std::vector<Date>& dates,
                                 const std::filesystem::path& path) {
    write_dated_csv(path, "residual", dates, plan.residuals);
}

inline void write_weights_csv(const PortfolioPlan& plan, const std::filesystem::path& path) {
    std::string csv = "code,beta\n";
    for (const auto& [id, beta] : plan.weights) {
        csv += id.code + "," + format_g12(beta) + "\n";
    }
    write_file(path, csv);
}

}  // namespace detail

// select: rank candidate funds against their equal-weight log index.
inline RunReport cmd_select(const std::filesystem::path& prices_path,
                            const CommandOptions& opts) {
    RunReport report;
    report.command = "select";
    std::string digest;
    const auto series = detail::load_prices_file(prices_path, opts, digest);
    report.inputs_digest["prices"] = digest;
    report.parameters = Json{{"prices", prices_path.string()},
                             {"from", detail::date_or_null(opts.from)},
                             {"to", detail::date_or_null(opts.to)},
                             {"intercept", !opts.no_intercept}};

    const AlignedPanel panel = align(series);
    const SelectionReport selection = select_fund(panel, detail::strategy_options(opts));
    detail::write_dated_csv(opts.out_dir / "index.csv", "log_index", panel.dates,
                            selection.index_series);
    for (const auto& fr : selection.per_fund) {
        detail::write_dated_csv(opts.out_dir / ("residual_" + fr.fund.code + ".csv"), "residual",
                                panel.dates, fr.residuals);
    }
    report.result = to_json(selection);
    detail::finalize(report, opts);
    return report;
}

// replicate: re-estimate a fund's top-holdings weights from price history.
inline RunReport cmd_replicate(const std::filesystem::path& fund_prices_path,
                               const std::filesystem::path& holdings_path,
                               const std::filesystem::path& holdings_prices_path,
                               const CommandOptions& opts) {
    RunReport report;
    report.command = "replicate";
    std::string fund_digest, holdings_digest, prices_digest;
    const HoldingsRecord record = detail::load_holdings_file(holdings_path, holdings_digest);
    const auto fund_series = detail::load_prices_file(fund_prices_path, opts, fund_digest);
    const auto stock_series = detail::load_prices_file(holdings_prices_path, opts, prices_digest);
    report.inputs_digest["fund_prices"] = fund_digest;
    report.inputs_digest["holdings"] = holdings_digest;
    report.inputs_digest["holdings_prices"] = prices_digest;
    report.parameters = Json{{"fund_prices", fund_prices_path.string()},
                             {"holdings", holdings_path.string()},
                             {"holdings_prices", holdings_prices_path.string()},
                             {"from", detail::date_or_null(opts.from)},
                             {"to", detail::date_or_null(opts.to)},
                             {"intercept", !opts.no_intercept}};

    const PriceSeries* fund = find_series(fund_series, record.fund);
    if (fund == nullptr) {
        throw PreconditionError("fund '" + record.fund.code + "' missing from the price file");
    }
    const AlignedPanel panel = detail::holdings_panel(stock_series, record);
    const PortfolioPlan plan = replicate_fund(*fund, panel, detail::strategy_options(opts));

    // Joint grid for the residual and replication overlays.
    std::vector<PriceSeries> joint_in;
    joint_in.push_back(*fund);
    for (auto& s : panel_to_series(panel)) joint_in.push_back(std::move(s));
    const AlignedPanel joint = align(joint_in);
    detail::write_plan_residuals(plan, joint.dates,
                                 opts.out_dir / ("residual_" + record.fund.code + ".csv"));
    detail::write_weights_csv(plan, opts.out_dir / "weights.csv");

    std::string overlay = "date,fund,replicated\n";
    for (std::size_t i = 0; i < joint.rows(); ++i) {
        const double actual = joint.values(static_cast<Eigen::Index>(i), 0);
        const double predicted_log = std::log(actual) - plan.residuals[i];
        overlay += joint.dates[i].iso + "," + format_g12(actual) + "," +
                   format_g12(std::exp(predicted_log)) + "\n";
    }
    detail::write_file(opts.out_dir / "replication.csv", overlay);

    Json result{{"fund", record.fund.code},
                {"as_of", record.as_of.iso},
                {"plan", to_json(plan)},
                {"residual_csv", "residual_" + record.fund.code + ".csv"},
                {"replication_csv", "replication.csv"}};
    if (record.disclosed_weights) {
        Json disclosed = Json::array();
        for (double w : *record.disclosed_weights) disclosed.push_back(detail::jnum(w));
        result["disclosed_weights"] = std::move(disclosed);
    }
    report.result = std::move(result);
    detail::finalize(report, opts);
    return report;
}

// construct/sweep: fit the constant-growth target on the holdings' log
// prices; one rate gives a single plan, several give the rate sweep.
inline RunReport cmd_construct(const std::filesystem::path& holdings_prices_path,
                               const std::vector<double>& rates, const CommandOptions& opts,
                               bool force_sweep = false) {
    if (rates.empty()) throw PreconditionError("construct: at least one rate required");
    const bool sweep = force_sweep || rates.size() > 1;

    RunReport report;
    report.command = sweep ? "sweep" : "construct";
    std::string digest;
    const auto series = detail::load_prices_file(holdings_prices_path, opts, digest);
    report.inputs_digest["holdings_prices"] = digest;
    Json rates_json = Json::array();
    for (double r : rates) rates_json.push_back(detail::jnum(r));
    report.parameters = Json{{"holdings_prices", holdings_prices_path.string()},
                             {"rates", std::move(rates_json)},
                             {"from", detail::date_or_null(opts.from)},
                             {"to", detail::date_or_null(opts.to)},
                             {"intercept", !opts.no_intercept},
                             {"days_per_year", opts.days_per_year}};

    const AlignedPanel panel = align(series);
    const auto plans = sweep_target_rate(panel, rates, detail::strategy_options(opts));

    if (sweep) {
        Json plans_json = Json::array();
        for (std::size_t i = 0; i < plans.size(); ++i) {
            const std::string suffix = "_" + std::to_string(i);
            const NavSeries nav = synthetic_nav(plans[i], panel, 1.0);
            detail::write_dated_csv(opts.out_dir / ("nav" + suffix + ".csv"), "nav", nav.dates,
                                    nav.nav);
            detail::write_plan_residuals(plans[i], panel.dates,
                                         opts.out_dir / ("residual_target" + suffix + ".csv"));
            detail::write_weights_csv(plans[i], opts.out_dir / ("weights" + suffix + ".csv"));
            Json pj = to_json(plans[i]);
            pj["nav_csv"] = "nav" + suffix + ".csv";
            plans_json.push_back(std::move(pj));
        }
        report.result = Json{{"plans", std::move(plans_json)}};
    } else {
        const NavSeries nav = synthetic_nav(plans[0], panel, 1.0);
        detail::write_dated_csv(opts.out_dir / "nav.csv", "nav", nav.dates, nav.nav);
        detail::write_plan_residuals(plans[0], panel.dates, opts.out_dir / "residual_target.csv");
        detail::write_weights_csv(plans[0], opts.out_dir / "weights.csv");
        report.result = Json{{"plan", to_json(plans[0])},
                             {"nav_csv", "nav.csv"},
                             {"residual_csv", "residual_target.csv"}};
    }
    detail::finalize(report, opts);
    return report;
}

// simulate: the two-asset counterexample against regressing on returns.
inline RunReport cmd_simulate(int steps, double mu_pct, double sigma_pct, std::uint64_t seed,
                              const CommandOptions& opts) {
    RunReport report;
    report.command = "simulate";
    report.parameters = Json{{"steps", steps},
                             {"mu", detail::jnum(mu_pct)},
                             {"sigma", detail::jnum(sigma_pct)},
                             {"seed", seed}};

    const CounterexampleResult sim = simulate_counterexample(steps, mu_pct, sigma_pct, 1.0, 1.0,
                                                             seed);
    std::string csv = "t,naive,actual,rebalanced\n";
    for (std::size_t t = 0; t < sim.naive_returns.size(); ++t) {
        csv += std::to_string(t + 1) + "," + format_g12(sim.naive_returns[t]) + "," +
               format_g12(sim.actual_returns[t]) + "," + format_g12(sim.rebalanced_returns[t]) +
               "\n";
    }
    detail::write_file(opts.out_dir / "sim.csv", csv);
    report.result = to_json(sim);
    detail::finalize(report, opts);
    return report;
}

// backtest: construct at one rate, then walk both NAV implementations
// forward and measure tracking against the target curve.
inline RunReport cmd_backtest(const std::filesystem::path& holdings_prices_path, double rate,
                              double capital, const CommandOptions& opts) {
    RunReport report;
    report.command = "backtest";
    std::string digest;
    const auto series = detail::load_prices_file(holdings_prices_path, opts, digest);
    report.inputs_digest["holdings_prices"] = digest;
    report.parameters = Json{{"holdings_prices", holdings_prices_path.string()},
                             {"rate", detail::jnum(rate)},
                             {"capital", detail::jnum(capital)},
                             {"cash_rate", detail::jnum(opts.cash_rate)},
                             {"from", detail::date_or_null(opts.from)},
                             {"to", detail::date_or_null(opts.to)},
                             {"intercept", !opts.no_intercept},
                             {"days_per_year", opts.days_per_year}};

    const AlignedPanel panel = align(series);
    const PortfolioPlan plan = construct_ultimate(panel, rate, detail::strategy_options(opts));
    const NavSeries synthetic = synthetic_nav(plan, panel, capital);
    const NavSeries buy_hold =
        buy_and_hold_nav(plan, panel, capital, opts.cash_rate, opts.days_per_year);

    Series target(panel.rows());
    for (std::size_t i = 0; i < target.size(); ++i) {
        target[i] = capital * std::exp(rate * static_cast<double>(i) / opts.days_per_year);
    }
    const TrackingStats synthetic_stats = tracking_stats(synthetic, target, opts.days_per_year);
    const TrackingStats buy_hold_stats = tracking_stats(buy_hold, target, opts.days_per_year);

    double divergence = 0.0;
    for (std::size_t i = 0; i < panel.rows(); ++i) {
        divergence = std::max(divergence, std::abs(synthetic.nav[i] - buy_hold.nav[i]));
    }

    detail::write_dated_csv(opts.out_dir / "nav.csv", "nav", synthetic.dates, synthetic.nav);
    detail::write_dated_csv(opts.out_dir / "nav_buy_hold.csv", "nav", buy_hold.dates,
                            buy_hold.nav);
    detail::write_plan_residuals(plan, panel.dates, opts.out_dir / "residual_target.csv");
    detail::write_weights_csv(plan, opts.out_dir / "weights.csv");
    report.result = Json{{"plan", to_json(plan)},
                         {"synthetic", to_json(synthetic_stats)},
                         {"buy_and_hold", to_json(buy_hold_stats)},
                         {"max_nav_divergence", detail::jnum(divergence)},
                         {"nav_csv", "nav.csv"},
                         {"buy_hold_nav_csv", "nav_buy_hold.csv"}};
    detail::finalize(report, opts);
    return report;
}

// validate: chronological holdout of the replication regression.
inline RunReport cmd_validate(const std::filesystem::path& fund_prices_path,
                              const std::filesystem::path& holdings_prices_path,
                              double holdout_fraction, const CommandOptions& opts) {
    RunReport report;
    report.command = "validate";
    std::string fund_digest, prices_digest;
    const auto fund_series = detail::load_prices_file(fund_prices_path, opts, fund_digest);
    const auto stock_series = detail::load_prices_file(holdings_prices_path, opts, prices_digest);
    report.inputs_digest["fund_prices"] = fund_digest;
    report.inputs_digest["holdings_prices"] = prices_digest;
    report.parameters = Json{{"fund_prices", fund_prices_path.string()},
                             {"holdings_prices", holdings_prices_path.string()},
                             {"holdout", detail::jnum(holdout_fraction)},
                             {"from", detail::date_or_null(opts.from)},
                             {"to", detail::date_or_null(opts.to)},
                             {"intercept", !opts.no_intercept}};

    if (fund_series.size() != 1) {
        throw PreconditionError("validate: fund price file must contain exactly one instrument, got " +
                                std::to_string(fund_series.size()));
    }

    std::vector<PriceSeries> joint_in;
    joint_in.push_back(fund_series.front());
    for (const auto& s : stock_series) joint_in.push_back(s);
    const AlignedPanel joint = align(joint_in);

    AlignedPanel regressors;
    regressors.ids.assign(joint.ids.begin() + 1, joint.ids.end());
    regressors.dates = joint.dates;
    regressors.values = joint.values.rightCols(joint.values.cols() - 1);

    Series target(joint.rows());
    for (std::size_t i = 0; i < joint.rows(); ++i) {
        target[i] = std::log(joint.values(static_cast<Eigen::Index>(i), 0));
    }

    const HoldoutReport holdout =
        holdout_validate(target, regressors, holdout_fraction, detail::strategy_options(opts));
    report.result = to_json(holdout);
    detail::finalize(report, opts);
    return report;
}

}  // namespace logfolio
