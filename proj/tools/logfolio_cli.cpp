// logfolio command-line tool: fund selection, replication, constant-growth
// portfolio construction, simulation, backtesting, and holdout validation
// over daily price CSVs. Reports land in --out as report.json plus CSVs.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "logfolio/logfolio.hpp"

namespace {

// Exit codes, stable across releases:
//   0 success, 2 input parse error, 3 precondition violation,
//   4 numeric failure, 1 unexpected error.
constexpr int kExitParse = 2;
constexpr int kExitPrecondition = 3;
constexpr int kExitNumeric = 4;

std::vector<double> parse_rate_list(const std::string& text) {
    std::vector<double> rates;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, ',')) {
        const auto value = logfolio::parse_double(token);
        if (!value) throw logfolio::PreconditionError("invalid rate '" + token + "'");
        rates.push_back(*value);
    }
    if (rates.empty()) throw logfolio::PreconditionError("empty rate list");
    return rates;
}

struct CliFlags {
    std::string prices;
    std::string holdings;
    std::string holdings_prices;
    std::string from;
    std::string to;
    std::string out = ".";
    std::string rate;
    double holdout = 0.10;
    double cash_rate = 0.0;
    double capital = 1.0;
    int days_per_year = 252;
    bool no_intercept = false;
    int steps = 252;
    double mu = 0.2;
    double sigma = 5.0;
    std::uint64_t seed = 42;
};

logfolio::CommandOptions command_options(const CliFlags& f) {
    logfolio::CommandOptions opts;
    if (!f.from.empty()) opts.from = logfolio::Date::parse(f.from);
    if (!f.to.empty()) opts.to = logfolio::Date::parse(f.to);
    opts.out_dir = f.out;
    opts.no_intercept = f.no_intercept;
    opts.cash_rate = f.cash_rate;
    opts.days_per_year = f.days_per_year;
    return opts;
}

void add_window_flags(CLI::App* cmd, CliFlags& f) {
    cmd->add_option("--from", f.from, "start date (YYYY-MM-DD, inclusive)");
    cmd->add_option("--to", f.to, "end date (YYYY-MM-DD, inclusive)");
    cmd->add_option("--out", f.out, "output directory (default .)");
    cmd->add_flag("--no-intercept", f.no_intercept, "regress through the origin");
}

void print_summary(const logfolio::RunReport& report, const std::string& out_dir) {
    std::cout << report.command << ": report written to " << out_dir << "/report.json\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cointegration-style portfolio analytics on log prices"};
    app.require_subcommand(1);
    CliFlags f;

    auto* select = app.add_subcommand("select", "rank candidate funds against their equal-weight log index");
    select->add_option("--prices", f.prices, "price CSV of the candidate funds")->required();
    add_window_flags(select, f);

    auto* replicate = app.add_subcommand("replicate", "re-estimate a fund from its disclosed top holdings");
    replicate->add_option("--prices", f.prices, "price CSV containing the fund's series")->required();
    replicate->add_option("--holdings", f.holdings, "holdings CSV (fund,as_of,holding,weight)")->required();
    replicate->add_option("--holdings-prices", f.holdings_prices, "price CSV of the holding stocks")->required();
    add_window_flags(replicate, f);

    auto* construct = app.add_subcommand("construct", "fit a constant-growth portfolio on holding stocks");
    construct->add_option("--prices", f.prices, "price CSV of the holding stocks")->required();
    construct->add_option("--rate", f.rate, "annual target rate, or comma-separated list")->required();
    construct->add_option("--days-per-year", f.days_per_year, "trading days per year (default 252)");
    add_window_flags(construct, f);

    auto* sweep = app.add_subcommand("sweep", "construct across a list of target rates");
    sweep->add_option("--prices", f.prices, "price CSV of the holding stocks")->required();
    sweep->add_option("--rate", f.rate, "comma-separated annual target rates")->required();
    sweep->add_option("--days-per-year", f.days_per_year, "trading days per year (default 252)");
    add_window_flags(sweep, f);

    auto* simulate = app.add_subcommand("simulate", "two-asset counterexample to regressing on returns");
    simulate->add_option("--steps", f.steps, "number of daily steps (default 252)");
    simulate->add_option("--mu", f.mu, "mean daily return, percent (default 0.2)");
    simulate->add_option("--sigma", f.sigma, "daily return std dev, percent (default 5)");
    simulate->add_option("--seed", f.seed, "random seed (default 42)");
    simulate->add_option("--out", f.out, "output directory (default .)");

    auto* backtest = app.add_subcommand("backtest", "construct at one rate and walk both NAV implementations");
    backtest->add_option("--prices", f.prices, "price CSV of the holding stocks")->required();
    backtest->add_option("--rate", f.rate, "annual target rate")->required();
    backtest->add_option("--capital", f.capital, "initial capital (default 1.0)");
    backtest->add_option("--cash-rate", f.cash_rate, "annual rate earned by free cash (default 0)");
    backtest->add_option("--days-per-year", f.days_per_year, "trading days per year (default 252)");
    add_window_flags(backtest, f);

    auto* validate = app.add_subcommand("validate", "chronological holdout check of the replication fit");
    validate->add_option("--prices", f.prices, "price CSV with exactly the fund's series")->required();
    validate->add_option("--holdings-prices", f.holdings_prices, "price CSV of the holding stocks")->required();
    validate->add_option("--holdout", f.holdout, "holdout fraction in (0,1) (default 0.10)");
    add_window_flags(validate, f);

    CLI11_PARSE(app, argc, argv);

    try {
        const logfolio::CommandOptions opts = command_options(f);
        logfolio::RunReport report;
        if (select->parsed()) {
            report = logfolio::cmd_select(f.prices, opts);
        } else if (replicate->parsed()) {
            report = logfolio::cmd_replicate(f.prices, f.holdings, f.holdings_prices, opts);
        } else if (construct->parsed()) {
            report = logfolio::cmd_construct(f.prices, parse_rate_list(f.rate), opts);
        } else if (sweep->parsed()) {
            report = logfolio::cmd_construct(f.prices, parse_rate_list(f.rate), opts,
                                             /*force_sweep=*/true);
        } else if (simulate->parsed()) {
            report = logfolio::cmd_simulate(f.steps, f.mu, f.sigma, f.seed, opts);
        } else if (backtest->parsed()) {
            const auto rates = parse_rate_list(f.rate);
            if (rates.size() != 1) {
                throw logfolio::PreconditionError("backtest takes exactly one rate");
            }
            report = logfolio::cmd_backtest(f.prices, rates.front(), f.capital, opts);
        } else if (validate->parsed()) {
            report = logfolio::cmd_validate(f.prices, f.holdings_prices, f.holdout, opts);
        }
        print_summary(report, f.out);
        return 0;
    } catch (const logfolio::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const logfolio::PreconditionError& e) {
        std::cerr << "precondition error: " << e.what() << "\n";
        return kExitPrecondition;
    } catch (const logfolio::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
