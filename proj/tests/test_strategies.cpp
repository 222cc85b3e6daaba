#include "logfolio/strategies.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

using namespace logfolio;
namespace ts = test_support;

namespace {

// Simple-OLS slope of y on x, closed form.
double slope_oracle(const Series& y, const Series& x) {
    double xm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xm += x[i];
        ym += y[i];
    }
    xm /= static_cast<double>(x.size());
    ym /= static_cast<double>(x.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - xm) * (y[i] - ym);
        sxx += (x[i] - xm) * (x[i] - xm);
    }
    return sxy / sxx;
}

// Panel of funds cointegrated with one common trend: fund j carries white
// noise of std noise_std[j] on top of the shared log path.
AlignedPanel noisy_fund_panel(const Series& common_log, const std::vector<double>& noise_std,
                              std::uint64_t seed) {
    NormalSampler sampler(seed);
    std::vector<Series> cols(noise_std.size(), Series(common_log.size()));
    std::vector<std::string> codes;
    for (std::size_t j = 0; j < noise_std.size(); ++j) {
        codes.push_back("F" + std::to_string(j + 1));
        for (std::size_t i = 0; i < common_log.size(); ++i) {
            cols[j][i] = std::exp(common_log[i] + sampler.next(0.0, noise_std[j]));
        }
    }
    return ts::make_panel(codes, cols);
}

Series common_log_path(std::size_t n, std::uint64_t seed) {
    NormalSampler sampler(seed);
    Series log_path(n);
    double v = std::log(1.0);
    for (std::size_t i = 0; i < n; ++i) {
        log_path[i] = v;
        v += sampler.next(0.0004, 0.004);
    }
    return log_path;
}

}  // namespace

TEST(CashAccounting, AllNonPositiveWeights) {
    const auto c = cash_accounting({-0.5, -0.2, 0.0});
    EXPECT_DOUBLE_EQ(c.sum_positive, 0.0);
    EXPECT_DOUBLE_EQ(c.cash_fraction, 1.0);
    EXPECT_DOUBLE_EQ(c.margin_fraction, 0.0);
}

TEST(CashAccounting, FullyInvested) {
    const auto c = cash_accounting({0.6, 0.4});
    EXPECT_DOUBLE_EQ(c.sum_positive, 1.0);
    EXPECT_DOUBLE_EQ(c.cash_fraction, 0.0);
    EXPECT_DOUBLE_EQ(c.margin_fraction, 0.0);
}

TEST(CashAccounting, MarginWhenOverInvested) {
    const auto c = cash_accounting({0.9, 0.4, -0.1});
    EXPECT_NEAR(c.sum_positive, 1.3, 1e-15);
    EXPECT_DOUBLE_EQ(c.cash_fraction, 0.0);
    EXPECT_NEAR(c.margin_fraction, 0.3, 1e-15);
}

TEST(CashAccounting, PublishedLongShortVector) {
    // The worked long-short example: printed percentage betas, scaled to
    // fractions. The positive entries sum to 16.88%, so the true outlay is
    // 0.1688 of capital and 0.8312 sits in cash.
    const std::vector<double> betas{-0.0356, -0.0231, -0.0185, -0.0171, -0.0003,
                                    0.0048,  0.0052,  0.0371,  0.0377,  0.084};
    const auto c = cash_accounting(betas);
    EXPECT_NEAR(c.sum_positive, 0.1688, 1e-12);
    EXPECT_NEAR(c.cash_fraction, 0.8312, 1e-12);
    EXPECT_DOUBLE_EQ(c.margin_fraction, 0.0);
}

TEST(CashAccounting, PositivePlusNegativePartsEqualTotal) {
    // Dyadic weights keep every partial sum exact.
    const std::vector<double> betas{0.5, -0.25, 1.75, -0.125, 0.0, -2.5};
    const auto c = cash_accounting(betas);
    double neg = 0.0, total = 0.0;
    for (double b : betas) {
        neg += std::min(b, 0.0);
        total += b;
    }
    EXPECT_EQ(c.sum_positive + neg, total);
}

TEST(SelectFund, TwoIdenticalFundsTieByInputOrder) {
    ts::Rng rng(7);
    const Series prices = ts::random_prices(rng, 60);
    const auto panel = ts::make_panel({"A", "B"}, {prices, prices});
    const auto report = select_fund(panel);

    ASSERT_EQ(report.per_fund.size(), 2u);
    for (const auto& fr : report.per_fund) {
        EXPECT_NEAR(fr.beta, 1.0, 1e-9);
        for (double r : fr.residuals) EXPECT_NEAR(r, 0.0, 1e-12);
    }
    ASSERT_EQ(report.ranking.size(), 2u);
    EXPECT_EQ(report.ranking[0].code, "A");
    EXPECT_EQ(report.ranking[1].code, "B");
}

TEST(SelectFund, NineFundNoiseLadderRanksInConstructionOrder) {
    const Series common = common_log_path(252, 1001);
    std::vector<double> noise;
    for (int j = 1; j <= 9; ++j) noise.push_back(0.0015 * j);
    const auto panel = noisy_fund_panel(common, noise, 2002);
    const auto report = select_fund(panel);

    ASSERT_EQ(report.ranking.size(), 9u);
    for (int j = 1; j <= 9; ++j) {
        EXPECT_EQ(report.ranking[static_cast<std::size_t>(j - 1)].code,
                  "F" + std::to_string(j));
    }
    // Every fund covered exactly once.
    ASSERT_EQ(report.per_fund.size(), 9u);
    for (int j = 1; j <= 9; ++j) {
        EXPECT_EQ(report.per_fund[static_cast<std::size_t>(j - 1)].fund.code,
                  "F" + std::to_string(j));
    }
}

TEST(SelectFund, BetasMatchSimpleOlsOracle) {
    const Series common = common_log_path(120, 3003);
    const auto panel = noisy_fund_panel(common, {0.002, 0.004, 0.008}, 4004);
    const auto report = select_fund(panel);

    const LogPanel logs = log_transform(panel);
    for (std::size_t j = 0; j < 3; ++j) {
        const double expected = slope_oracle(report.index_series, logs.column(j));
        EXPECT_NEAR(report.per_fund[j].beta, expected, 1e-8);
    }
}

TEST(SelectFund, DuplicatedFundColumnGetsIdenticalNumbers) {
    const Series common = common_log_path(90, 5005);
    auto panel = noisy_fund_panel(common, {0.002, 0.005}, 6006);
    AlignedPanel with_dup = ts::make_panel(
        {"F1", "F2", "F2DUP"},
        {panel.column(0), panel.column(1), panel.column(1)});
    const auto report = select_fund(with_dup);

    const auto& orig = report.per_fund[1];
    const auto& dup = report.per_fund[2];
    EXPECT_NEAR(dup.beta, orig.beta, 1e-12);
    EXPECT_NEAR(dup.r_squared, orig.r_squared, 1e-12);
    EXPECT_NEAR(dup.diagnostics.whiteness_score, orig.diagnostics.whiteness_score, 1e-12);
    EXPECT_NEAR(dup.diagnostics.rel_spread, orig.diagnostics.rel_spread, 1e-12);
}

TEST(SelectFund, Preconditions) {
    ts::Rng rng(11);
    const Series p = ts::random_prices(rng, 60);
    EXPECT_THROW(select_fund(ts::make_panel({"A"}, {p})), PreconditionError);

    const Series small = ts::random_prices(rng, 10);
    EXPECT_THROW(select_fund(ts::make_panel({"A", "B"}, {small, small})), PreconditionError);

    StrategyOptions relaxed;
    relaxed.min_dates = 5;
    EXPECT_NO_THROW(select_fund(ts::make_panel({"A", "B"}, {small, small}), relaxed));
}

TEST(ReplicateFund, FundEqualToOneHolding) {
    ts::Rng rng(13);
    std::vector<Series> cols;
    for (int j = 0; j < 4; ++j) cols.push_back(ts::random_prices(rng, 80));
    const auto holdings = ts::make_panel({"H1", "H2", "H3", "H4"}, cols);
    const auto fund = ts::make_series("FUND", cols[0]);

    const auto plan = replicate_fund(fund, holdings);
    ASSERT_EQ(plan.weights.size(), 4u);
    EXPECT_NEAR(plan.weights[0].second, 1.0, 1e-8);
    for (std::size_t j = 1; j < 4; ++j) EXPECT_NEAR(plan.weights[j].second, 0.0, 1e-8);
    EXPECT_NEAR(plan.r_squared, 1.0, 1e-12);
    for (double r : plan.residuals) EXPECT_NEAR(r, 0.0, 1e-9);
}

TEST(ReplicateFund, ExactCombinationRecovered) {
    ts::Rng rng(17);
    const Series p1 = ts::random_prices(rng, 100);
    const Series p2 = ts::random_prices(rng, 100, 80.0, 0.0002, 0.015);
    Series fund_prices(100);
    for (std::size_t i = 0; i < 100; ++i) {
        fund_prices[i] = std::exp(0.4 * std::log(p1[i]) + 0.6 * std::log(p2[i]));
    }
    const auto holdings = ts::make_panel({"H1", "H2"}, {p1, p2});
    const auto plan = replicate_fund(ts::make_series("FUND", fund_prices), holdings);

    EXPECT_NEAR(plan.weights[0].second, 0.4, 1e-8);
    EXPECT_NEAR(plan.weights[1].second, 0.6, 1e-8);
    EXPECT_NEAR(plan.intercept, 0.0, 1e-8);
    EXPECT_GE(plan.r_squared, 1.0 - 1e-12);
    EXPECT_NEAR(plan.sum_positive, 1.0, 1e-8);
    EXPECT_FALSE(plan.target_rate.has_value());
}

TEST(ReplicateFund, WeightsCarryHoldingIdsInOrder) {
    ts::Rng rng(19);
    std::vector<Series> cols{ts::random_prices(rng, 50), ts::random_prices(rng, 50)};
    const auto holdings = ts::make_panel({"AAA", "BBB"}, cols);
    Series fund(50);
    for (std::size_t i = 0; i < 50; ++i) fund[i] = std::sqrt(cols[0][i] * cols[1][i]);
    const auto plan = replicate_fund(ts::make_series("F", fund), holdings);
    EXPECT_EQ(plan.weights[0].first.code, "AAA");
    EXPECT_EQ(plan.weights[1].first.code, "BBB");
}

TEST(ReplicateFund, InsufficientOverlapRejected) {
    ts::Rng rng(23);
    const auto holdings = ts::make_panel({"H1"}, {ts::random_prices(rng, 40)});
    // Fund overlaps the panel on only 10 dates.
    const auto fund = ts::make_series("F", ts::random_prices(rng, 10), 30);
    EXPECT_THROW(replicate_fund(fund, holdings), PreconditionError);
}

TEST(ConstructUltimate, SingleAssetOnExactCurve) {
    const double rate = 0.08;
    const std::size_t n = 120;
    Series prices(n);
    for (std::size_t i = 0; i < n; ++i) {
        prices[i] = std::exp(rate * static_cast<double>(i) / 252.0);
    }
    const auto panel = ts::make_panel({"H1"}, {prices});
    const auto plan = construct_ultimate(panel, rate);
    EXPECT_NEAR(plan.weights[0].second, 1.0, 1e-9);
    for (double r : plan.residuals) EXPECT_NEAR(r, 0.0, 1e-9);
    ASSERT_TRUE(plan.target_rate.has_value());
    EXPECT_DOUBLE_EQ(*plan.target_rate, rate);
}

TEST(ConstructUltimate, ZeroRateWithInterceptGivesAllZeroBetas) {
    ts::Rng rng(29);
    std::vector<Series> cols{ts::random_prices(rng, 60), ts::random_prices(rng, 60)};
    const auto panel = ts::make_panel({"H1", "H2"}, cols);
    const auto plan = construct_ultimate(panel, 0.0);
    for (const auto& [id, beta] : plan.weights) EXPECT_EQ(beta, 0.0);
    EXPECT_DOUBLE_EQ(plan.sum_positive, 0.0);
    EXPECT_DOUBLE_EQ(plan.cash_fraction, 1.0);
}

TEST(ConstructUltimate, RateHomogeneity) {
    ts::Rng rng(31);
    std::vector<Series> cols;
    std::vector<std::string> codes;
    for (int j = 0; j < 5; ++j) {
        cols.push_back(ts::random_prices(rng, 150, 20.0 + 10.0 * j, 0.0005, 0.012));
        codes.push_back("H" + std::to_string(j));
    }
    const auto panel = ts::make_panel(codes, cols);
    const auto base = construct_ultimate(panel, 0.04);
    const auto doubled = construct_ultimate(panel, 0.08);
    for (std::size_t j = 0; j < 5; ++j) {
        EXPECT_NEAR(doubled.weights[j].second, 2.0 * base.weights[j].second, 1e-10);
    }
    EXPECT_NEAR(doubled.sum_positive, 2.0 * base.sum_positive, 1e-10);
}

TEST(ConstructUltimate, NegativeRateRejected) {
    ts::Rng rng(37);
    const auto panel = ts::make_panel({"H"}, {ts::random_prices(rng, 60)});
    EXPECT_THROW(construct_ultimate(panel, -0.01), PreconditionError);
}

TEST(SweepTargetRate, SingletonMatchesConstruct) {
    ts::Rng rng(41);
    const auto panel =
        ts::make_panel({"H1", "H2"}, {ts::random_prices(rng, 80), ts::random_prices(rng, 80)});
    const auto plans = sweep_target_rate(panel, {0.06});
    ASSERT_EQ(plans.size(), 1u);
    const auto direct = construct_ultimate(panel, 0.06);
    for (std::size_t j = 0; j < 2; ++j) {
        EXPECT_EQ(plans[0].weights[j].second, direct.weights[j].second);
    }
}

TEST(SweepTargetRate, SumPositiveScalesWithRate) {
    ts::Rng rng(43);
    const auto panel =
        ts::make_panel({"H1", "H2", "H3"},
                       {ts::random_prices(rng, 100), ts::random_prices(rng, 100, 30.0),
                        ts::random_prices(rng, 100, 70.0)});
    const auto plans = sweep_target_rate(panel, {0.05, 0.10});
    ASSERT_EQ(plans.size(), 2u);
    EXPECT_NEAR(plans[1].sum_positive, 2.0 * plans[0].sum_positive, 1e-10);
    EXPECT_DOUBLE_EQ(*plans[0].target_rate, 0.05);
    EXPECT_DOUBLE_EQ(*plans[1].target_rate, 0.10);
}

TEST(SweepTargetRate, Validation) {
    ts::Rng rng(47);
    const auto panel = ts::make_panel({"H"}, {ts::random_prices(rng, 60)});
    EXPECT_THROW(sweep_target_rate(panel, {}), PreconditionError);
    EXPECT_THROW(sweep_target_rate(panel, {0.05, -0.01}), PreconditionError);
}

TEST(Strategies, PerAssetRescalingLeavesBetasUnchanged) {
    ts::Rng rng(53);
    const Series p1 = ts::random_prices(rng, 90);
    const Series p2 = ts::random_prices(rng, 90, 40.0);
    Series fund(90);
    for (std::size_t i = 0; i < 90; ++i) {
        fund[i] = std::exp(0.3 * std::log(p1[i]) + 0.5 * std::log(p2[i]) + 0.01);
    }

    const auto base_panel = ts::make_panel({"H1", "H2"}, {p1, p2});
    const auto base_rep = replicate_fund(ts::make_series("F", fund), base_panel);
    const auto base_con = construct_ultimate(base_panel, 0.08);

    // A 10:1 split on H1 and a currency redenomination on H2.
    Series p1s = p1, p2s = p2;
    for (auto& v : p1s) v /= 10.0;
    for (auto& v : p2s) v *= 7.2;
    const auto scaled_panel = ts::make_panel({"H1", "H2"}, {p1s, p2s});
    const auto scaled_rep = replicate_fund(ts::make_series("F", fund), scaled_panel);
    const auto scaled_con = construct_ultimate(scaled_panel, 0.08);

    for (std::size_t j = 0; j < 2; ++j) {
        EXPECT_NEAR(scaled_rep.weights[j].second, base_rep.weights[j].second, 1e-10);
        EXPECT_NEAR(scaled_con.weights[j].second, base_con.weights[j].second, 1e-10);
    }
    EXPECT_GT(std::abs(scaled_rep.intercept - base_rep.intercept), 1e-6);
}

TEST(Strategies, NoInterceptModeRuns) {
    ts::Rng rng(59);
    const Series p1 = ts::random_prices(rng, 70);
    Series fund(70);
    for (std::size_t i = 0; i < 70; ++i) fund[i] = std::exp(0.9 * std::log(p1[i]));
    StrategyOptions opts;
    opts.include_intercept = false;
    const auto plan = replicate_fund(ts::make_series("F", fund), ts::make_panel({"H1"}, {p1}), opts);
    EXPECT_NEAR(plan.weights[0].second, 0.9, 1e-8);
    EXPECT_DOUBLE_EQ(plan.intercept, 0.0);
}
