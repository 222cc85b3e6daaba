#pragma once

// Umbrella header: cointegration-style portfolio analytics on log prices.

#include "logfolio/backtest.hpp"
#include "logfolio/commands.hpp"
#include "logfolio/diagnostics.hpp"
#include "logfolio/errors.hpp"
#include "logfolio/logprice.hpp"
#include "logfolio/market_data.hpp"
#include "logfolio/ols.hpp"
#include "logfolio/report.hpp"
#include "logfolio/strategies.hpp"
#include "logfolio/types.hpp"
