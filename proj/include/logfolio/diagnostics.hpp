#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "logfolio/errors.hpp"
#include "logfolio/types.hpp"

namespace logfolio {

// Mechanical stand-in for eyeballing a residual chart: small spread relative
// to the dependent series and no positive persistence read as "white".
// The composite score ranks candidates; the raw residual series still goes
// into every report so the chart check stays available.
struct ResidualDiagnostics {
    double mean = 0.0;
    double std_dev = 0.0;        // sample (n-1) standard deviation
    double lag1_autocorr = 0.0;  // 0 by convention for constant series
    double rel_spread = 0.0;     // std(residuals) / std(dependent)
    double whiteness_score = 0.0;  // rel_spread * (1 + max(0, lag1_autocorr)); lower = whiter
};

namespace detail {

inline double sample_mean(const Series& x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

inline double sample_std(const Series& x, double mean) {
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

}  // namespace detail

inline ResidualDiagnostics diagnose(const Series& residuals, const Series& dependent) {
    if (residuals.size() != dependent.size()) {
        throw PreconditionError("diagnose: residuals and dependent series lengths differ");
    }
    if (residuals.size() < 3) throw PreconditionError("diagnose: need at least 3 observations");

    ResidualDiagnostics d;
    d.mean = detail::sample_mean(residuals);
    d.std_dev = detail::sample_std(residuals, d.mean);

    double denom = 0.0;
    double numer = 0.0;
    for (std::size_t i = 0; i < residuals.size(); ++i) {
        const double a = residuals[i] - d.mean;
        denom += a * a;
        if (i + 1 < residuals.size()) numer += a * (residuals[i + 1] - d.mean);
    }
    d.lag1_autocorr = denom > 0.0 ? numer / denom : 0.0;

    const double dep_std = detail::sample_std(dependent, detail::sample_mean(dependent));
    if (dep_std > 0.0) {
        d.rel_spread = d.std_dev / dep_std;
    } else {
        d.rel_spread = d.std_dev == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    d.whiteness_score = d.rel_spread * (1.0 + std::max(0.0, d.lag1_autocorr));
    return d;
}

// Ascending whiteness score; ties broken by rel_spread, then input order.
inline std::vector<std::string> rank_by_whiteness(
    const std::vector<std::pair<std::string, ResidualDiagnostics>>& diags) {
    if (diags.empty()) throw PreconditionError("rank_by_whiteness: empty input");

    std::vector<std::size_t> order(diags.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& da = diags[a].second;
        const auto& db = diags[b].second;
        if (da.whiteness_score != db.whiteness_score) {
            return da.whiteness_score < db.whiteness_score;
        }
        return da.rel_spread < db.rel_spread;
    });

    std::vector<std::string> labels;
    labels.reserve(diags.size());
    for (std::size_t i : order) labels.push_back(diags[i].first);
    return labels;
}

}  // namespace logfolio
