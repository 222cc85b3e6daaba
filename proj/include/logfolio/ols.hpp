#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "logfolio/errors.hpp"
#include "logfolio/types.hpp"

namespace logfolio {

// Result of one least-squares fit. `coefficients` follow the regressor
// column order; the intercept, when requested, is reported separately.
// `condition_number` is sigma_max/sigma_min of the matrix actually solved
// (including the intercept column when present).
struct RegressionFit {
    std::vector<double> coefficients;
    std::optional<double> intercept;
    double r_squared = 0.0;
    Series residuals;
    double condition_number = 0.0;
    std::size_t n_obs = 0;
};

namespace detail {

// Names the design columns that column-pivoted QR pushes past the numeric
// rank, mapped back to caller-facing labels.
inline std::string dependent_columns_message(const Eigen::MatrixXd& design, double threshold,
                                             bool include_intercept) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(threshold);
    const Eigen::Index rank = qr.rank();
    const auto& perm = qr.colsPermutation().indices();

    std::string cols;
    for (Eigen::Index j = rank; j < design.cols(); ++j) {
        if (!cols.empty()) cols += ", ";
        const Eigen::Index original = perm(j);
        if (include_intercept && original == 0) {
            cols += "intercept";
        } else {
            cols += "regressor " + std::to_string(original - (include_intercept ? 1 : 0));
        }
    }
    if (cols.empty()) return "rank-deficient design";
    return "rank-deficient design: column(s) {" + cols + "} linearly dependent on the rest";
}

}  // namespace detail

// Least squares of y on one or more regressor columns, solved through a
// singular value decomposition of the design matrix (never the normal
// equations). R-squared is centered when an intercept is present and
// uncentered otherwise. Rank deficiency is an error, not a repair:
// silently shrunk coefficients would change the cash accounting downstream.
inline RegressionFit fit(const Series& y, const std::vector<Series>& regressors,
                         bool include_intercept = true) {
    if (regressors.empty()) throw PreconditionError("fit: at least one regressor required");
    const std::size_t n = y.size();
    for (std::size_t j = 0; j < regressors.size(); ++j) {
        if (regressors[j].size() != n) {
            throw PreconditionError("fit: regressor " + std::to_string(j) + " has length " +
                                    std::to_string(regressors[j].size()) + ", expected " +
                                    std::to_string(n));
        }
    }
    const std::size_t k = regressors.size();
    const std::size_t p = k + (include_intercept ? 1 : 0);
    if (n < p + 1) {
        throw PreconditionError("fit: need at least " + std::to_string(p + 1) +
                                " observations for " + std::to_string(k) + " regressor(s), got " +
                                std::to_string(n));
    }

    Eigen::MatrixXd design(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    Eigen::Index col = 0;
    if (include_intercept) design.col(col++).setOnes();
    for (std::size_t j = 0; j < k; ++j, ++col) {
        design.col(col) = Eigen::Map<const Eigen::VectorXd>(regressors[j].data(),
                                                            static_cast<Eigen::Index>(n));
    }
    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(n));

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    const double sigma_max = sigma(0);
    const double sigma_min = sigma(sigma.size() - 1);
    const double tol =
        static_cast<double>(n) * std::numeric_limits<double>::epsilon() * sigma_max;
    if (!(sigma_min > tol)) {
        throw NumericError(
            detail::dependent_columns_message(design, tol / std::max(sigma_max, 1e-300),
                                              include_intercept));
    }

    Eigen::VectorXd coef =
        svd.matrixV() * (svd.matrixU().transpose() * yv).cwiseQuotient(sigma.head(sigma.size()));
    Eigen::VectorXd resid = yv - design * coef;

    const double ss_res = resid.squaredNorm();
    double ss_tot;
    if (include_intercept) {
        const double mean = yv.mean();
        ss_tot = (yv.array() - mean).matrix().squaredNorm();
    } else {
        ss_tot = yv.squaredNorm();
    }
    double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    if (include_intercept && r2 < 0.0) r2 = 0.0;  // rounding guard; SS_res <= SS_tot holds exactly

    RegressionFit result;
    result.n_obs = n;
    result.condition_number = sigma_max / sigma_min;
    result.r_squared = r2;
    result.residuals.assign(resid.data(), resid.data() + resid.size());
    Eigen::Index c = 0;
    if (include_intercept) result.intercept = coef(c++);
    for (std::size_t j = 0; j < k; ++j, ++c) result.coefficients.push_back(coef(c));
    return result;
}

// Fitted values of a previous fit on new regressor columns.
inline Series predict(const RegressionFit& fitted, const std::vector<Series>& regressors) {
    if (regressors.size() != fitted.coefficients.size()) {
        throw PreconditionError("predict: got " + std::to_string(regressors.size()) +
                                " regressor column(s), fit has " +
                                std::to_string(fitted.coefficients.size()));
    }
    const std::size_t n = regressors.empty() ? 0 : regressors.front().size();
    for (const auto& x : regressors) {
        if (x.size() != n) throw PreconditionError("predict: regressor lengths differ");
    }

    Series out(n, fitted.intercept.value_or(0.0));
    for (std::size_t j = 0; j < regressors.size(); ++j) {
        for (std::size_t i = 0; i < n; ++i) out[i] += fitted.coefficients[j] * regressors[j][i];
    }
    return out;
}

}  // namespace logfolio
