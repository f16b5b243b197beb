#pragma once

#include "hybev/trip.hpp"

#include <string>
#include <vector>

namespace hybev {

/// REML variance components of the random-intercept null model
/// y_ij = mean + b_i + e_ij.
struct VarianceComponents {
    double sigma_b2 = 0;    // between-subject variance
    double sigma_w2 = 0;    // within-subject variance
    double grand_mean = 0;  // GLS estimate of the overall mean
    double loglik_reml = 0;
};

/// Fits the null model by profiling the restricted likelihood over the
/// variance ratio with a 1-D bounded search. Needs at least two groups.
/// Panels with (numerically) zero within-group noise fall back to the
/// ANOVA moment estimators, where the profile has no interior optimum.
VarianceComponents fit_null_lmm(const std::vector<double>& y,
                                const std::vector<std::string>& group_of);

/// Convenience overload over a panel channel; grouping is "trip_id" or
/// "route".
VarianceComponents fit_null_lmm(const PanelDataset& panel, const std::string& response,
                                const std::string& grouping = "trip_id");

/// Intra-class correlation sigma_b^2 / (sigma_w^2 + sigma_b^2).
double icc(const VarianceComponents& vc);

} // namespace hybev
