#pragma once

#include <cstddef>
#include <vector>

namespace hybev {

/// Truncated-linear spline basis z_k(x) = max(0, x - knot_k) with knots
/// placed at equally spaced quantiles. The penalty on its coefficients is
/// the identity, which is what lets the smooth be fit as a ridge block of
/// a mixed model.
struct SplineBasis {
    std::vector<double> knots; // strictly increasing

    std::size_t K() const { return knots.size(); }

    double basis(double x, std::size_t k) const {
        const double v = x - knots[k];
        return v > 0 ? v : 0.0;
    }
};

/// Knots at quantiles k/(K+1), k = 1..K; duplicated quantiles collapse.
/// x needs at least K+2 distinct values (BasisError otherwise).
SplineBasis spline_basis(const std::vector<double>& x, std::size_t K);

/// Type-7 quantile (sorted linear interpolation), p in [0,1].
double quantile(std::vector<double> x, double p);

} // namespace hybev
