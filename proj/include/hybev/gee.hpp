#pragma once

#include <cstddef>
#include <vector>

namespace hybev {

/// Pearson-residual scale estimate phi = sum(e_ij^2) / (N - p) with
/// e = (y - mu) / sqrt(v). N is y.size(); requires N > p and v > 0.
double pearson_scale(const std::vector<double>& y, const std::vector<double>& mu,
                     const std::vector<double>& variance, std::size_t p);

} // namespace hybev
