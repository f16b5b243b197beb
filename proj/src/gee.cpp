#include "hybev/gee.hpp"

#include "hybev/errors.hpp"

#include <cmath>

namespace hybev {

double pearson_scale(const std::vector<double>& y, const std::vector<double>& mu,
                     const std::vector<double>& variance, std::size_t p) {
    const std::size_t n = y.size();
    if (mu.size() != n || variance.size() != n) {
        throw AlignmentError("pearson_scale inputs differ in length");
    }
    if (n <= p) {
        throw DegreesOfFreedomError("pearson scale needs N > p, got N=" + std::to_string(n) +
                                    ", p=" + std::to_string(p));
    }
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (variance[i] <= 0) throw DataError("variance function must be positive");
        const double e = (y[i] - mu[i]) / std::sqrt(variance[i]);
        acc += e * e;
    }
    return acc / static_cast<double>(n - p);
}

} // namespace hybev
