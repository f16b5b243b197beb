#include "hybev/spline.hpp"

#include "hybev/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace hybev {

double quantile(std::vector<double> x, double p) {
    if (x.empty()) throw BasisError("quantile of an empty vector");
    std::sort(x.begin(), x.end());
    const double h = (static_cast<double>(x.size()) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, x.size() - 1);
    const double w = h - static_cast<double>(lo);
    return x[lo] + w * (x[hi] - x[lo]);
}

SplineBasis spline_basis(const std::vector<double>& x, std::size_t K) {
    if (K < 1) throw BasisError("need at least one knot");
    std::set<double> distinct(x.begin(), x.end());
    if (distinct.size() < K + 2) {
        throw BasisError("spline basis with K=" + std::to_string(K) + " needs at least " +
                         std::to_string(K + 2) + " distinct values, got " +
                         std::to_string(distinct.size()));
    }
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());

    SplineBasis basis;
    for (std::size_t k = 1; k <= K; ++k) {
        const double p = static_cast<double>(k) / static_cast<double>(K + 1);
        const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
        const std::size_t lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
        const double w = h - static_cast<double>(lo);
        const double knot = sorted[lo] + w * (sorted[hi] - sorted[lo]);
        if (basis.knots.empty() || knot > basis.knots.back()) basis.knots.push_back(knot);
    }
    if (basis.knots.empty()) throw BasisError("all candidate knots collapsed");
    return basis;
}

} // namespace hybev
