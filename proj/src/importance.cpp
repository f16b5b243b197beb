#include "hybev/importance.hpp"

#include "hybev/errors.hpp"
#include "hybev/rand.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace hybev {

double variable_importance(const RowPredictor& model, const std::vector<std::vector<double>>& X,
                           const std::vector<double>& y, std::size_t feature,
                           std::size_t n_draws, std::uint64_t seed) {
    const std::size_t n = X.size();
    if (n == 0 || y.size() != n) throw AlignmentError("importance inputs misaligned");
    if (feature >= X[0].size()) throw UsageError("feature index out of range");

    std::vector<double> pool;
    if (n <= n_draws) {
        pool.reserve(n);
        for (const auto& row : X) pool.push_back(row[feature]);
    } else {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::vector<std::size_t> chosen;
        chosen.reserve(n_draws);
        Rng rng = make_rng(seed);
        std::sample(idx.begin(), idx.end(), std::back_inserter(chosen), n_draws, rng);
        for (const std::size_t i : chosen) pool.push_back(X[i][feature]);
    }

    double sse_full = 0, sse_marg = 0;
    std::vector<double> row;
    for (std::size_t i = 0; i < n; ++i) {
        const double full = model(X[i]);
        row = X[i];
        double acc = 0;
        for (const double v : pool) {
            row[feature] = v;
            acc += model(row);
        }
        const double marg = acc / static_cast<double>(pool.size());
        sse_full += (y[i] - full) * (y[i] - full);
        sse_marg += (y[i] - marg) * (y[i] - marg);
    }
    if (sse_full <= 0) {
        return sse_marg > 0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    return (sse_marg - sse_full) / sse_full;
}

} // namespace hybev
