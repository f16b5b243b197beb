#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace hybev {

using RowPredictor = std::function<double(const std::vector<double>&)>;

/// Marginalization importance: replace feature k by draws from its
/// empirical distribution, average the predictions, and report the
/// relative MSE change (MSE_marginalized - MSE_full) / MSE_full. Uses
/// the whole column when it has at most n_draws rows, otherwise n_draws
/// values sampled without replacement.
double variable_importance(const RowPredictor& model, const std::vector<std::vector<double>>& X,
                           const std::vector<double>& y, std::size_t feature,
                           std::size_t n_draws = 256, std::uint64_t seed = 0);

} // namespace hybev
