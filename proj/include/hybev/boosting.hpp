#pragma once

#include "hybev/design.hpp"
#include "hybev/tree.hpp"

#include <string>
#include <vector>

namespace hybev {

struct BoostParams {
    std::size_t ntrees = 100;
    std::size_t nsplit = 1;
    double lambda = 0.05; // shrinkage in (0, 1]
    std::size_t min_leaf = 5;
};

/// Gradient boosting on residuals: F_0 = mean(y), each stage fits an
/// nsplit-split tree to y - F_k and updates F_{k+1} = F_k + lambda*T.
/// All stages stay available so a stage count can be chosen afterwards.
struct BoostedEnsemble {
    double init = 0;
    std::vector<RegressionTree> trees;
    double lambda = 0.05;
    BoostParams params;
    std::size_t selected_iterations = 0; // defaults to trees.size()
    std::vector<std::string> feature_names;

    double predict_at(const std::vector<double>& row, std::size_t stage) const;
    double predict(const std::vector<double>& row) const {
        return predict_at(row, selected_iterations);
    }

    std::string to_json() const;
    static BoostedEnsemble from_json(const std::string& text);
};

BoostedEnsemble fit_boost(const DesignMatrix& design, const BoostParams& params);

/// Leave-subject-out choice of the stage count: per fold, track held-out
/// MSE per stage, average the curves over folds and return the argmin
/// (smallest stage on ties). Stage 0 is the constant model. Folds
/// default to one subject each when empty.
std::size_t select_boost_iterations(const DesignMatrix& design, const BoostParams& params,
                                    std::vector<std::vector<std::string>> folds = {});

} // namespace hybev
