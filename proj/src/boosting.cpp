#include "hybev/boosting.hpp"

#include "hybev/errors.hpp"
#include "hybev/rand.hpp"

#include <json.hpp>

#include <algorithm>
#include <numeric>
#include <set>

namespace hybev {

using nlohmann::json;

namespace {

std::vector<std::vector<std::uint32_t>> sort_columns(const std::vector<std::vector<double>>& X,
                                                     const std::vector<std::size_t>& rows) {
    const std::size_t n_features = X[rows[0]].size();
    std::vector<std::vector<std::uint32_t>> order(n_features);
    std::vector<std::uint32_t> base(rows.size());
    std::iota(base.begin(), base.end(), 0u);
    for (std::size_t f = 0; f < n_features; ++f) {
        order[f] = base;
        std::stable_sort(order[f].begin(), order[f].end(), [&](std::uint32_t a, std::uint32_t b) {
            return X[rows[a]][f] < X[rows[b]][f];
        });
    }
    return order;
}

BoostedEnsemble fit_boost_rows(const std::vector<std::vector<double>>& X,
                               const std::vector<double>& y,
                               const std::vector<std::size_t>& rows, const BoostParams& params) {
    if (params.lambda <= 0 || params.lambda > 1) throw UsageError("lambda must be in (0, 1]");
    if (rows.empty()) throw DataError("no rows to boost on");

    BoostedEnsemble model;
    model.lambda = params.lambda;
    model.params = params;

    double mean = 0;
    for (const std::size_t r : rows) mean += y[r];
    mean /= static_cast<double>(rows.size());
    model.init = mean;

    std::vector<double> residual(y.size(), 0.0);
    for (const std::size_t r : rows) residual[r] = y[r] - mean;

    // feature order never changes across stages, only the residuals do
    const auto base_order = sort_columns(X, rows);

    TreeParams tp;
    tp.mtry = 0; // boosting trees see every feature
    tp.max_splits = params.nsplit;
    tp.min_leaf = params.min_leaf;

    Rng rng = make_rng(0); // unused with mtry = all, but the API wants one
    for (std::size_t k = 0; k < params.ntrees; ++k) {
        RegressionTree tree = fit_tree_with_order(X, residual, rows, base_order, tp, rng);
        for (const std::size_t r : rows) {
            residual[r] -= params.lambda * tree.predict(X[r]);
        }
        model.trees.push_back(std::move(tree));
    }
    model.selected_iterations = model.trees.size();
    return model;
}

} // namespace

double BoostedEnsemble::predict_at(const std::vector<double>& row, std::size_t stage) const {
    double acc = init;
    const std::size_t upto = std::min(stage, trees.size());
    for (std::size_t k = 0; k < upto; ++k) acc += lambda * trees[k].predict(row);
    return acc;
}

BoostedEnsemble fit_boost(const DesignMatrix& design, const BoostParams& params) {
    std::vector<std::size_t> rows(design.n_rows());
    std::iota(rows.begin(), rows.end(), 0);
    BoostedEnsemble model = fit_boost_rows(design.rows, design.response, rows, params);
    model.feature_names = design.columns;
    return model;
}

std::size_t select_boost_iterations(const DesignMatrix& design, const BoostParams& params,
                                    std::vector<std::vector<std::string>> folds) {
    const std::vector<std::string> subjects = design.subjects();
    if (subjects.size() < 2) throw IdentifiabilityError("need at least two subjects to select");
    if (folds.empty()) {
        for (const auto& s : subjects) folds.push_back({s});
    }

    std::vector<double> curve(params.ntrees + 1, 0.0);
    for (const auto& fold : folds) {
        const std::set<std::string> held(fold.begin(), fold.end());
        std::vector<std::size_t> train_rows, test_rows;
        for (std::size_t r = 0; r < design.n_rows(); ++r) {
            (held.count(design.subject_of_row[r]) ? test_rows : train_rows).push_back(r);
        }
        if (train_rows.empty() || test_rows.empty()) continue;
        const BoostedEnsemble model =
            fit_boost_rows(design.rows, design.response, train_rows, params);

        std::vector<double> pred(test_rows.size(), model.init);
        for (std::size_t stage = 0; stage <= params.ntrees; ++stage) {
            if (stage > 0) {
                for (std::size_t i = 0; i < test_rows.size(); ++i) {
                    pred[i] += model.lambda * model.trees[stage - 1].predict(design.rows[test_rows[i]]);
                }
            }
            double sse = 0;
            for (std::size_t i = 0; i < test_rows.size(); ++i) {
                const double err = design.response[test_rows[i]] - pred[i];
                sse += err * err;
            }
            curve[stage] += sse / static_cast<double>(test_rows.size());
        }
    }

    std::size_t best = 0;
    for (std::size_t stage = 1; stage < curve.size(); ++stage) {
        if (curve[stage] < curve[best]) best = stage;
    }
    return best;
}

std::string BoostedEnsemble::to_json() const {
    json j;
    j["format"] = "hybev-boost";
    j["version"] = 1;
    j["init"] = init;
    j["lambda"] = lambda;
    j["params"] = {{"ntrees", params.ntrees},
                   {"nsplit", params.nsplit},
                   {"lambda", params.lambda},
                   {"min_leaf", params.min_leaf}};
    j["selected_iterations"] = selected_iterations;
    j["feature_names"] = feature_names;
    j["trees"] = json::array();
    for (const auto& tree : trees) {
        json nodes = json::array();
        for (const auto& node : tree.nodes) {
            nodes.push_back({{"f", node.feature},
                             {"t", node.threshold},
                             {"l", node.left},
                             {"r", node.right},
                             {"v", node.value}});
        }
        j["trees"].push_back(nodes);
    }
    return j.dump();
}

BoostedEnsemble BoostedEnsemble::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw IoError(std::string("boost JSON: ") + e.what());
    }
    if (j.value("format", "") != "hybev-boost" || j.value("version", 0) != 1) {
        throw IoError("not a version-1 hybev boosting file");
    }
    BoostedEnsemble model;
    model.init = j["init"].get<double>();
    model.lambda = j["lambda"].get<double>();
    model.params.ntrees = j["params"]["ntrees"].get<std::size_t>();
    model.params.nsplit = j["params"]["nsplit"].get<std::size_t>();
    model.params.lambda = j["params"]["lambda"].get<double>();
    model.params.min_leaf = j["params"]["min_leaf"].get<std::size_t>();
    model.selected_iterations = j["selected_iterations"].get<std::size_t>();
    model.feature_names = j["feature_names"].get<std::vector<std::string>>();
    for (const auto& t : j["trees"]) {
        RegressionTree tree;
        for (const auto& n : t) {
            TreeNode node;
            node.feature = n.at("f").get<int>();
            node.threshold = n.at("t").get<double>();
            node.left = n.at("l").get<int>();
            node.right = n.at("r").get<int>();
            node.value = n.at("v").get<double>();
            tree.nodes.push_back(node);
        }
        model.trees.push_back(std::move(tree));
    }
    return model;
}

} // namespace hybev
