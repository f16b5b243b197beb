#include "hybev/forest.hpp"

#include "hybev/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace hybev {

using nlohmann::json;

BootstrapDraw subject_bootstrap(const std::vector<std::string>& subjects, Rng& rng) {
    if (subjects.empty()) throw DataError("no subjects to bootstrap");
    const std::size_t n = subjects.size();
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    BootstrapDraw draw;
    std::vector<char> drawn(n, 0);
    draw.in_bag.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = pick(rng);
        draw.in_bag.push_back(subjects[j]);
        drawn[j] = 1;
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (!drawn[j]) draw.oob.push_back(subjects[j]);
    }
    return draw;
}

std::vector<std::size_t> bootstrap_rows(const DesignMatrix& design, const BootstrapDraw& draw) {
    std::map<std::string, std::vector<std::size_t>> rows_of;
    for (std::size_t r = 0; r < design.n_rows(); ++r) {
        rows_of[design.subject_of_row[r]].push_back(r);
    }
    std::vector<std::size_t> rows;
    for (const auto& subject : draw.in_bag) {
        const auto it = rows_of.find(subject);
        if (it == rows_of.end()) throw DataError("bootstrap subject '" + subject + "' not in design");
        rows.insert(rows.end(), it->second.begin(), it->second.end());
    }
    return rows;
}

double Forest::predict(const std::vector<double>& row) const {
    double acc = 0;
    for (const auto& tree : trees) acc += tree.predict(row);
    return acc / static_cast<double>(trees.size());
}

Forest fit_forest(const DesignMatrix& design, const ForestParams& params, std::uint64_t seed) {
    if (params.ntrees < 1) throw UsageError("ntrees must be >= 1");
    if (design.n_rows() == 0) throw DataError("empty design");
    const std::vector<std::string> subjects = design.subjects();

    std::map<std::string, std::vector<std::size_t>> rows_of;
    for (std::size_t r = 0; r < design.n_rows(); ++r) {
        rows_of[design.subject_of_row[r]].push_back(r);
    }

    // one sort of the design per feature; per-tree orders are derived by
    // walking it and emitting each bootstrap copy
    const std::size_t n_features = design.n_cols();
    std::vector<std::vector<std::uint32_t>> design_order(n_features);
    {
        std::vector<std::uint32_t> base(design.n_rows());
        std::iota(base.begin(), base.end(), 0u);
        for (std::size_t f = 0; f < n_features; ++f) {
            design_order[f] = base;
            std::stable_sort(design_order[f].begin(), design_order[f].end(),
                             [&](std::uint32_t a, std::uint32_t b) {
                                 return design.rows[a][f] < design.rows[b][f];
                             });
        }
    }

    Forest forest;
    forest.params = params;
    forest.params.mtry = std::min(params.mtry, n_features);
    forest.feature_names = design.columns;

    TreeParams tp;
    tp.mtry = forest.params.mtry;
    tp.max_splits = kUnlimitedSplits;
    tp.min_leaf = params.min_leaf;

    std::vector<std::vector<std::uint32_t>> entries_of(design.n_rows());
    for (std::size_t b = 0; b < params.ntrees; ++b) {
        Rng rng = make_rng(mix_seed(seed, b));
        const BootstrapDraw draw = subject_bootstrap(subjects, rng);
        std::vector<std::size_t> rows = bootstrap_rows(design, draw);

        for (auto& v : entries_of) v.clear();
        for (std::size_t e = 0; e < rows.size(); ++e) {
            entries_of[rows[e]].push_back(static_cast<std::uint32_t>(e));
        }
        std::vector<std::vector<std::uint32_t>> order(n_features);
        for (std::size_t f = 0; f < n_features; ++f) {
            order[f].reserve(rows.size());
            for (const std::uint32_t rid : design_order[f]) {
                for (const std::uint32_t e : entries_of[rid]) order[f].push_back(e);
            }
        }

        forest.trees.push_back(
            fit_tree_with_order(design.rows, design.response, rows, std::move(order), tp, rng));
        forest.in_bag.push_back(draw.in_bag);
    }

    // OOB: average only trees whose bag excludes the row's subject
    std::vector<std::set<std::string>> bag_sets;
    bag_sets.reserve(params.ntrees);
    for (const auto& bag : forest.in_bag) bag_sets.emplace_back(bag.begin(), bag.end());

    double sse = 0;
    std::size_t scored = 0;
    for (std::size_t r = 0; r < design.n_rows(); ++r) {
        double acc = 0;
        std::size_t used = 0;
        for (std::size_t b = 0; b < forest.trees.size(); ++b) {
            if (bag_sets[b].count(design.subject_of_row[r])) continue;
            acc += forest.trees[b].predict(design.rows[r]);
            ++used;
        }
        if (used == 0) continue;
        const double err = design.response[r] - acc / static_cast<double>(used);
        sse += err * err;
        ++scored;
    }
    if (scored > 0) forest.oob_error = sse / static_cast<double>(scored);
    return forest;
}

namespace {

json tree_to_json(const RegressionTree& tree) {
    json nodes = json::array();
    for (const auto& node : tree.nodes) {
        nodes.push_back({{"f", node.feature},
                         {"t", node.threshold},
                         {"l", node.left},
                         {"r", node.right},
                         {"v", node.value}});
    }
    return nodes;
}

RegressionTree tree_from_json(const json& nodes) {
    RegressionTree tree;
    for (const auto& n : nodes) {
        TreeNode node;
        node.feature = n.at("f").get<int>();
        node.threshold = n.at("t").get<double>();
        node.left = n.at("l").get<int>();
        node.right = n.at("r").get<int>();
        node.value = n.at("v").get<double>();
        tree.nodes.push_back(node);
    }
    return tree;
}

} // namespace

std::string Forest::to_json() const {
    json j;
    j["format"] = "hybev-forest";
    j["version"] = 1;
    j["params"] = {{"ntrees", params.ntrees}, {"mtry", params.mtry}, {"min_leaf", params.min_leaf}};
    j["feature_names"] = feature_names;
    if (oob_error) j["oob_error"] = *oob_error;
    j["in_bag"] = in_bag;
    j["trees"] = json::array();
    for (const auto& tree : trees) j["trees"].push_back(tree_to_json(tree));
    return j.dump();
}

Forest Forest::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw IoError(std::string("forest JSON: ") + e.what());
    }
    if (j.value("format", "") != "hybev-forest" || j.value("version", 0) != 1) {
        throw IoError("not a version-1 hybev forest file");
    }
    Forest forest;
    forest.params.ntrees = j["params"]["ntrees"].get<std::size_t>();
    forest.params.mtry = j["params"]["mtry"].get<std::size_t>();
    forest.params.min_leaf = j["params"]["min_leaf"].get<std::size_t>();
    forest.feature_names = j["feature_names"].get<std::vector<std::string>>();
    if (j.contains("oob_error")) forest.oob_error = j["oob_error"].get<double>();
    forest.in_bag = j["in_bag"].get<std::vector<std::vector<std::string>>>();
    for (const auto& t : j["trees"]) forest.trees.push_back(tree_from_json(t));
    return forest;
}

} // namespace hybev
