#pragma once

#include "hybev/design.hpp"
#include "hybev/rand.hpp"
#include "hybev/tree.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hybev {

/// Whole-subject bootstrap: n draws with replacement from n subjects.
/// Every observation of a drawn subject enters the bag (duplicates
/// repeated), which preserves the within-trip correlation structure.
struct BootstrapDraw {
    std::vector<std::string> in_bag; // multiset in draw order
    std::vector<std::string> oob;    // subjects never drawn
};

BootstrapDraw subject_bootstrap(const std::vector<std::string>& subjects, Rng& rng);

/// Expands a draw into design row indices (drawn subject's rows repeated
/// per copy).
std::vector<std::size_t> bootstrap_rows(const DesignMatrix& design, const BootstrapDraw& draw);

struct ForestParams {
    std::size_t ntrees = 100;
    std::size_t mtry = 4; // clamped to the feature count
    std::size_t min_leaf = 5;
};

struct Forest {
    std::vector<RegressionTree> trees;
    std::vector<std::vector<std::string>> in_bag; // per tree, subject multiset
    ForestParams params;
    std::optional<double> oob_error; // absent when no observation was ever out of bag
    std::vector<std::string> feature_names;

    /// Mean over all trees.
    double predict(const std::vector<double>& row) const;

    std::string to_json() const;
    static Forest from_json(const std::string& text);
};

/// One tree per subject-level bootstrap; per-tree seeds derive from the
/// base seed so the result is identical no matter how trees would be
/// scheduled. The out-of-bag error scores each observation only with
/// trees whose bag excludes its subject.
Forest fit_forest(const DesignMatrix& design, const ForestParams& params, std::uint64_t seed);

} // namespace hybev
