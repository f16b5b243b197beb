#pragma once

#include "hybev/rand.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace hybev {

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0;
    int left = -1;
    int right = -1;
    double value = 0; // leaf mean

    bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
    std::vector<TreeNode> nodes; // nodes[0] is the root

    double predict(const std::vector<double>& row) const {
        std::size_t i = 0;
        while (!nodes[i].is_leaf()) {
            i = static_cast<std::size_t>(row[static_cast<std::size_t>(nodes[i].feature)] <=
                                                 nodes[i].threshold
                                             ? nodes[i].left
                                             : nodes[i].right);
        }
        return nodes[i].value;
    }

    std::size_t n_splits() const;
};

inline constexpr std::size_t kUnlimitedSplits = std::numeric_limits<std::size_t>::max();

struct TreeParams {
    std::size_t mtry = 0; // 0 means all features
    std::size_t max_splits = kUnlimitedSplits;
    std::size_t min_leaf = 5;
};

/// Greedy SSE-reduction CART, grown best-first: the split budget goes to
/// the leaf with the largest reduction next. Split thresholds sit at
/// midpoints between consecutive distinct sorted values; ties break to
/// the lowest feature index, then the lowest threshold. Rows may repeat
/// (bootstrap duplicates count as separate observations). A constant
/// response yields a single-leaf tree.
RegressionTree fit_tree(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                        const std::vector<std::size_t>& rows, const TreeParams& params, Rng& rng);

/// Same, with the per-feature entry permutations (sorted by value, entry
/// e referring to rows[e]) supplied by the caller. Ensembles over the
/// same rows reuse one sort this way.
RegressionTree fit_tree_with_order(const std::vector<std::vector<double>>& X,
                                   const std::vector<double>& y,
                                   const std::vector<std::size_t>& rows,
                                   std::vector<std::vector<std::uint32_t>> order,
                                   const TreeParams& params, Rng& rng);

} // namespace hybev
