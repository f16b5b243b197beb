#include "hybev/tree.hpp"

#include "hybev/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace hybev {

std::size_t RegressionTree::n_splits() const {
    std::size_t count = 0;
    for (const auto& node : nodes) {
        if (!node.is_leaf()) ++count;
    }
    return count;
}

namespace {

struct SplitChoice {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0;
    double gain = 0;
    std::size_t n_left = 0;
    double sum_left = 0;
};

std::vector<std::size_t> sample_features(std::size_t n_features, std::size_t mtry, Rng& rng) {
    std::vector<std::size_t> all(n_features);
    std::iota(all.begin(), all.end(), 0);
    if (mtry == 0 || mtry >= n_features) return all;
    std::vector<std::size_t> chosen;
    chosen.reserve(mtry);
    std::sample(all.begin(), all.end(), std::back_inserter(chosen), mtry, rng);
    return chosen; // std::sample keeps ascending order
}

// Candidate leaf with its best split precomputed. The heap pops the
// largest SSE reduction first, so a finite split budget lands where it
// pays most; ties fall back to creation order.
struct Candidate {
    std::size_t node_id = 0;
    std::size_t order = 0;
    std::size_t begin = 0, end = 0; // segment in every sorted column
    double sum = 0, sumsq = 0;
    SplitChoice split;
};

struct CandidateLess {
    bool operator()(const Candidate& a, const Candidate& b) const {
        if (a.split.gain != b.split.gain) return a.split.gain < b.split.gain;
        return a.order > b.order;
    }
};

class Grower {
public:
    Grower(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
           const std::vector<std::size_t>& rows, std::vector<std::vector<std::uint32_t>> order,
           const TreeParams& params, Rng& rng)
        : x_(X), y_(y), rows_(rows), order_(std::move(order)), params_(params), rng_(rng),
          goes_left_(rows.size(), 0), scratch_(rows.size()) {}

    RegressionTree grow() {
        double sum = 0, sumsq = 0;
        for (const std::size_t r : rows_) {
            sum += y_[r];
            sumsq += y_[r] * y_[r];
        }
        frontier_.push(make_candidate(0, rows_.size(), sum, sumsq, true));

        std::size_t splits = 0;
        while (splits < params_.max_splits && !frontier_.empty() &&
               frontier_.top().split.found) {
            const Candidate c = frontier_.top();
            frontier_.pop();
            ++splits;
            apply_split(c, splits < params_.max_splits);
        }
        return std::move(tree_);
    }

private:
    double value_at(std::uint32_t entry, std::size_t feature) const {
        return x_[rows_[entry]][feature];
    }

    Candidate make_candidate(std::size_t begin, std::size_t end, double sum, double sumsq,
                             bool want_split) {
        Candidate c;
        c.node_id = tree_.nodes.size();
        c.order = next_order_++;
        c.begin = begin;
        c.end = end;
        c.sum = sum;
        c.sumsq = sumsq;
        TreeNode leaf;
        leaf.value = sum / static_cast<double>(end - begin);
        tree_.nodes.push_back(leaf);
        if (want_split && end - begin >= 2 * params_.min_leaf && end - begin >= 2) {
            c.split = best_split(begin, end, sum);
        }
        return c;
    }

    SplitChoice best_split(std::size_t begin, std::size_t end, double sum) {
        SplitChoice best;
        const std::size_t size = end - begin;
        const double parent_score = sum * sum / static_cast<double>(size);
        const auto features = sample_features(x_[rows_[0]].size(), params_.mtry, rng_);
        for (const std::size_t f : features) {
            const auto& ord = order_[f];
            double sum_left = 0;
            for (std::size_t i = begin; i + 1 < end; ++i) {
                sum_left += y_[rows_[ord[i]]];
                const double xv = value_at(ord[i], f);
                const double xn = value_at(ord[i + 1], f);
                if (xv == xn) continue;
                const std::size_t n_left = i + 1 - begin;
                if (n_left < params_.min_leaf || size - n_left < params_.min_leaf) continue;
                const double sum_right = sum - sum_left;
                const double gain = sum_left * sum_left / static_cast<double>(n_left) +
                                    sum_right * sum_right / static_cast<double>(size - n_left) -
                                    parent_score;
                if (gain > best.gain) {
                    best.found = true;
                    best.feature = f;
                    best.threshold = 0.5 * (xv + xn);
                    best.gain = gain;
                    best.n_left = n_left;
                    best.sum_left = sum_left;
                }
            }
        }
        if (best.gain <= 0) best.found = false;
        return best;
    }

    void apply_split(const Candidate& c, bool evaluate_children) {
        const auto& ord0 = order_[c.split.feature];
        for (std::size_t i = c.begin; i < c.end; ++i) {
            goes_left_[ord0[i]] = value_at(ord0[i], c.split.feature) <= c.split.threshold ? 1 : 0;
        }
        for (auto& ord : order_) {
            std::size_t put = 0, deferred = 0;
            for (std::size_t i = c.begin; i < c.end; ++i) {
                if (goes_left_[ord[i]]) {
                    ord[c.begin + put++] = ord[i];
                } else {
                    scratch_[deferred++] = ord[i];
                }
            }
            std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(deferred),
                      ord.begin() + static_cast<std::ptrdiff_t>(c.begin + put));
        }

        const std::size_t mid = c.begin + c.split.n_left;
        double sumsq_left = 0;
        for (std::size_t i = c.begin; i < mid; ++i) {
            const double v = y_[rows_[order_[0][i]]];
            sumsq_left += v * v;
        }

        TreeNode& parent = tree_.nodes[c.node_id];
        parent.feature = static_cast<int>(c.split.feature);
        parent.threshold = c.split.threshold;

        Candidate left =
            make_candidate(c.begin, mid, c.split.sum_left, sumsq_left, evaluate_children);
        tree_.nodes[c.node_id].left = static_cast<int>(left.node_id);
        Candidate right = make_candidate(mid, c.end, c.sum - c.split.sum_left,
                                         c.sumsq - sumsq_left, evaluate_children);
        tree_.nodes[c.node_id].right = static_cast<int>(right.node_id);
        frontier_.push(left);
        frontier_.push(right);
    }

    const std::vector<std::vector<double>>& x_;
    const std::vector<double>& y_;
    const std::vector<std::size_t>& rows_;
    std::vector<std::vector<std::uint32_t>> order_;
    const TreeParams& params_;
    Rng& rng_;
    RegressionTree tree_;
    std::priority_queue<Candidate, std::vector<Candidate>, CandidateLess> frontier_;
    std::vector<char> goes_left_;
    std::vector<std::uint32_t> scratch_;
    std::size_t next_order_ = 0;
};

} // namespace

RegressionTree fit_tree_with_order(const std::vector<std::vector<double>>& X,
                                   const std::vector<double>& y,
                                   const std::vector<std::size_t>& rows,
                                   std::vector<std::vector<std::uint32_t>> order,
                                   const TreeParams& params, Rng& rng) {
    if (rows.empty()) throw DataError("cannot fit a tree on zero rows");
    if (X.empty() || X[0].empty()) throw DataError("tree needs at least one feature");
    if (params.mtry > X[0].size()) {
        throw UsageError("mtry " + std::to_string(params.mtry) + " exceeds feature count " +
                         std::to_string(X[0].size()));
    }
    if (params.min_leaf < 1) throw UsageError("min_leaf must be >= 1");
    return Grower(X, y, rows, std::move(order), params, rng).grow();
}

RegressionTree fit_tree(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                        const std::vector<std::size_t>& rows, const TreeParams& params, Rng& rng) {
    if (rows.empty()) throw DataError("cannot fit a tree on zero rows");
    if (X.empty() || X[0].empty()) throw DataError("tree needs at least one feature");
    const std::size_t n_features = X[0].size();
    std::vector<std::vector<std::uint32_t>> order(n_features);
    std::vector<std::uint32_t> base(rows.size());
    std::iota(base.begin(), base.end(), 0u);
    for (std::size_t f = 0; f < n_features; ++f) {
        order[f] = base;
        std::stable_sort(order[f].begin(), order[f].end(), [&](std::uint32_t a, std::uint32_t b) {
            return X[rows[a]][f] < X[rows[b]][f];
        });
    }
    return fit_tree_with_order(X, y, rows, std::move(order), params, rng);
}

} // namespace hybev
