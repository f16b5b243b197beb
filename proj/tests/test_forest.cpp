#include "hybev/errors.hpp"
#include "hybev/forest.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

using namespace hybev;

namespace {

// small panel design: n_subjects groups with obs_per rows each,
// y = sin(4 x0) + 0.5 x1 + b_subject + noise
DesignMatrix grouped_design(std::size_t n_subjects, std::size_t obs_per, std::uint64_t seed,
                            double noise_sd = 0.2, double subject_sd = 0.5) {
    Rng rng = make_rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    DesignMatrix d;
    d.columns = {"x0", "x1", "x2"};
    for (std::size_t s = 0; s < n_subjects; ++s) {
        const double b = subject_sd * gauss(rng);
        for (std::size_t j = 0; j < obs_per; ++j) {
            const double x0 = unif(rng), x1 = unif(rng), x2 = unif(rng);
            d.rows.push_back({x0, x1, x2});
            d.response.push_back(std::sin(4.0 * x0) + 0.5 * x1 + b + noise_sd * gauss(rng));
            d.subject_of_row.push_back("s" + std::to_string(s));
        }
    }
    return d;
}

} // namespace

TEST_SUITE("forest") {

TEST_CASE("single-subject bootstrap fills the bag with that subject") {
    Rng rng = make_rng(0);
    const BootstrapDraw draw = subject_bootstrap({"only"}, rng);
    CHECK(draw.in_bag == std::vector<std::string>{"only"});
    CHECK(draw.oob.empty());
}

TEST_CASE("in-bag observation count equals copies times trip length") {
    DesignMatrix d;
    d.columns = {"x"};
    const std::size_t sizes[3] = {2, 3, 4};
    for (int s = 0; s < 3; ++s) {
        for (std::size_t j = 0; j < sizes[s]; ++j) {
            d.rows.push_back({static_cast<double>(j)});
            d.response.push_back(0.0);
            d.subject_of_row.push_back("s" + std::to_string(s));
        }
    }
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng = make_rng(seed);
        const BootstrapDraw draw = subject_bootstrap({"s0", "s1", "s2"}, rng);
        std::map<std::string, std::size_t> copies;
        for (const auto& s : draw.in_bag) ++copies[s];
        std::size_t expected = 0;
        for (const auto& [subject, count] : copies) {
            expected += count * sizes[subject.back() - '0'];
        }
        CHECK(bootstrap_rows(d, draw).size() == expected);
        CHECK(copies.size() + draw.oob.size() == 3);
    }
}

TEST_CASE("oob fraction approaches (1 - 1/n)^n") {
    std::vector<std::string> subjects;
    for (int i = 0; i < 100; ++i) subjects.push_back("s" + std::to_string(i));
    double frac = 0;
    const int n_seeds = 200;
    for (int seed = 0; seed < n_seeds; ++seed) {
        Rng rng = make_rng(1000 + seed);
        frac += static_cast<double>(subject_bootstrap(subjects, rng).oob.size()) / 100.0;
    }
    frac /= n_seeds;
    CHECK(std::abs(frac - 0.36603234127) < 0.05);
}

TEST_CASE("constant response panels predict the constant with zero oob error") {
    DesignMatrix d = grouped_design(6, 10, 3, 0.0, 0.0);
    for (auto& y : d.response) y = 4.0;
    const Forest forest = fit_forest(d, {20, 2, 2}, 0);
    CHECK(forest.predict(d.rows[0]) == 4.0);
    REQUIRE(forest.oob_error.has_value());
    CHECK(*forest.oob_error == 0.0);
}

TEST_CASE("a one-tree forest is that tree") {
    const DesignMatrix d = grouped_design(5, 8, 9);
    const Forest forest = fit_forest(d, {1, 3, 2}, 4);
    REQUIRE(forest.trees.size() == 1);
    for (const auto& row : d.rows) {
        CHECK(forest.predict(row) == forest.trees[0].predict(row));
    }
}

TEST_CASE("forest prediction is exactly the mean over trees") {
    const DesignMatrix d = grouped_design(6, 10, 21);
    const Forest forest = fit_forest(d, {5, 2, 3}, 7);
    for (std::size_t r = 0; r < d.n_rows(); r += 7) {
        double acc = 0;
        for (const auto& tree : forest.trees) acc += tree.predict(d.rows[r]);
        CHECK(forest.predict(d.rows[r]) == acc / 5.0);
    }
}

TEST_CASE("default hyperparameters follow the chosen setting") {
    const ForestParams params;
    CHECK(params.ntrees == 100);
    CHECK(params.mtry == 4);
}

TEST_CASE("subject integrity: bags contain whole trips only") {
    const DesignMatrix d = grouped_design(5, 6, 33);
    const Forest forest = fit_forest(d, {10, 2, 2}, 11);
    std::map<std::string, std::size_t> trip_len;
    for (const auto& s : d.subject_of_row) ++trip_len[s];
    for (const auto& bag : forest.in_bag) {
        std::map<std::string, std::size_t> copies;
        for (const auto& s : bag) ++copies[s];
        BootstrapDraw draw;
        draw.in_bag = bag;
        std::map<std::string, std::size_t> row_count;
        for (const std::size_t r : bootstrap_rows(d, draw)) ++row_count[d.subject_of_row[r]];
        for (const auto& [subject, copies_n] : copies) {
            CHECK(row_count[subject] == copies_n * trip_len[subject]);
        }
    }
}

TEST_CASE("same seed reproduces the forest bit for bit") {
    const DesignMatrix d = grouped_design(8, 12, 55);
    const Forest a = fit_forest(d, {15, 2, 3}, 123);
    const Forest b = fit_forest(d, {15, 2, 3}, 123);
    CHECK(a.to_json() == b.to_json());
    const Forest c = fit_forest(d, {15, 2, 3}, 124);
    CHECK(a.to_json() != c.to_json());
}

TEST_CASE("serialisation round-trips predictions") {
    const DesignMatrix d = grouped_design(6, 10, 77);
    const Forest forest = fit_forest(d, {8, 2, 3}, 5);
    const Forest loaded = Forest::from_json(forest.to_json());
    for (std::size_t r = 0; r < d.n_rows(); r += 5) {
        CHECK(loaded.predict(d.rows[r]) == forest.predict(d.rows[r]));
    }
    CHECK(loaded.oob_error == forest.oob_error);
}

TEST_CASE("oob error settles as trees accumulate") {
    const DesignMatrix d = grouped_design(20, 30, 13);
    const Forest small = fit_forest(d, {200, 2, 5}, 1);
    const Forest large = fit_forest(d, {400, 2, 5}, 1);
    REQUIRE(small.oob_error.has_value());
    REQUIRE(large.oob_error.has_value());
    const double rel = std::abs(*large.oob_error - *small.oob_error) / *small.oob_error;
    CHECK(rel <= 0.05);
}

TEST_CASE("tiny panels whose bags swallow every subject report no oob") {
    // single subject: every draw contains it, nothing is ever out of bag
    DesignMatrix d;
    d.columns = {"x"};
    for (int j = 0; j < 8; ++j) {
        d.rows.push_back({static_cast<double>(j)});
        d.response.push_back(static_cast<double>(j % 3));
        d.subject_of_row.push_back("only");
    }
    const Forest forest = fit_forest(d, {5, 1, 2}, 2);
    CHECK_FALSE(forest.oob_error.has_value());
}

} // TEST_SUITE
