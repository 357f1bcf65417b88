#include "nbm/error.hpp"
#include "nbm/tree.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>

using namespace nbm;

TEST_CASE("node_sse: hand values") {
    CHECK(node_sse(Matrix::from_rows({{4.0}, {4.0}, {4.0}})) == 0.0);
    CHECK(node_sse(Matrix::from_rows({{0.0}, {2.0}})) == 2.0);
    CHECK(node_sse(Matrix::from_rows({{1.0, 1.0}, {3.0, 3.0}})) == 4.0);
}

TEST_CASE("split_cost: paper vs classic weighting") {
    const Matrix pure_left = Matrix::from_rows({{0.0}, {0.0}});
    const Matrix pure_right = Matrix::from_rows({{1.0}, {1.0}});
    CHECK(split_cost(pure_left, pure_right, SplitWeighting::kPaper) == 0.0);
    CHECK(split_cost(pure_left, pure_right, SplitWeighting::kClassic) == 0.0);

    const Matrix left = Matrix::from_rows({{0.0}, {2.0}});
    const Matrix right = Matrix::from_rows({{5.0}});
    CHECK(split_cost(left, right, SplitWeighting::kPaper) ==
          doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(split_cost(left, right, SplitWeighting::kClassic) == 2.0);

    CHECK_THROWS_AS(split_cost(Matrix(0, 1), right, SplitWeighting::kPaper), DimensionError);
}

TEST_CASE("best_split: textbook step function") {
    const Matrix X = Matrix::from_rows({{1.0}, {2.0}, {3.0}, {4.0}});
    const Matrix Y = Matrix::from_rows({{0.0}, {0.0}, {10.0}, {10.0}});
    TreeHyperparams hp;
    hp.min_samples_split = 2;
    hp.min_samples_leaf = 1;

    for (auto weighting : {SplitWeighting::kPaper, SplitWeighting::kClassic}) {
        hp.weighting = weighting;
        const auto split = best_split(X, Y, hp);
        REQUIRE(split.has_value());
        CHECK(split->feature == 0);
        CHECK(split->threshold == 2.5);
        CHECK(split->cost == 0.0);
    }
}

TEST_CASE("best_split: constant targets yield no split") {
    const Matrix X = Matrix::from_rows({{1.0}, {2.0}, {3.0}, {4.0}});
    const Matrix Y = Matrix::from_rows({{7.0}, {7.0}, {7.0}, {7.0}});
    TreeHyperparams hp;
    hp.min_samples_split = 2;
    hp.min_samples_leaf = 1;
    CHECK_FALSE(best_split(X, Y, hp).has_value());
}

TEST_CASE("best_split: min_samples_leaf can forbid every candidate") {
    const Matrix X = Matrix::from_rows({{1.0}, {2.0}, {3.0}, {4.0}});
    const Matrix Y = Matrix::from_rows({{0.0}, {0.0}, {10.0}, {10.0}});
    TreeHyperparams hp;
    hp.min_samples_split = 2;
    hp.min_samples_leaf = 3;
    CHECK_FALSE(best_split(X, Y, hp).has_value());
}

TEST_CASE("best_split: matches the exhaustive oracle on random data") {
    Rng rng(101);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t rows = 10 + rng.uniform_index(120);
        const std::size_t targets = 1 + rng.uniform_index(3);
        const Matrix X = nbm::test::random_matrix(rows, 2, rng);
        const Matrix Y = nbm::test::random_matrix(rows, targets, rng);

        TreeHyperparams hp;
        hp.min_samples_split = 2;
        hp.min_samples_leaf = 1 + rng.uniform_index(3);
        hp.weighting = trial % 2 == 0 ? SplitWeighting::kPaper : SplitWeighting::kClassic;

        const auto actual = best_split(X, Y, hp);
        const auto expected = nbm::test::oracle_best_split(X, Y, hp);
        REQUIRE(actual.has_value() == expected.has_value());
        if (actual) {
            CHECK(actual->feature == expected->feature);
            CHECK(actual->threshold == expected->threshold);
            CHECK(actual->cost ==
                  doctest::Approx(expected->cost).epsilon(1e-12));
        }
    }
}

TEST_CASE("fit_tree: one clean threshold gives a depth-1 tree with exact means") {
    const Matrix X = Matrix::from_rows({{1.0, 5.0}, {2.0, 5.0}, {8.0, 5.0}, {9.0, 5.0}});
    const Matrix Y = Matrix::from_rows({{1.0, -1.0}, {1.0, -1.0}, {3.0, -3.0}, {3.0, -3.0}});
    TreeHyperparams hp;
    hp.min_samples_split = 2;
    hp.min_samples_leaf = 1;
    const auto model = fit_tree(X, Y, hp);
    CHECK(model.depth() == 1);
    REQUIRE(model.nodes().size() == 3);
    CHECK(model.predict_row(std::vector<double>{1.5, 5.0}) == std::vector<double>{1.0, -1.0});
    CHECK(model.predict_row(std::vector<double>{8.5, 5.0}) == std::vector<double>{3.0, -3.0});
}

TEST_CASE("fit_tree: max_depth 1 caps the node count at 3") {
    Rng rng(55);
    const Matrix X = nbm::test::random_matrix(200, 2, rng);
    const Matrix Y = nbm::test::random_matrix(200, 4, rng);
    TreeHyperparams hp;
    hp.max_depth = 1;
    hp.min_samples_split = 2;
    hp.min_samples_leaf = 1;
    const auto model = fit_tree(X, Y, hp);
    CHECK(model.nodes().size() <= 3);
    CHECK(model.depth() <= 1);
}

TEST_CASE("fit_tree: depth and leaf-occupancy bounds hold") {
    Rng rng(66);
    const Matrix X = nbm::test::random_matrix(500, 2, rng);
    const Matrix Y = nbm::test::random_matrix(500, 2, rng);
    TreeHyperparams hp;
    hp.max_depth = 4;
    hp.min_samples_split = 10;
    hp.min_samples_leaf = 4;
    const auto model = fit_tree(X, Y, hp);
    CHECK(model.depth() <= 4);
    for (const auto& node : model.nodes()) {
        if (node.is_leaf) CHECK(node.sample_count >= 4);
    }
}

TEST_CASE("fit_tree: predictions stay inside the training target range") {
    Rng rng(77);
    const Matrix X = nbm::test::random_matrix(300, 2, rng);
    const Matrix Y = nbm::test::random_matrix(300, 3, rng, 10.0);
    TreeHyperparams hp;
    hp.min_samples_split = 5;
    hp.min_samples_leaf = 2;
    const auto model = fit_tree(X, Y, hp);

    std::vector<double> lo(3, 1e300);
    std::vector<double> hi(3, -1e300);
    for (std::size_t i = 0; i < Y.rows(); ++i) {
        for (std::size_t t = 0; t < 3; ++t) {
            lo[t] = std::min(lo[t], Y(i, t));
            hi[t] = std::max(hi[t], Y(i, t));
        }
    }
    for (int q = 0; q < 100; ++q) {
        std::vector<double> x{rng.gaussian() * 2.0, rng.gaussian() * 2.0};
        const auto pred = model.predict_row(x);
        for (std::size_t t = 0; t < 3; ++t) {
            CHECK(pred[t] >= lo[t]);
            CHECK(pred[t] <= hi[t]);
        }
    }
}

TEST_CASE("fit_tree: training-row permutation does not change the tree") {
    Rng rng(88);
    const std::size_t m = 257;
    const Matrix X = nbm::test::random_matrix(m, 2, rng);
    const Matrix Y = nbm::test::random_matrix(m, 2, rng);

    std::vector<std::size_t> perm(m);
    for (std::size_t i = 0; i < m; ++i) perm[i] = i;
    deterministic_shuffle(perm, rng);
    const Matrix Xp = X.take_rows(perm);
    const Matrix Yp = Y.take_rows(perm);

    TreeHyperparams hp;
    hp.min_samples_split = 4;
    hp.min_samples_leaf = 2;
    const auto a = fit_tree(X, Y, hp);
    const auto b = fit_tree(Xp, Yp, hp);
    CHECK(a.nodes() == b.nodes());
}

TEST_CASE("fit_tree: single-target agrees with the reference CART") {
    Rng rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t m = 30 + rng.uniform_index(300);
        const Matrix X = nbm::test::random_matrix(m, 2, rng);
        Matrix Y(m, 1);
        std::vector<double> y(m);
        for (std::size_t i = 0; i < m; ++i) {
            y[i] = X(i, 0) * 2.0 + rng.gaussian();
            Y(i, 0) = y[i];
        }
        TreeHyperparams hp;
        hp.max_depth = 5;
        hp.min_samples_split = 8;
        hp.min_samples_leaf = 3;
        const auto model = fit_tree(X, Y, hp);
        const auto reference = nbm::test::oracle_cart(X, y, hp);
        CHECK(nbm::test::same_structure(model.nodes(), 0, reference.get()));
    }
}

TEST_CASE("predict_tree: ties at a threshold route left") {
    const Matrix X = Matrix::from_rows({{1.0}, {2.0}, {3.0}, {4.0}});
    const Matrix Y = Matrix::from_rows({{0.0}, {0.0}, {10.0}, {10.0}});
    TreeHyperparams hp;
    hp.min_samples_split = 2;
    hp.min_samples_leaf = 1;
    const auto model = fit_tree(X, Y, hp);
    REQUIRE_FALSE(model.nodes()[0].is_leaf);
    const double threshold = model.nodes()[0].threshold;
    CHECK(model.predict_row(std::vector<double>{threshold})[0] == 0.0);
}

TEST_CASE("predict_tree: single-leaf tree returns global means; width checked") {
    const Matrix X = Matrix::from_rows({{1.0}, {2.0}});
    const Matrix Y = Matrix::from_rows({{2.0, 4.0}, {4.0, 8.0}});
    TreeHyperparams hp; // min_samples_split default far above 2 rows
    const auto model = fit_tree(X, Y, hp);
    REQUIRE(model.nodes().size() == 1);
    CHECK(model.predict_row(std::vector<double>{100.0}) == std::vector<double>{3.0, 6.0});
    CHECK_THROWS_AS(model.predict_row(std::vector<double>{1.0, 2.0}), DimensionError);
}

TEST_CASE("fit_tree: guards") {
    CHECK_THROWS_AS(fit_tree(Matrix(2, 1), Matrix(3, 1), {}), DimensionError);
    CHECK_THROWS_AS(fit_tree(Matrix(0, 1), Matrix(0, 1), {}), DimensionError);
    TreeHyperparams bad;
    bad.min_samples_split = 1;
    CHECK_THROWS_AS(fit_tree(Matrix::from_rows({{1.0}}), Matrix::from_rows({{1.0}}), bad),
                    ConfigError);
}
