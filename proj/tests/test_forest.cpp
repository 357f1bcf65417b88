#include "nbm/error.hpp"
#include "nbm/model_io.hpp"
#include "nbm/tree.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <sstream>

using namespace nbm;

namespace {

ForestHyperparams small_forest_hp() {
    ForestHyperparams hp;
    hp.tree_count = 12;
    hp.tree.max_depth = 4;
    hp.tree.min_samples_split = 6;
    hp.tree.min_samples_leaf = 2;
    hp.seed = 42;
    return hp;
}

} // namespace

TEST_CASE("fit_forest: one tree without bootstrap equals fit_tree") {
    Rng rng(1);
    const Matrix X = nbm::test::random_matrix(150, 2, rng);
    const Matrix Y = nbm::test::random_matrix(150, 2, rng);

    ForestHyperparams hp = small_forest_hp();
    hp.tree_count = 1;
    hp.bootstrap = false;

    const auto forest = fit_forest(X, Y, hp);
    const auto tree = fit_tree(X, Y, hp.tree);
    REQUIRE(forest.trees().size() == 1);
    CHECK(forest.trees()[0].nodes() == tree.nodes());

    for (int q = 0; q < 20; ++q) {
        std::vector<double> x{rng.gaussian(), rng.gaussian()};
        CHECK(forest.predict_row(x) == tree.predict_row(x));
    }
}

TEST_CASE("fit_forest: same seed reproduces every prediction") {
    Rng rng(2);
    const Matrix X = nbm::test::random_matrix(200, 2, rng);
    const Matrix Y = nbm::test::random_matrix(200, 3, rng);

    const auto a = fit_forest(X, Y, small_forest_hp());
    const auto b = fit_forest(X, Y, small_forest_hp());
    for (int q = 0; q < 50; ++q) {
        std::vector<double> x{rng.gaussian(), rng.gaussian()};
        CHECK(a.predict_row(x) == b.predict_row(x));
    }

    ForestHyperparams other = small_forest_hp();
    other.seed = 43;
    const auto c = fit_forest(X, Y, other);
    bool any_difference = false;
    for (int q = 0; q < 50 && !any_difference; ++q) {
        std::vector<double> x{rng.gaussian(), rng.gaussian()};
        any_difference = a.predict_row(x) != c.predict_row(x);
    }
    CHECK(any_difference);
}

TEST_CASE("fit_forest: parallel fitting produces the identical model") {
    Rng rng(3);
    const Matrix X = nbm::test::random_matrix(300, 2, rng);
    const Matrix Y = nbm::test::random_matrix(300, 4, rng);

    const auto serial = fit_forest(X, Y, small_forest_hp(), 1);
    const auto parallel = fit_forest(X, Y, small_forest_hp(), 4);

    REQUIRE(serial.trees().size() == parallel.trees().size());
    for (std::size_t i = 0; i < serial.trees().size(); ++i) {
        CHECK(serial.trees()[i].nodes() == parallel.trees()[i].nodes());
    }

    std::ostringstream sa;
    std::ostringstream sb;
    save_model(serial, sa);
    save_model(parallel, sb);
    CHECK(sa.str() == sb.str());
}

TEST_CASE("predict_forest: prediction is the member mean") {
    Rng rng(4);
    const Matrix X = nbm::test::random_matrix(120, 2, rng);
    const Matrix Y = nbm::test::random_matrix(120, 2, rng);
    const auto forest = fit_forest(X, Y, small_forest_hp());

    for (int q = 0; q < 25; ++q) {
        std::vector<double> x{rng.gaussian(), rng.gaussian()};
        std::vector<double> mean(2, 0.0);
        for (const auto& tree : forest.trees()) {
            const auto p = tree.predict_row(x);
            for (std::size_t t = 0; t < 2; ++t) mean[t] += p[t];
        }
        for (double& v : mean) v /= static_cast<double>(forest.trees().size());
        CHECK(forest.predict_row(x) == mean);
    }
}

TEST_CASE("fit_forest: guards") {
    ForestHyperparams hp = small_forest_hp();
    hp.tree_count = 0;
    CHECK_THROWS_AS(fit_forest(Matrix(10, 2), Matrix(10, 1), hp), ConfigError);
}
