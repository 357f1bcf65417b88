#include "nbm/error.hpp"
#include "nbm/metrics.hpp"
#include "nbm/mlp.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace nbm;

namespace {

MlpArchitecture tiny_arch(bool batch_norm, Activation activation = Activation::kRelu) {
    MlpArchitecture arch;
    arch.layer_widths = {2, 5, 3};
    arch.hidden_activation = activation;
    arch.batch_norm = {static_cast<std::uint8_t>(batch_norm ? 1 : 0)};
    return arch;
}

} // namespace

TEST_CASE("loss_ssr: hand values and shape guard") {
    const Matrix a = Matrix::from_rows({{1.0, 2.0}, {3.0, 4.0}});
    CHECK(loss_ssr(a, a) == 0.0);

    const Matrix ones = Matrix::from_rows({{1.0, 1.0}, {1.0, 1.0}});
    CHECK(loss_ssr(ones, Matrix(2, 2)) == 4.0);

    CHECK(loss_ssr(Matrix::from_rows({{1.0, 2.0}}), Matrix(1, 2)) == 5.0);
    CHECK_THROWS_AS(loss_ssr(Matrix(1, 2), Matrix(2, 2)), DimensionError);
}

TEST_CASE("batchnorm_forward: constant batch maps to beta") {
    const Matrix z = Matrix::from_rows({{3.0}, {3.0}, {3.0}});
    std::vector<double> gamma{1.0};
    std::vector<double> beta{0.0};
    std::vector<double> rm{0.0};
    std::vector<double> rv{1.0};
    const Matrix out = batchnorm_forward(z, gamma, beta, rm, rv, MlpMode::kTrain, 0.9, 1e-5);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(out(i, 0)) < 1e-6);
    CHECK(rm[0] == doctest::Approx(0.9 * 0.0 + 0.1 * 3.0));
}

TEST_CASE("batchnorm_forward: unit-variance batch is nearly preserved") {
    const Matrix z = Matrix::from_rows({{-1.0}, {1.0}});
    std::vector<double> gamma{1.0};
    std::vector<double> beta{0.0};
    std::vector<double> rm{0.0};
    std::vector<double> rv{1.0};
    const Matrix out = batchnorm_forward(z, gamma, beta, rm, rv, MlpMode::kTrain, 0.9, 1e-5);
    CHECK(out(0, 0) == doctest::Approx(-1.0).epsilon(1e-4));
    CHECK(out(1, 0) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("batchnorm_forward: affine semantics of gamma/beta") {
    const Matrix z = Matrix::from_rows({{-2.0}, {2.0}});
    std::vector<double> g1{1.0};
    std::vector<double> b0{0.0};
    std::vector<double> rm{0.0};
    std::vector<double> rv{1.0};
    const Matrix base = batchnorm_forward(z, g1, b0, rm, rv, MlpMode::kTrain, 0.9, 1e-5);

    std::vector<double> g2{2.0};
    std::vector<double> b1{1.0};
    rm = {0.0};
    rv = {1.0};
    const Matrix scaled = batchnorm_forward(z, g2, b1, rm, rv, MlpMode::kTrain, 0.9, 1e-5);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(scaled(i, 0) == doctest::Approx(2.0 * base(i, 0) + 1.0).epsilon(1e-12));
    }
}

TEST_CASE("batchnorm_forward: train mode rejects single-row batches") {
    std::vector<double> gamma{1.0};
    std::vector<double> beta{0.0};
    std::vector<double> rm{0.0};
    std::vector<double> rv{1.0};
    CHECK_THROWS_AS(batchnorm_forward(Matrix(1, 1), gamma, beta, rm, rv, MlpMode::kTrain, 0.9,
                                      1e-5),
                    DimensionError);
    CHECK_NOTHROW(batchnorm_forward(Matrix(1, 1), gamma, beta, rm, rv, MlpMode::kInfer, 0.9,
                                    1e-5));
}

TEST_CASE("mlp_forward: zero parameters give zero output") {
    const auto arch = tiny_arch(true);
    MlpParameters params = make_parameters(arch);
    for (std::size_t h = 0; h < arch.hidden_count(); ++h) {
        std::fill(params.gamma[h].begin(), params.gamma[h].end(), 1.0);
        std::fill(params.running_var[h].begin(), params.running_var[h].end(), 1.0);
    }
    Rng rng(20);
    const Matrix batch = nbm::test::random_matrix(4, 2, rng);
    const auto cache = mlp_forward(arch, params, batch, MlpMode::kTrain);
    for (std::size_t i = 0; i < cache.output.rows(); ++i) {
        for (std::size_t j = 0; j < cache.output.cols(); ++j) {
            CHECK(cache.output(i, j) == 0.0);
        }
    }
}

TEST_CASE("mlp_forward: one linear neuron computes the hand value") {
    MlpArchitecture arch;
    arch.layer_widths = {1, 1, 1};
    arch.hidden_activation = Activation::kIdentity;
    arch.batch_norm = {0};
    MlpParameters params = make_parameters(arch);
    params.weights[0](0, 0) = 2.0;
    params.biases[0][0] = 1.0;
    params.weights[1](0, 0) = -3.0;
    params.biases[1][0] = 0.5;

    const Matrix batch = Matrix::from_rows({{4.0}, {0.0}});
    const Matrix out = mlp_infer(arch, params, batch);
    CHECK(out(0, 0) == -3.0 * (2.0 * 4.0 + 1.0) + 0.5);
    CHECK(out(1, 0) == -3.0 * 1.0 + 0.5);
}

TEST_CASE("mlp_infer: repeated calls are identical and side-effect free") {
    const auto arch = tiny_arch(true);
    MlpParameters params = init_parameters(arch, 77);
    Rng rng(21);
    const Matrix batch = nbm::test::random_matrix(3, 2, rng);
    const Matrix a = mlp_infer(arch, params, batch);
    const Matrix b = mlp_infer(arch, params, batch);
    CHECK(a == b);
}

TEST_CASE("mlp_backward: zero residual means zero gradients") {
    const auto arch = tiny_arch(true);
    MlpParameters params = init_parameters(arch, 31);
    Rng rng(22);
    const Matrix batch = nbm::test::random_matrix(4, 2, rng);
    auto cache = mlp_forward(arch, params, batch, MlpMode::kTrain);
    const Matrix obs = cache.output; // observations equal predictions
    const auto grads = mlp_backward(arch, params, cache, obs);
    for (const auto& w : grads.weights) {
        for (std::size_t i = 0; i < w.rows(); ++i) {
            for (std::size_t j = 0; j < w.cols(); ++j) CHECK(w(i, j) == 0.0);
        }
    }
    for (const auto& b : grads.biases) {
        for (double v : b) CHECK(v == 0.0);
    }
}

TEST_CASE("mlp_backward: output bias gradients are linear in the residual") {
    const auto arch = tiny_arch(false);
    MlpParameters params = init_parameters(arch, 32);
    Rng rng(23);
    const Matrix batch = nbm::test::random_matrix(4, 2, rng);
    auto cache = mlp_forward(arch, params, batch, MlpMode::kTrain);

    Matrix obs1 = cache.output;
    Matrix obs2 = cache.output;
    for (std::size_t i = 0; i < obs1.rows(); ++i) {
        for (std::size_t j = 0; j < obs1.cols(); ++j) {
            obs1(i, j) -= 1.0; // residual +1
            obs2(i, j) -= 2.0; // residual +2
        }
    }
    const auto g1 = mlp_backward(arch, params, cache, obs1);
    const auto g2 = mlp_backward(arch, params, cache, obs2);
    const std::size_t out_layer = arch.affine_count() - 1;
    for (std::size_t o = 0; o < g1.biases[out_layer].size(); ++o) {
        CHECK(g2.biases[out_layer][o] ==
              doctest::Approx(2.0 * g1.biases[out_layer][o]).epsilon(1e-12));
    }
}

TEST_CASE("adam_step: zero gradient leaves parameters unchanged") {
    const auto arch = tiny_arch(true);
    MlpParameters params = init_parameters(arch, 33);
    const MlpParameters before = params;
    const MlpParameters grads = make_parameters(arch); // all zero
    AdamState state(arch.parameter_count());
    adam_step(params, grads, state);
    CHECK(params.weights[0] == before.weights[0]);
    CHECK(params.biases == before.biases);
    CHECK(params.gamma == before.gamma);
    CHECK(state.t == 1);
}

TEST_CASE("adam_step: first and second steps move by about alpha") {
    MlpArchitecture arch;
    arch.layer_widths = {1, 1, 1};
    arch.hidden_activation = Activation::kIdentity;
    arch.batch_norm = {0};
    MlpParameters params = make_parameters(arch);
    MlpParameters grads = make_parameters(arch);
    grads.weights[0](0, 0) = 0.5;

    AdamState state(arch.parameter_count());
    const double w0 = params.weights[0](0, 0);
    adam_step(params, grads, state);
    const double step1 = params.weights[0](0, 0) - w0;
    CHECK(step1 == doctest::Approx(-1e-3).epsilon(1e-6));

    const double w1 = params.weights[0](0, 0);
    adam_step(params, grads, state);
    const double step2 = params.weights[0](0, 0) - w1;
    CHECK(step2 == doctest::Approx(-1e-3).epsilon(1e-4));
}

TEST_CASE("gradient_check: linear net is exact to rounding") {
    MlpArchitecture arch;
    arch.layer_widths = {2, 4, 2};
    arch.hidden_activation = Activation::kIdentity;
    arch.batch_norm = {0};
    CHECK(gradient_check(arch, 7) < 1e-8);
}

TEST_CASE("gradient_check: batch-norm net within 1e-4 and deterministic") {
    const auto arch = tiny_arch(true);
    const double e1 = gradient_check(arch, 11);
    const double e2 = gradient_check(arch, 11);
    CHECK(e1 == e2);
    CHECK(e1 < 1e-4);
}

TEST_CASE("train_mlp: deterministic, improving, and early-stopping") {
    Rng rng(24);
    const std::size_t m = 300;
    Matrix X(m, 2);
    Matrix Y(m, 2);
    for (std::size_t i = 0; i < m; ++i) {
        X(i, 0) = rng.gaussian();
        X(i, 1) = rng.gaussian();
        Y(i, 0) = std::sin(X(i, 0)) + 0.1 * X(i, 1);
        Y(i, 1) = X(i, 0) * 0.5;
    }
    const Matrix vx = nbm::test::random_matrix(60, 2, rng);
    Matrix vy(60, 2);
    for (std::size_t i = 0; i < 60; ++i) {
        vy(i, 0) = std::sin(vx(i, 0)) + 0.1 * vx(i, 1);
        vy(i, 1) = vx(i, 0) * 0.5;
    }

    MlpArchitecture arch;
    arch.layer_widths = {2, 8, 8, 2};
    arch.batch_norm = {1, 1};

    TrainConfig config;
    config.batch_size = 32;
    config.max_epochs = 30;
    config.patience = 30;
    config.seed = 42;

    TrainTrace trace;
    const auto model = train_mlp(X, Y, vx, vy, arch, config, &trace);

    // Best-so-far curve is non-increasing and ends below the first epoch.
    REQUIRE(trace.validation_rmse.size() >= 2);
    for (std::size_t e = 1; e < trace.best_rmse_so_far.size(); ++e) {
        CHECK(trace.best_rmse_so_far[e] <= trace.best_rmse_so_far[e - 1]);
    }
    CHECK(trace.best_rmse_so_far.back() < trace.validation_rmse.front());

    // Bit-identical rerun.
    TrainTrace trace2;
    const auto model2 = train_mlp(X, Y, vx, vy, arch, config, &trace2);
    CHECK(trace2.validation_rmse == trace.validation_rmse);
    CHECK(model2.parameters().weights[0] == model.parameters().weights[0]);
    CHECK(model2.parameters().running_mean == model.parameters().running_mean);
}

TEST_CASE("train_mlp: patience 1 with a flat metric stops after epoch 2") {
    // Constant targets: epoch 1 improves on +inf, later epochs cannot.
    Matrix X(40, 2);
    Matrix Y(40, 1, 1.0);
    Rng rng(25);
    for (std::size_t i = 0; i < 40; ++i) {
        X(i, 0) = rng.gaussian();
        X(i, 1) = rng.gaussian();
    }
    Matrix vx = nbm::test::random_matrix(10, 2, rng);
    Matrix vy(10, 1, 1.0);

    MlpArchitecture arch;
    arch.layer_widths = {2, 3, 1};
    arch.batch_norm = {0};

    TrainConfig config;
    config.batch_size = 40;
    config.max_epochs = 50;
    config.patience = 1;
    config.seed = 3;
    config.adam.alpha = 0.0; // freeze parameters so the metric never moves

    TrainTrace trace;
    train_mlp(X, Y, vx, vy, arch, config, &trace);
    CHECK(trace.validation_rmse.size() == 2);
    CHECK(trace.best_epoch == 1);
}

TEST_CASE("train_mlp: guards") {
    MlpArchitecture arch;
    arch.layer_widths = {2, 3, 1};
    arch.batch_norm = {1};
    TrainConfig config;
    config.batch_size = 100;
    CHECK_THROWS_AS(train_mlp(Matrix(10, 2), Matrix(10, 1), Matrix(5, 2), Matrix(5, 1), arch,
                              config),
                    ConfigError);
}
