#pragma once

#include "nbm/matrix.hpp"
#include "nbm/model.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace nbm {

class PayloadReader;
class PayloadWriter;

enum class Activation { kRelu, kIdentity };
enum class MlpMode { kTrain, kInfer };

const char* to_string(Activation a);

/// Layer widths input -> hidden... -> output, hidden activation, and a
/// batch-norm flag per hidden layer. bn_epsilon travels with the
/// architecture because inference standardization needs it.
struct MlpArchitecture {
    std::vector<std::size_t> layer_widths;
    Activation hidden_activation = Activation::kRelu;
    std::vector<std::uint8_t> batch_norm;
    double bn_epsilon = 1e-5;

    std::size_t input_count() const { return layer_widths.front(); }
    std::size_t output_count() const { return layer_widths.back(); }
    std::size_t affine_count() const { return layer_widths.size() - 1; }
    std::size_t hidden_count() const { return layer_widths.size() - 2; }
    std::size_t parameter_count() const;

    void validate() const;
};

/// Dense weights (out x in), biases, and per-hidden-layer batch-norm state.
/// Layers without batch norm keep empty vectors. The same struct doubles as
/// the gradient container (running stats carry no gradient).
struct MlpParameters {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
    std::vector<std::vector<double>> gamma;
    std::vector<std::vector<double>> beta;
    std::vector<std::vector<double>> running_mean;
    std::vector<std::vector<double>> running_var;
};

/// Zero-initialized parameter set with the architecture's shapes.
MlpParameters make_parameters(const MlpArchitecture& arch);

/// Seeded init: weights ~ N(0, sqrt(2/fan_in)), biases 0, gamma 1, beta 0,
/// running mean 0, running variance 1.
MlpParameters init_parameters(const MlpArchitecture& arch, std::uint64_t seed);

/// Sum of squared residuals over all rows and targets, equal target weight.
double loss_ssr(const Matrix& pred, const Matrix& obs);

struct BatchNormStats {
    std::vector<double> mean;
    std::vector<double> var;
};

/// Batch normalization of one layer's pre-activations. Train mode
/// standardizes by batch statistics and folds them into the running stats
/// with the given momentum; infer mode standardizes by the running stats.
/// Train mode needs at least two rows. Optional out-params expose the batch
/// stats and the pre-scale normalized values for backprop.
Matrix batchnorm_forward(const Matrix& z, std::span<const double> gamma,
                         std::span<const double> beta, std::vector<double>& running_mean,
                         std::vector<double>& running_var, MlpMode mode, double momentum,
                         double epsilon, BatchNormStats* stats_out = nullptr,
                         Matrix* normalized_out = nullptr);

/// Everything backward needs from a training-mode forward pass.
struct ForwardCache {
    std::vector<Matrix> inputs;      ///< activation entering each affine layer
    std::vector<Matrix> affine;      ///< z = input * W^T + b per layer
    std::vector<Matrix> bn_normalized; ///< x-hat per hidden layer (empty if no BN)
    std::vector<BatchNormStats> bn_stats;
    std::vector<Matrix> pre_activation; ///< value fed to the activation
    Matrix output;
};

/// Hidden layers: affine -> batch norm (if enabled) -> activation; output
/// layer affine only. Train mode updates running stats through
/// batchnorm_forward.
ForwardCache mlp_forward(const MlpArchitecture& arch, MlpParameters& params,
                         const Matrix& batch, MlpMode mode, double bn_momentum = 0.9);

/// Pure inference pass (running batch-norm statistics, no state change).
Matrix mlp_infer(const MlpArchitecture& arch, const MlpParameters& params, const Matrix& batch);

/// Analytic gradients of loss_ssr w.r.t. every trainable parameter,
/// including the batch-norm terms. `cache` must come from a train-mode
/// forward of the same batch.
MlpParameters mlp_backward(const MlpArchitecture& arch, const MlpParameters& params,
                           const ForwardCache& cache, const Matrix& obs);

struct AdamConfig {
    double alpha = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Bias-corrected first/second moment state over the flattened parameters.
struct AdamState {
    explicit AdamState(std::size_t parameter_count, AdamConfig config = {})
        : m(parameter_count, 0.0), v(parameter_count, 0.0), config(config) {}

    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t t = 0;
    AdamConfig config;
};

/// One Adam update: m <- b1 m + (1-b1) g, v <- b2 v + (1-b2) g^2,
/// theta <- theta - alpha * m-hat / (sqrt(v-hat) + eps).
void adam_step(MlpParameters& params, const MlpParameters& grads, AdamState& state);

struct TrainConfig {
    std::size_t batch_size = 64;
    std::size_t max_epochs = 200;
    std::size_t patience = 20;
    std::uint64_t seed = 0;
    AdamConfig adam;
    double bn_momentum = 0.9;

    void validate() const;
};

/// Per-epoch validation trail for inspection and early-stop tests.
struct TrainTrace {
    std::vector<double> validation_rmse;
    std::vector<double> best_rmse_so_far;
    std::size_t best_epoch = 0; ///< 1-based epoch whose parameters were kept
};

class MlpModel final : public Regressor {
public:
    MlpModel() = default;
    MlpModel(MlpArchitecture arch, MlpParameters params)
        : arch_(std::move(arch)), params_(std::move(params)) {}

    std::size_t input_count() const override { return arch_.input_count(); }
    std::size_t target_count() const override { return arch_.output_count(); }
    std::vector<double> predict_row(std::span<const double> x) const override;

    const ModelMetadata& metadata() const override { return metadata_; }
    ModelMetadata& metadata() override { return metadata_; }

    const MlpArchitecture& architecture() const { return arch_; }
    const MlpParameters& parameters() const { return params_; }

private:
    MlpArchitecture arch_;
    MlpParameters params_;
    ModelMetadata metadata_;
};

/// Seeded minibatch Adam on loss_ssr with per-epoch seeded shuffling; keeps
/// the best-validation-epoch snapshot (global RMSE) and stops after
/// `patience` epochs without improvement. A trailing 1-row batch is dropped
/// (batch norm needs a variance).
MlpModel train_mlp(const Matrix& train_x, const Matrix& train_y, const Matrix& val_x,
                   const Matrix& val_y, const MlpArchitecture& arch, const TrainConfig& config,
                   TrainTrace* trace = nullptr);

/// Max relative error between analytic and central-difference gradients on a
/// random small net (parameters <= 200, batch <= 8). Deterministic in seed.
double gradient_check(const MlpArchitecture& arch, std::uint64_t seed);

void write_mlp_payload(const MlpModel& model, PayloadWriter& writer);
MlpModel read_mlp_payload(PayloadReader& reader);

} // namespace nbm
