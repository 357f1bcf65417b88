#include "nbm/mlp.hpp"

#include "nbm/error.hpp"
#include "nbm/metrics.hpp"
#include "nbm/model_io.hpp"
#include "nbm/rng.hpp"

#include <algorithm>
#include <cmath>

namespace nbm {

const char* to_string(Activation a) {
    return a == Activation::kRelu ? "relu" : "identity";
}

void MlpArchitecture::validate() const {
    if (layer_widths.size() < 3) {
        throw ConfigError("MlpArchitecture: need at least one hidden layer");
    }
    for (std::size_t w : layer_widths) {
        if (w < 1) throw ConfigError("MlpArchitecture: zero-width layer");
    }
    if (batch_norm.size() != hidden_count()) {
        throw ConfigError("MlpArchitecture: need one batch_norm flag per hidden layer");
    }
    if (bn_epsilon <= 0.0) throw ConfigError("MlpArchitecture: bn_epsilon must be > 0");
}

std::size_t MlpArchitecture::parameter_count() const {
    std::size_t count = 0;
    for (std::size_t l = 0; l + 1 < layer_widths.size(); ++l) {
        count += layer_widths[l + 1] * layer_widths[l] + layer_widths[l + 1];
    }
    for (std::size_t h = 0; h < hidden_count(); ++h) {
        if (batch_norm[h]) count += 2 * layer_widths[h + 1];
    }
    return count;
}

MlpParameters make_parameters(const MlpArchitecture& arch) {
    MlpParameters p;
    const std::size_t layers = arch.affine_count();
    p.weights.resize(layers);
    p.biases.resize(layers);
    p.gamma.resize(arch.hidden_count());
    p.beta.resize(arch.hidden_count());
    p.running_mean.resize(arch.hidden_count());
    p.running_var.resize(arch.hidden_count());

    for (std::size_t l = 0; l < layers; ++l) {
        p.weights[l] = Matrix(arch.layer_widths[l + 1], arch.layer_widths[l]);
        p.biases[l].assign(arch.layer_widths[l + 1], 0.0);
    }
    for (std::size_t h = 0; h < arch.hidden_count(); ++h) {
        if (!arch.batch_norm[h]) continue;
        const std::size_t width = arch.layer_widths[h + 1];
        p.gamma[h].assign(width, 0.0);
        p.beta[h].assign(width, 0.0);
        p.running_mean[h].assign(width, 0.0);
        p.running_var[h].assign(width, 0.0);
    }
    return p;
}

MlpParameters init_parameters(const MlpArchitecture& arch, std::uint64_t seed) {
    MlpParameters p = make_parameters(arch);
    Rng rng(seed);
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        const double scale = std::sqrt(2.0 / static_cast<double>(arch.layer_widths[l]));
        Matrix& w = p.weights[l];
        for (std::size_t i = 0; i < w.rows(); ++i) {
            for (std::size_t j = 0; j < w.cols(); ++j) w(i, j) = scale * rng.gaussian();
        }
    }
    for (std::size_t h = 0; h < arch.hidden_count(); ++h) {
        if (!arch.batch_norm[h]) continue;
        std::fill(p.gamma[h].begin(), p.gamma[h].end(), 1.0);
        std::fill(p.running_var[h].begin(), p.running_var[h].end(), 1.0);
    }
    return p;
}

double loss_ssr(const Matrix& pred, const Matrix& obs) {
    if (pred.rows() != obs.rows() || pred.cols() != obs.cols()) {
        throw DimensionError("loss_ssr: shape mismatch");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < pred.rows(); ++i) {
        for (std::size_t j = 0; j < pred.cols(); ++j) {
            const double r = pred(i, j) - obs(i, j);
            total += r * r;
        }
    }
    return total;
}

Matrix batchnorm_forward(const Matrix& z, std::span<const double> gamma,
                         std::span<const double> beta, std::vector<double>& running_mean,
                         std::vector<double>& running_var, MlpMode mode, double momentum,
                         double epsilon, BatchNormStats* stats_out, Matrix* normalized_out) {
    const std::size_t rows = z.rows();
    const std::size_t width = z.cols();
    if (gamma.size() != width || beta.size() != width || running_mean.size() != width ||
        running_var.size() != width) {
        throw DimensionError("batchnorm_forward: parameter width mismatch");
    }
    if (mode == MlpMode::kTrain && rows < 2) {
        throw DimensionError("batchnorm_forward: train mode needs a batch of >= 2 rows");
    }

    Matrix out(rows, width);
    Matrix normalized(rows, width);
    BatchNormStats stats;

    if (mode == MlpMode::kTrain) {
        stats.mean.resize(width);
        stats.var.resize(width);
        for (std::size_t j = 0; j < width; ++j) {
            double sum = 0.0;
            for (std::size_t i = 0; i < rows; ++i) sum += z(i, j);
            const double mean = sum / static_cast<double>(rows);
            double sq = 0.0;
            for (std::size_t i = 0; i < rows; ++i) {
                const double d = z(i, j) - mean;
                sq += d * d;
            }
            const double var = sq / static_cast<double>(rows);
            stats.mean[j] = mean;
            stats.var[j] = var;

            const double inv_std = 1.0 / std::sqrt(var + epsilon);
            for (std::size_t i = 0; i < rows; ++i) {
                const double xhat = (z(i, j) - mean) * inv_std;
                normalized(i, j) = xhat;
                out(i, j) = gamma[j] * xhat + beta[j];
            }
            running_mean[j] = momentum * running_mean[j] + (1.0 - momentum) * mean;
            running_var[j] = momentum * running_var[j] + (1.0 - momentum) * var;
        }
    } else {
        for (std::size_t j = 0; j < width; ++j) {
            const double inv_std = 1.0 / std::sqrt(running_var[j] + epsilon);
            for (std::size_t i = 0; i < rows; ++i) {
                const double xhat = (z(i, j) - running_mean[j]) * inv_std;
                normalized(i, j) = xhat;
                out(i, j) = gamma[j] * xhat + beta[j];
            }
        }
    }

    if (stats_out) *stats_out = std::move(stats);
    if (normalized_out) *normalized_out = std::move(normalized);
    return out;
}

namespace {

Matrix affine_forward(const Matrix& input, const Matrix& w, const std::vector<double>& b) {
    const std::size_t rows = input.rows();
    const std::size_t out_width = w.rows();
    Matrix z(rows, out_width);
    for (std::size_t i = 0; i < rows; ++i) {
        const auto in_row = input.row(i);
        for (std::size_t o = 0; o < out_width; ++o) {
            const auto w_row = w.row(o);
            double acc = b[o];
            for (std::size_t j = 0; j < in_row.size(); ++j) acc += in_row[j] * w_row[j];
            z(i, o) = acc;
        }
    }
    return z;
}

Matrix apply_activation(const Matrix& h, Activation activation) {
    if (activation == Activation::kIdentity) return h;
    Matrix out = h;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        for (std::size_t j = 0; j < out.cols(); ++j) {
            if (out(i, j) < 0.0) out(i, j) = 0.0;
        }
    }
    return out;
}

} // namespace

ForwardCache mlp_forward(const MlpArchitecture& arch, MlpParameters& params,
                         const Matrix& batch, MlpMode mode, double bn_momentum) {
    if (batch.cols() != arch.input_count()) {
        throw DimensionError("mlp_forward: batch width " + std::to_string(batch.cols()) +
                             " != input width " + std::to_string(arch.input_count()));
    }

    const std::size_t layers = arch.affine_count();
    ForwardCache cache;
    cache.inputs.resize(layers);
    cache.affine.resize(layers);
    cache.bn_normalized.resize(arch.hidden_count());
    cache.bn_stats.resize(arch.hidden_count());
    cache.pre_activation.resize(arch.hidden_count());

    Matrix current = batch;
    for (std::size_t l = 0; l < layers; ++l) {
        cache.inputs[l] = current;
        Matrix z = affine_forward(current, params.weights[l], params.biases[l]);
        cache.affine[l] = z;

        if (l + 1 == layers) { // linear regression head
            cache.output = std::move(z);
            break;
        }

        Matrix h = std::move(z);
        if (arch.batch_norm[l]) {
            h = batchnorm_forward(cache.affine[l], params.gamma[l], params.beta[l],
                                  params.running_mean[l], params.running_var[l], mode,
                                  bn_momentum, arch.bn_epsilon, &cache.bn_stats[l],
                                  &cache.bn_normalized[l]);
        }
        cache.pre_activation[l] = h;
        current = apply_activation(h, arch.hidden_activation);
    }
    return cache;
}

Matrix mlp_infer(const MlpArchitecture& arch, const MlpParameters& params, const Matrix& batch) {
    // Infer mode never touches the running stats; the const_cast only feeds
    // the shared forward path.
    auto& mutable_params = const_cast<MlpParameters&>(params);
    ForwardCache cache = mlp_forward(arch, mutable_params, batch, MlpMode::kInfer);
    return std::move(cache.output);
}

MlpParameters mlp_backward(const MlpArchitecture& arch, const MlpParameters& params,
                           const ForwardCache& cache, const Matrix& obs) {
    if (obs.rows() != cache.output.rows() || obs.cols() != cache.output.cols()) {
        throw DimensionError("mlp_backward: observation shape mismatch");
    }

    const std::size_t layers = arch.affine_count();
    const std::size_t rows = cache.output.rows();
    MlpParameters grads = make_parameters(arch);

    // dL/d(output) for SSR.
    Matrix delta(rows, cache.output.cols());
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < delta.cols(); ++j) {
            delta(i, j) = 2.0 * (cache.output(i, j) - obs(i, j));
        }
    }

    for (std::size_t l = layers; l-- > 0;) {
        if (l + 1 < layers) {
            // Through the activation.
            if (arch.hidden_activation == Activation::kRelu) {
                const Matrix& pre = cache.pre_activation[l];
                for (std::size_t i = 0; i < rows; ++i) {
                    for (std::size_t j = 0; j < delta.cols(); ++j) {
                        if (!(pre(i, j) > 0.0)) delta(i, j) = 0.0;
                    }
                }
            }
            // Through batch norm.
            if (arch.batch_norm[l]) {
                const Matrix& z = cache.affine[l];
                const Matrix& xhat = cache.bn_normalized[l];
                const BatchNormStats& stats = cache.bn_stats[l];
                const std::size_t width = delta.cols();
                const auto r = static_cast<double>(rows);

                Matrix dz(rows, width);
                for (std::size_t j = 0; j < width; ++j) {
                    const double inv_std = 1.0 / std::sqrt(stats.var[j] + arch.bn_epsilon);
                    double dgamma = 0.0;
                    double dbeta = 0.0;
                    double dxhat_sum = 0.0;
                    double dxhat_dot_centered = 0.0;
                    for (std::size_t i = 0; i < rows; ++i) {
                        const double dy = delta(i, j);
                        dgamma += dy * xhat(i, j);
                        dbeta += dy;
                        const double dxhat = dy * params.gamma[l][j];
                        dxhat_sum += dxhat;
                        dxhat_dot_centered += dxhat * (z(i, j) - stats.mean[j]);
                    }
                    grads.gamma[l][j] = dgamma;
                    grads.beta[l][j] = dbeta;

                    const double dvar =
                        dxhat_dot_centered * (-0.5) * inv_std * inv_std * inv_std;
                    double centered_sum = 0.0;
                    for (std::size_t i = 0; i < rows; ++i) centered_sum += z(i, j) - stats.mean[j];
                    const double dmean =
                        -inv_std * dxhat_sum + dvar * (-2.0 / r) * centered_sum;
                    for (std::size_t i = 0; i < rows; ++i) {
                        const double dxhat = delta(i, j) * params.gamma[l][j];
                        dz(i, j) = dxhat * inv_std +
                                   dvar * 2.0 * (z(i, j) - stats.mean[j]) / r + dmean / r;
                    }
                }
                delta = std::move(dz);
            }
        }

        // Through the affine layer: dW, db, and delta for the layer below.
        const Matrix& input = cache.inputs[l];
        Matrix& dw = grads.weights[l];
        for (std::size_t o = 0; o < dw.rows(); ++o) {
            double db = 0.0;
            for (std::size_t i = 0; i < rows; ++i) db += delta(i, o);
            grads.biases[l][o] = db;
            for (std::size_t j = 0; j < dw.cols(); ++j) {
                double acc = 0.0;
                for (std::size_t i = 0; i < rows; ++i) acc += delta(i, o) * input(i, j);
                dw(o, j) = acc;
            }
        }
        if (l > 0) {
            const Matrix& w = params.weights[l];
            Matrix next(rows, w.cols());
            for (std::size_t i = 0; i < rows; ++i) {
                for (std::size_t j = 0; j < w.cols(); ++j) {
                    double acc = 0.0;
                    for (std::size_t o = 0; o < w.rows(); ++o) acc += delta(i, o) * w(o, j);
                    next(i, j) = acc;
                }
            }
            delta = std::move(next);
        }
    }
    return grads;
}

namespace {

/// Canonical flat enumeration: weights then bias per layer, then gamma/beta
/// per batch-norm layer. Adam state and gradient_check both rely on it.
template <typename Params, typename Fn>
void for_each_trainable(const MlpArchitecture& arch, Params& params, Fn&& fn) {
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        auto& w = params.weights[l];
        for (std::size_t i = 0; i < w.rows(); ++i) {
            for (std::size_t j = 0; j < w.cols(); ++j) fn(w(i, j));
        }
        for (auto& b : params.biases[l]) fn(b);
    }
    for (std::size_t h = 0; h < arch.hidden_count(); ++h) {
        if (!arch.batch_norm[h]) continue;
        for (auto& g : params.gamma[h]) fn(g);
        for (auto& b : params.beta[h]) fn(b);
    }
}

std::vector<double*> trainable_pointers(const MlpArchitecture& arch, MlpParameters& params) {
    std::vector<double*> ptrs;
    ptrs.reserve(arch.parameter_count());
    for_each_trainable(arch, params, [&](double& v) { ptrs.push_back(&v); });
    return ptrs;
}

} // namespace

void adam_step(MlpParameters& params, const MlpParameters& grads, AdamState& state) {
    // Flatten gradients in the canonical order (shapes agree by construction).
    std::vector<double> flat_grads;
    flat_grads.reserve(state.m.size());
    for (std::size_t l = 0; l < grads.weights.size(); ++l) {
        const Matrix& w = grads.weights[l];
        for (std::size_t i = 0; i < w.rows(); ++i) {
            for (std::size_t j = 0; j < w.cols(); ++j) flat_grads.push_back(w(i, j));
        }
        for (double b : grads.biases[l]) flat_grads.push_back(b);
    }
    for (std::size_t h = 0; h < grads.gamma.size(); ++h) {
        for (double g : grads.gamma[h]) flat_grads.push_back(g);
        for (double b : grads.beta[h]) flat_grads.push_back(b);
    }
    if (flat_grads.size() != state.m.size()) {
        throw DimensionError("adam_step: state sized for " + std::to_string(state.m.size()) +
                             " parameters, got " + std::to_string(flat_grads.size()));
    }

    state.t += 1;
    const AdamConfig& c = state.config;
    const double bias1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.t));
    const double bias2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.t));

    std::size_t index = 0;
    const auto update = [&](double& value) {
        const double g = flat_grads[index];
        state.m[index] = c.beta1 * state.m[index] + (1.0 - c.beta1) * g;
        state.v[index] = c.beta2 * state.v[index] + (1.0 - c.beta2) * g * g;
        const double m_hat = state.m[index] / bias1;
        const double v_hat = state.v[index] / bias2;
        value -= c.alpha * m_hat / (std::sqrt(v_hat) + c.epsilon);
        ++index;
    };
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        Matrix& w = params.weights[l];
        for (std::size_t i = 0; i < w.rows(); ++i) {
            for (std::size_t j = 0; j < w.cols(); ++j) update(w(i, j));
        }
        for (double& b : params.biases[l]) update(b);
    }
    for (std::size_t h = 0; h < params.gamma.size(); ++h) {
        for (double& g : params.gamma[h]) update(g);
        for (double& b : params.beta[h]) update(b);
    }
}

void TrainConfig::validate() const {
    if (batch_size < 2) throw ConfigError("TrainConfig: batch_size must be >= 2 (batch norm)");
    if (patience < 1) throw ConfigError("TrainConfig: patience must be >= 1");
    if (max_epochs < 1) throw ConfigError("TrainConfig: max_epochs must be >= 1");
}

MlpModel train_mlp(const Matrix& train_x, const Matrix& train_y, const Matrix& val_x,
                   const Matrix& val_y, const MlpArchitecture& arch, const TrainConfig& config,
                   TrainTrace* trace) {
    arch.validate();
    config.validate();
    if (train_x.rows() != train_y.rows() || val_x.rows() != val_y.rows()) {
        throw DimensionError("train_mlp: X/Y row mismatch");
    }
    if (config.batch_size > train_x.rows()) {
        throw ConfigError("train_mlp: batch_size exceeds training rows");
    }
    if (train_x.cols() != arch.input_count() || train_y.cols() != arch.output_count()) {
        throw DimensionError("train_mlp: architecture does not match data shapes");
    }

    MlpParameters params = init_parameters(arch, mix_seed(config.seed, 0));
    AdamState adam(arch.parameter_count(), config.adam);

    MlpParameters best_params = params;
    double best_rmse = std::numeric_limits<double>::infinity();
    std::size_t best_epoch = 0;
    std::size_t epochs_since_best = 0;

    const std::size_t m = train_x.rows();
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;

    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        Rng shuffle_rng(mix_seed(config.seed, epoch));
        deterministic_shuffle(order, shuffle_rng);

        for (std::size_t start = 0; start < m; start += config.batch_size) {
            const std::size_t size = std::min(config.batch_size, m - start);
            if (size < 2) break; // a 1-row tail has no batch variance
            const std::span<const std::size_t> rows(order.data() + start, size);
            const Matrix bx = train_x.take_rows(rows);
            const Matrix by = train_y.take_rows(rows);

            const ForwardCache cache =
                mlp_forward(arch, params, bx, MlpMode::kTrain, config.bn_momentum);
            const MlpParameters grads = mlp_backward(arch, params, cache, by);
            adam_step(params, grads, adam);
        }

        const Matrix val_pred = mlp_infer(arch, params, val_x);
        const double val_rmse = global_rmse(val_pred, val_y);

        if (val_rmse < best_rmse) {
            best_rmse = val_rmse;
            best_params = params;
            best_epoch = epoch;
            epochs_since_best = 0;
        } else {
            ++epochs_since_best;
        }
        if (trace) {
            trace->validation_rmse.push_back(val_rmse);
            trace->best_rmse_so_far.push_back(best_rmse);
        }
        if (epochs_since_best >= config.patience) break;
    }

    if (trace) trace->best_epoch = best_epoch;

    MlpModel model(arch, std::move(best_params));
    model.metadata().family = "mlp";
    model.metadata().seed = config.seed;
    auto& hp = model.metadata().hyperparams;
    std::string widths;
    for (std::size_t i = 0; i < arch.layer_widths.size(); ++i) {
        if (i) widths += 'x';
        widths += std::to_string(arch.layer_widths[i]);
    }
    hp["layers"] = widths;
    hp["activation"] = to_string(arch.hidden_activation);
    hp["batch_size"] = std::to_string(config.batch_size);
    hp["max_epochs"] = std::to_string(config.max_epochs);
    hp["patience"] = std::to_string(config.patience);
    hp["alpha"] = format_hexfloat(config.adam.alpha);
    return model;
}

std::vector<double> MlpModel::predict_row(std::span<const double> x) const {
    if (x.size() != arch_.input_count()) {
        throw DimensionError("MlpModel::predict_row: expected width " +
                             std::to_string(arch_.input_count()) + ", got " +
                             std::to_string(x.size()));
    }
    Matrix batch(1, x.size());
    for (std::size_t j = 0; j < x.size(); ++j) batch(0, j) = x[j];
    const Matrix out = mlp_infer(arch_, params_, batch);
    std::vector<double> row(out.cols());
    for (std::size_t j = 0; j < out.cols(); ++j) row[j] = out(0, j);
    return row;
}

double gradient_check(const MlpArchitecture& arch, std::uint64_t seed) {
    arch.validate();
    if (arch.parameter_count() > 200) {
        throw ConfigError("gradient_check: net too large (" +
                          std::to_string(arch.parameter_count()) + " parameters, cap 200)");
    }

    Rng rng(mix_seed(seed, 1));
    const std::size_t rows = 2 + rng.uniform_index(7); // batch in [2, 8]
    Matrix batch(rows, arch.input_count());
    Matrix obs(rows, arch.output_count());
    for (std::size_t i = 0; i < rows; ++i) {
        for (auto& v : batch.row(i)) v = rng.gaussian();
        for (auto& v : obs.row(i)) v = rng.gaussian();
    }

    MlpParameters params = init_parameters(arch, mix_seed(seed, 2));
    const ForwardCache cache = mlp_forward(arch, params, batch, MlpMode::kTrain);
    MlpParameters analytic = mlp_backward(arch, params, cache, obs);

    const auto param_ptrs = trainable_pointers(arch, params);
    const auto grad_ptrs = trainable_pointers(arch, analytic);

    constexpr double kStep = 1e-5;
    double max_error = 0.0;
    for (std::size_t p = 0; p < param_ptrs.size(); ++p) {
        const double saved = *param_ptrs[p];

        *param_ptrs[p] = saved + kStep;
        const double loss_plus =
            loss_ssr(mlp_forward(arch, params, batch, MlpMode::kTrain).output, obs);
        *param_ptrs[p] = saved - kStep;
        const double loss_minus =
            loss_ssr(mlp_forward(arch, params, batch, MlpMode::kTrain).output, obs);
        *param_ptrs[p] = saved;

        const double numeric = (loss_plus - loss_minus) / (2.0 * kStep);
        const double a = *grad_ptrs[p];
        const double rel =
            std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
        max_error = std::max(max_error, rel);
    }
    return max_error;
}

void write_mlp_payload(const MlpModel& model, PayloadWriter& writer) {
    const MlpArchitecture& arch = model.architecture();
    const MlpParameters& p = model.parameters();

    writer.write_u64(arch.layer_widths.size());
    for (std::size_t w : arch.layer_widths) writer.write_u64(w);
    writer.write_u8(arch.hidden_activation == Activation::kRelu ? 0 : 1);
    for (std::uint8_t flag : arch.batch_norm) writer.write_u8(flag ? 1 : 0);
    writer.write_f64(arch.bn_epsilon);

    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        const Matrix& w = p.weights[l];
        for (std::size_t i = 0; i < w.rows(); ++i) {
            for (double v : w.row(i)) writer.write_f64(v);
        }
        for (double b : p.biases[l]) writer.write_f64(b);
    }
    for (std::size_t h = 0; h < arch.hidden_count(); ++h) {
        if (!arch.batch_norm[h]) continue;
        for (double v : p.gamma[h]) writer.write_f64(v);
        for (double v : p.beta[h]) writer.write_f64(v);
        for (double v : p.running_mean[h]) writer.write_f64(v);
        for (double v : p.running_var[h]) writer.write_f64(v);
    }
}

MlpModel read_mlp_payload(PayloadReader& reader) {
    MlpArchitecture arch;
    const std::uint64_t width_count = reader.read_u64();
    if (width_count < 3 || width_count > 64) {
        throw IoError("corrupt mlp payload: bad layer count near offset " +
                      std::to_string(reader.offset()));
    }
    arch.layer_widths.resize(width_count);
    for (auto& w : arch.layer_widths) {
        w = reader.read_u64();
        if (w == 0 || w > (1u << 20)) {
            throw IoError("corrupt mlp payload: bad layer width near offset " +
                          std::to_string(reader.offset()));
        }
    }
    const std::uint8_t activation = reader.read_u8();
    if (activation > 1) {
        throw IoError("corrupt mlp payload: bad activation near offset " +
                      std::to_string(reader.offset()));
    }
    arch.hidden_activation = activation == 0 ? Activation::kRelu : Activation::kIdentity;
    arch.batch_norm.resize(arch.hidden_count());
    for (auto& flag : arch.batch_norm) {
        const std::uint8_t f = reader.read_u8();
        if (f > 1) {
            throw IoError("corrupt mlp payload: bad batch-norm flag near offset " +
                          std::to_string(reader.offset()));
        }
        flag = f;
    }
    arch.bn_epsilon = reader.read_f64();

    MlpParameters p = make_parameters(arch);
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        Matrix& w = p.weights[l];
        for (std::size_t i = 0; i < w.rows(); ++i) {
            for (auto& v : w.row(i)) v = reader.read_f64();
        }
        for (auto& b : p.biases[l]) b = reader.read_f64();
    }
    for (std::size_t h = 0; h < arch.hidden_count(); ++h) {
        if (!arch.batch_norm[h]) continue;
        for (auto& v : p.gamma[h]) v = reader.read_f64();
        for (auto& v : p.beta[h]) v = reader.read_f64();
        for (auto& v : p.running_mean[h]) v = reader.read_f64();
        for (auto& v : p.running_var[h]) v = reader.read_f64();
    }
    return MlpModel(std::move(arch), std::move(p));
}

} // namespace nbm
