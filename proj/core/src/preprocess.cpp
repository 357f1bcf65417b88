#include "nbm/preprocess.hpp"

#include "nbm/error.hpp"
#include "nbm/rng.hpp"

#include <cmath>
#include <numbers>

namespace {
constexpr std::uint64_t kSplitStream = 7700; // seed stream tag for shuffled splits
}

namespace nbm {

const char* to_string(DirectionMode mode) {
    return mode == DirectionMode::kCosOnly ? "cos" : "sincos";
}

DirectionMode direction_mode_from_string(const std::string& text) {
    if (text == "cos") return DirectionMode::kCosOnly;
    if (text == "sincos") return DirectionMode::kSinCos;
    throw ConfigError("unknown direction mode '" + text + "' (expected cos or sincos)");
}

std::size_t direction_feature_count(DirectionMode mode) {
    return mode == DirectionMode::kCosOnly ? 1 : 2;
}

std::vector<double> encode_direction(double theta_deg, DirectionMode mode) {
    const double theta = theta_deg * std::numbers::pi / 180.0;
    if (mode == DirectionMode::kCosOnly) return {std::cos(theta)};
    return {std::sin(theta), std::cos(theta)};
}

DesignMatrices build_design_matrices(const SCADADataset& dataset, DirectionMode mode) {
    if (dataset.empty()) {
        throw DimensionError("build_design_matrices: dataset is empty");
    }
    const std::size_t m = dataset.size();
    const std::size_t k = 1 + direction_feature_count(mode);

    DesignMatrices d{Matrix(m, k), Matrix(m, 4)};
    for (std::size_t i = 0; i < m; ++i) {
        const auto& r = dataset.records[i];
        d.X(i, 0) = r.wind_speed;
        const auto dir = encode_direction(r.wind_direction, mode);
        for (std::size_t j = 0; j < dir.size(); ++j) d.X(i, 1 + j) = dir[j];
        d.Y(i, 0) = r.active_power;
        d.Y(i, 1) = r.rotor_speed;
        d.Y(i, 2) = r.generator_speed;
        d.Y(i, 3) = r.current;
    }

    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            if (!std::isfinite(d.X(i, j))) {
                throw ParseError("non-finite input value at row " + std::to_string(i) +
                                 ", X column " + std::to_string(j));
            }
        }
        for (std::size_t j = 0; j < 4; ++j) {
            if (!std::isfinite(d.Y(i, j))) {
                throw ParseError("non-finite target value at row " + std::to_string(i) +
                                 ", column " + std::string(kTargetLabels[j]));
            }
        }
    }
    return d;
}

bool NormalizationParams::any_zero_variance() const {
    for (auto flag : zero_variance) {
        if (flag) return true;
    }
    return false;
}

const char* to_string(SplitMode mode) {
    return mode == SplitMode::kChronological ? "chronological" : "shuffled";
}

SplitMode split_mode_from_string(const std::string& text) {
    if (text == "chronological") return SplitMode::kChronological;
    if (text == "shuffled") return SplitMode::kShuffled;
    throw ConfigError("unknown split mode '" + text + "'");
}

SplitIndices chronological_split(std::size_t m, const SplitRatios& ratios) {
    if (m < 5) {
        throw ConfigError("chronological_split: need at least 5 rows, got " + std::to_string(m));
    }
    if (ratios.train <= 0.0 || ratios.validation <= 0.0 || ratios.test <= 0.0) {
        throw ConfigError("chronological_split: ratios must be positive");
    }
    const double sum = ratios.train + ratios.validation + ratios.test;
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ConfigError("chronological_split: ratios must sum to 1, got " +
                          std::to_string(sum));
    }

    const auto train_size = static_cast<std::size_t>(std::floor(ratios.train * static_cast<double>(m)));
    const auto val_size = static_cast<std::size_t>(std::floor(ratios.validation * static_cast<double>(m)));

    SplitIndices s;
    s.train = {0, train_size};
    s.validation = {train_size, train_size + val_size};
    s.test = {train_size + val_size, m};
    return s;
}

SplitPlan split_rows(std::size_t m, const SplitRatios& ratios, SplitMode mode,
                     std::uint64_t seed) {
    const SplitIndices ranges = chronological_split(m, ratios);

    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    if (mode == SplitMode::kShuffled) {
        Rng rng(mix_seed(seed, kSplitStream));
        deterministic_shuffle(order, rng);
    }

    SplitPlan plan;
    plan.train.assign(order.begin() + static_cast<std::ptrdiff_t>(ranges.train.begin),
                      order.begin() + static_cast<std::ptrdiff_t>(ranges.train.end));
    plan.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(ranges.validation.begin),
                           order.begin() + static_cast<std::ptrdiff_t>(ranges.validation.end));
    plan.test.assign(order.begin() + static_cast<std::ptrdiff_t>(ranges.test.begin),
                     order.begin() + static_cast<std::ptrdiff_t>(ranges.test.end));
    return plan;
}

NormalizationParams fit_normalizer(const Matrix& matrix, IndexRange fit_rows,
                                   const std::vector<std::string>& labels) {
    if (fit_rows.size() == 0) {
        throw ConfigError("fit_normalizer: empty fit range");
    }
    if (fit_rows.end > matrix.rows()) {
        throw DimensionError("fit_normalizer: fit range exceeds matrix rows");
    }

    const std::size_t cols = matrix.cols();
    const auto count = static_cast<double>(fit_rows.size());

    NormalizationParams p;
    p.mean.resize(cols);
    p.std_dev.resize(cols);
    p.zero_variance.assign(cols, 0);
    p.labels = labels.empty() ? std::vector<std::string>(cols) : labels;

    for (std::size_t j = 0; j < cols; ++j) {
        double sum = 0.0;
        for (std::size_t i = fit_rows.begin; i < fit_rows.end; ++i) sum += matrix(i, j);
        const double mean = sum / count;

        double sq = 0.0;
        for (std::size_t i = fit_rows.begin; i < fit_rows.end; ++i) {
            const double d = matrix(i, j) - mean;
            sq += d * d;
        }
        const double var = sq / count; // population variance

        p.mean[j] = mean;
        if (var <= 0.0) {
            p.std_dev[j] = 1.0;
            p.zero_variance[j] = 1;
        } else {
            p.std_dev[j] = std::sqrt(var);
        }
    }
    return p;
}

namespace {

void check_column_match(const Matrix& matrix, const NormalizationParams& params,
                        const char* op) {
    if (matrix.cols() != params.column_count()) {
        throw DimensionError(std::string(op) + ": matrix has " + std::to_string(matrix.cols()) +
                             " columns, params have " + std::to_string(params.column_count()));
    }
}

} // namespace

Matrix apply_normalizer(const Matrix& matrix, const NormalizationParams& params) {
    check_column_match(matrix, params, "apply_normalizer");
    Matrix out(matrix.rows(), matrix.cols());
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        for (std::size_t j = 0; j < matrix.cols(); ++j) {
            out(i, j) = (matrix(i, j) - params.mean[j]) / params.std_dev[j];
        }
    }
    return out;
}

Matrix invert_normalizer(const Matrix& matrix, const NormalizationParams& params) {
    check_column_match(matrix, params, "invert_normalizer");
    Matrix out(matrix.rows(), matrix.cols());
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        for (std::size_t j = 0; j < matrix.cols(); ++j) {
            out(i, j) = matrix(i, j) * params.std_dev[j] + params.mean[j];
        }
    }
    return out;
}

} // namespace nbm
