#pragma once

#include "nbm/matrix.hpp"
#include "nbm/preprocess.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace nbm {

inline constexpr int kModelFormatVersion = 1;
inline constexpr char kModelMagic[4] = {'N', 'B', 'M', '1'};

/// Everything needed to reproduce and apply a trained model: family,
/// hyperparameters, seed, and the normalization fitted on the training
/// split. Predictions are defined in normalized space; callers denormalize
/// through target_norm.
struct ModelMetadata {
    std::string family;
    int format_version = kModelFormatVersion;
    std::uint64_t seed = 0;
    DirectionMode direction_mode = DirectionMode::kCosOnly;
    SplitRatios split;
    SplitMode split_mode = SplitMode::kChronological;
    std::uint64_t split_seed = 0;
    std::vector<std::string> target_labels;
    NormalizationParams input_norm;
    NormalizationParams target_norm;
    std::map<std::string, std::string> hyperparams; ///< canonical key order
};

/// Shared multi-target regressor contract. predict_row is deterministic and
/// total on finite inputs; single-target models are the n = 1 case. Trained
/// models are immutable and safe to share across threads.
class Regressor {
public:
    virtual ~Regressor() = default;

    virtual std::size_t input_count() const = 0;
    virtual std::size_t target_count() const = 0;

    /// Normalized input row (length k) -> normalized target row (length n).
    virtual std::vector<double> predict_row(std::span<const double> x) const = 0;

    virtual const ModelMetadata& metadata() const = 0;
    virtual ModelMetadata& metadata() = 0;
};

/// Row-by-row batch prediction; row order preserved. Throws DimensionError
/// if X width disagrees with the model.
Matrix predict_batch(const Regressor& model, const Matrix& X);

} // namespace nbm
