#pragma once

#include "nbm/model.hpp"
#include "nbm/preprocess.hpp"
#include "nbm/scada.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>

namespace nbm {

enum class Family { kTree, kForest, kKnn, kMlp };

const char* to_string(Family family);
Family family_from_string(const std::string& text);
inline constexpr std::array<Family, 4> kAllFamilies = {Family::kTree, Family::kForest,
                                                       Family::kKnn, Family::kMlp};

/// Model-ready view of a dataset: raw and normalized design matrices, split
/// row lists, and the normalizers fitted on the training rows only.
struct PreparedData {
    Matrix x_norm;
    Matrix y_norm;
    SplitPlan plan;
    NormalizationParams input_norm;
    NormalizationParams target_norm;
    DirectionMode direction_mode = DirectionMode::kCosOnly;
    SplitRatios ratios;
    SplitMode split_mode = SplitMode::kChronological;
    std::uint64_t split_seed = 0;

    Matrix train_x() const { return x_norm.take_rows(plan.train); }
    Matrix train_y() const { return y_norm.take_rows(plan.train); }
    Matrix validation_x() const { return x_norm.take_rows(plan.validation); }
    Matrix validation_y() const { return y_norm.take_rows(plan.validation); }
    Matrix test_x() const { return x_norm.take_rows(plan.test); }
    Matrix test_y() const { return y_norm.take_rows(plan.test); }
};

/// Splits, fits normalizers on the training rows, and normalizes everything.
PreparedData prepare_dataset(const SCADADataset& dataset, DirectionMode mode,
                             const SplitRatios& ratios,
                             SplitMode split_mode = SplitMode::kChronological,
                             std::uint64_t split_seed = 0);

/// Numeric hyperparameter overrides on top of the per-family defaults.
/// Unknown keys are rejected. Non-numeric choices use small codes
/// (weighting: 0 paper / 1 classic; bootstrap and batch_norm: 0/1).
using HyperparamOverrides = std::map<std::string, double>;

/// Trains one family on the prepared data. `single_target` selects one
/// target column (the n = 1 case); multi-target picks defaults from the
/// multi-target architecture table, single-target from its own. The
/// returned model carries complete metadata and predicts in normalized
/// space. `threads` only affects forest fitting speed, never the result.
std::unique_ptr<Regressor> train_family(Family family, const PreparedData& prepared,
                                        std::optional<std::size_t> single_target,
                                        const HyperparamOverrides& overrides,
                                        std::uint64_t seed, std::size_t threads = 1);

/// Normalized targets restricted to one column (single-target training).
NormalizationParams select_target(const NormalizationParams& params, std::size_t index);

} // namespace nbm
