#pragma once

#include "nbm/matrix.hpp"
#include "nbm/scada.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nbm {

/// Wind-direction encoding. Cosine alone is the default; the sin/cos pair is
/// offered because cosine is non-injective (theta and 360-theta collide).
enum class DirectionMode { kCosOnly, kSinCos };

const char* to_string(DirectionMode mode);
DirectionMode direction_mode_from_string(const std::string& text);

/// Number of feature columns the encoding produces (1 or 2).
std::size_t direction_feature_count(DirectionMode mode);

/// Encodes degrees into the cyclical feature(s); 2*pi-periodic by
/// construction. cos-only yields {cos}, sin-cos yields {sin, cos}.
std::vector<double> encode_direction(double theta_deg, DirectionMode mode);

/// Input matrix X (wind speed + encoded direction) and target matrix Y
/// (power, rotor speed, generator speed, current), raw units, aligned rows.
struct DesignMatrices {
    Matrix X;
    Matrix Y;
};

inline constexpr std::array<const char*, 4> kTargetLabels = {
    "active_power", "rotor_speed", "generator_speed", "current"};

/// Builds X/Y in the fixed column order. Throws on empty dataset or
/// non-finite values (naming row and column).
DesignMatrices build_design_matrices(const SCADADataset& dataset, DirectionMode mode);

/// Per-column standardization statistics. std is the population standard
/// deviation over the fit rows; zero-variance columns get std = 1 and a
/// warning flag so degenerate inputs still run.
struct NormalizationParams {
    std::vector<double> mean;
    std::vector<double> std_dev;
    std::vector<std::string> labels;
    std::vector<std::uint8_t> zero_variance;

    std::size_t column_count() const { return mean.size(); }
    bool any_zero_variance() const;
};

/// Half-open contiguous row range [begin, end).
struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const { return end - begin; }
    friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

/// Chronological train/validation/test ranges; disjoint, covering, ordered.
struct SplitIndices {
    IndexRange train;
    IndexRange validation;
    IndexRange test;
    std::size_t test_size() const { return test.size(); }
    friend bool operator==(const SplitIndices&, const SplitIndices&) = default;
};

struct SplitRatios {
    double train = 0.6;
    double validation = 0.2;
    double test = 0.2;
};

/// Chronological is the default (no temporal leakage in a time series);
/// shuffled permutes rows with a seed before taking the contiguous chunks.
enum class SplitMode { kChronological, kShuffled };

const char* to_string(SplitMode mode);
SplitMode split_mode_from_string(const std::string& text);

/// floor(train*m) / floor(validation*m) / remainder, chronological order.
/// Requires m >= 5 and positive ratios summing to 1.
SplitIndices chronological_split(std::size_t m, const SplitRatios& ratios);

/// Explicit row lists per split; chronological mode expands the contiguous
/// ranges, shuffled mode chops a seeded permutation into the same sizes.
struct SplitPlan {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
};

SplitPlan split_rows(std::size_t m, const SplitRatios& ratios, SplitMode mode,
                     std::uint64_t seed);

/// Fits per-column mean/std over the given rows only. Throws on empty range.
NormalizationParams fit_normalizer(const Matrix& matrix, IndexRange fit_rows,
                                   const std::vector<std::string>& labels = {});

/// x -> (x - mean) / std per column. Column count must match the params.
Matrix apply_normalizer(const Matrix& matrix, const NormalizationParams& params);

/// Exact inverse of apply_normalizer.
Matrix invert_normalizer(const Matrix& matrix, const NormalizationParams& params);

} // namespace nbm
