#pragma once

#include "nbm/matrix.hpp"

#include <cstdint>
#include <vector>

namespace nbm {

/// Per-target residual mean/std fitted on a fault-free reference period;
/// the zero-variance guard mirrors the normalizer's.
struct ResidualStats {
    std::vector<double> mean;
    std::vector<double> std_dev;
    std::vector<std::uint8_t> zero_variance;

    std::size_t target_count() const { return mean.size(); }
};

/// Maximal run of >= `w` consecutive rows whose standardized residual
/// magnitude exceeds the threshold, on one target channel.
struct AnomalyEvent {
    std::size_t target = 0;
    std::size_t start = 0; ///< first flagged row
    std::size_t end = 0;   ///< last flagged row (inclusive)
    double peak_abs_z = 0.0;
    double mean_abs_z = 0.0;

    std::size_t length() const { return end - start + 1; }
};

/// Per-target mean and population std of the reference residuals.
ResidualStats fit_residual_stats(const Matrix& residuals);

/// Flags rows with |(r - mean)/std| > tau per target and keeps maximal runs
/// of at least `w` consecutive flagged rows. Events are ordered by target,
/// then start row.
std::vector<AnomalyEvent> detect_anomalies(const Matrix& residuals, const ResidualStats& stats,
                                           double tau, std::size_t w);

inline constexpr double kDefaultDetectionTau = 3.0;
inline constexpr std::size_t kDefaultDetectionWindow = 6; ///< one hour of 10-min rows

} // namespace nbm
