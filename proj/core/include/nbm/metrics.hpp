#pragma once

#include "nbm/matrix.hpp"

#include <span>
#include <utility>
#include <vector>

namespace nbm {

/// Per-column root mean squared error: sqrt((1/s) * sum (pred - obs)^2).
std::vector<double> rmse_per_target(const Matrix& pred, const Matrix& obs);

/// Root of the squared residuals pooled over all instances of all targets,
/// sqrt(SSR / (s*n)); exactly sqrt(loss_ssr(pred, obs) / (s*n)).
double global_rmse(const Matrix& pred, const Matrix& obs);

/// obs - pred, order preserved.
Matrix residual_series(const Matrix& pred, const Matrix& obs);

/// Linear-interpolation quantile at probability p over a sorted sample:
/// order-statistic position h = s*p + 1/2 (1-based), clamped to [1, s].
double quantile_sorted(std::span<const double> sorted, double p);

/// QQ pairs at midpoint probabilities p_i = (i + 0.5)/q. Both samples need
/// at least q values and q >= 2.
std::vector<std::pair<double, double>> qq_pairs(std::span<const double> sample_a,
                                                std::span<const double> sample_b,
                                                std::size_t q);

} // namespace nbm
