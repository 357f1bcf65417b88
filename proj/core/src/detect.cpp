#include "nbm/detect.hpp"

#include "nbm/error.hpp"

#include <cmath>

namespace nbm {

ResidualStats fit_residual_stats(const Matrix& residuals) {
    if (residuals.rows() == 0) {
        throw DimensionError("fit_residual_stats: empty reference residuals");
    }
    const auto count = static_cast<double>(residuals.rows());
    const std::size_t targets = residuals.cols();

    ResidualStats stats;
    stats.mean.resize(targets);
    stats.std_dev.resize(targets);
    stats.zero_variance.assign(targets, 0);

    for (std::size_t t = 0; t < targets; ++t) {
        double sum = 0.0;
        for (std::size_t i = 0; i < residuals.rows(); ++i) sum += residuals(i, t);
        const double mean = sum / count;
        double sq = 0.0;
        for (std::size_t i = 0; i < residuals.rows(); ++i) {
            const double d = residuals(i, t) - mean;
            sq += d * d;
        }
        const double var = sq / count;
        stats.mean[t] = mean;
        if (var <= 0.0) {
            stats.std_dev[t] = 1.0;
            stats.zero_variance[t] = 1;
        } else {
            stats.std_dev[t] = std::sqrt(var);
        }
    }
    return stats;
}

std::vector<AnomalyEvent> detect_anomalies(const Matrix& residuals, const ResidualStats& stats,
                                           double tau, std::size_t w) {
    if (tau <= 0.0) throw ConfigError("detect_anomalies: tau must be > 0");
    if (w < 1) throw ConfigError("detect_anomalies: w must be >= 1");
    if (residuals.cols() != stats.target_count()) {
        throw DimensionError("detect_anomalies: stats fitted for " +
                             std::to_string(stats.target_count()) + " targets, residuals have " +
                             std::to_string(residuals.cols()));
    }

    std::vector<AnomalyEvent> events;
    const std::size_t rows = residuals.rows();

    for (std::size_t t = 0; t < residuals.cols(); ++t) {
        std::size_t run_start = 0;
        std::size_t run_length = 0;
        double peak = 0.0;
        double abs_sum = 0.0;

        const auto close_run = [&](std::size_t end_row) {
            if (run_length >= w) {
                events.push_back({t, run_start, end_row, peak,
                                  abs_sum / static_cast<double>(run_length)});
            }
            run_length = 0;
            peak = 0.0;
            abs_sum = 0.0;
        };

        for (std::size_t i = 0; i < rows; ++i) {
            const double z = std::abs((residuals(i, t) - stats.mean[t]) / stats.std_dev[t]);
            if (z > tau) {
                if (run_length == 0) run_start = i;
                ++run_length;
                peak = std::max(peak, z);
                abs_sum += z;
            } else if (run_length > 0) {
                close_run(i - 1);
            }
        }
        if (run_length > 0) close_run(rows - 1);
    }
    return events;
}

} // namespace nbm
