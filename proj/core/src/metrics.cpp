#include "nbm/metrics.hpp"

#include "nbm/error.hpp"

#include <algorithm>
#include <cmath>

namespace nbm {

namespace {

void check_shapes(const Matrix& pred, const Matrix& obs, const char* op) {
    if (pred.rows() != obs.rows() || pred.cols() != obs.cols()) {
        throw DimensionError(std::string(op) + ": shape mismatch (" +
                             std::to_string(pred.rows()) + "x" + std::to_string(pred.cols()) +
                             " vs " + std::to_string(obs.rows()) + "x" +
                             std::to_string(obs.cols()) + ")");
    }
}

} // namespace

std::vector<double> rmse_per_target(const Matrix& pred, const Matrix& obs) {
    check_shapes(pred, obs, "rmse_per_target");
    if (pred.rows() == 0) throw DimensionError("rmse_per_target: need at least one row");

    const auto s = static_cast<double>(pred.rows());
    std::vector<double> rmse(pred.cols());
    for (std::size_t j = 0; j < pred.cols(); ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < pred.rows(); ++i) {
            const double r = pred(i, j) - obs(i, j);
            acc += r * r;
        }
        rmse[j] = std::sqrt(acc / s);
    }
    return rmse;
}

double global_rmse(const Matrix& pred, const Matrix& obs) {
    check_shapes(pred, obs, "global_rmse");
    if (pred.rows() == 0) throw DimensionError("global_rmse: need at least one row");

    // Row-major summation, matching loss_ssr exactly.
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.rows(); ++i) {
        for (std::size_t j = 0; j < pred.cols(); ++j) {
            const double r = pred(i, j) - obs(i, j);
            acc += r * r;
        }
    }
    return std::sqrt(acc / (static_cast<double>(pred.rows()) * static_cast<double>(pred.cols())));
}

Matrix residual_series(const Matrix& pred, const Matrix& obs) {
    check_shapes(pred, obs, "residual_series");
    Matrix out(pred.rows(), pred.cols());
    for (std::size_t i = 0; i < pred.rows(); ++i) {
        for (std::size_t j = 0; j < pred.cols(); ++j) {
            out(i, j) = obs(i, j) - pred(i, j);
        }
    }
    return out;
}

double quantile_sorted(std::span<const double> sorted, double p) {
    const auto s = static_cast<double>(sorted.size());
    double h = s * p + 0.5; // 1-based position
    h = std::clamp(h, 1.0, s);
    const auto lo = static_cast<std::size_t>(h); // floor for h >= 1
    const double frac = h - static_cast<double>(lo);
    if (frac == 0.0 || lo >= sorted.size()) return sorted[lo - 1];
    return sorted[lo - 1] + frac * (sorted[lo] - sorted[lo - 1]);
}

std::vector<std::pair<double, double>> qq_pairs(std::span<const double> sample_a,
                                                std::span<const double> sample_b,
                                                std::size_t q) {
    if (sample_a.empty() || sample_b.empty()) {
        throw DimensionError("qq_pairs: empty sample");
    }
    if (q < 2 || sample_a.size() < q || sample_b.size() < q) {
        throw ConfigError("qq_pairs: need both samples >= q and q >= 2");
    }

    std::vector<double> a(sample_a.begin(), sample_a.end());
    std::vector<double> b(sample_b.begin(), sample_b.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());

    std::vector<std::pair<double, double>> pairs(q);
    for (std::size_t i = 0; i < q; ++i) {
        const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(q);
        pairs[i] = {quantile_sorted(a, p), quantile_sorted(b, p)};
    }
    return pairs;
}

} // namespace nbm
