#include "nbm/knn.hpp"

#include "nbm/error.hpp"
#include "nbm/model_io.hpp"

#include <algorithm>

namespace nbm {

KnnModel fit_knn(const Matrix& X, const Matrix& Y, std::size_t k) {
    if (X.rows() != Y.rows()) throw DimensionError("fit_knn: X/Y row mismatch");
    if (k < 1 || k > X.rows()) {
        throw ConfigError("fit_knn: K must be in [1, " + std::to_string(X.rows()) + "], got " +
                          std::to_string(k));
    }
    KnnModel model;
    model.x_ = X;
    model.y_ = Y;
    model.k_ = k;
    model.metadata_.family = "knn";
    model.metadata_.hyperparams["k"] = std::to_string(k);
    return model;
}

std::vector<double> KnnModel::predict_row(std::span<const double> x) const {
    if (x.size() != x_.cols()) {
        throw DimensionError("KnnModel::predict_row: expected width " +
                             std::to_string(x_.cols()) + ", got " + std::to_string(x.size()));
    }

    const std::size_t m = x_.rows();
    std::vector<std::pair<double, std::size_t>> by_distance(m);
    for (std::size_t i = 0; i < m; ++i) {
        double d2 = 0.0;
        const auto row = x_.row(i);
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double d = row[j] - x[j];
            d2 += d * d;
        }
        by_distance[i] = {d2, i};
    }

    std::partial_sort(by_distance.begin(), by_distance.begin() + static_cast<std::ptrdiff_t>(k_),
                      by_distance.end());

    std::vector<double> mean(y_.cols(), 0.0);
    for (std::size_t s = 0; s < k_; ++s) {
        const auto row = y_.row(by_distance[s].second);
        for (std::size_t t = 0; t < mean.size(); ++t) mean[t] += row[t];
    }
    for (double& v : mean) v /= static_cast<double>(k_);
    return mean;
}

void write_knn_payload(const KnnModel& model, PayloadWriter& writer) {
    writer.write_u64(model.stored_inputs().rows());
    writer.write_u64(model.stored_inputs().cols());
    writer.write_u64(model.stored_targets().cols());
    writer.write_u64(model.neighbour_count());
    for (std::size_t i = 0; i < model.stored_inputs().rows(); ++i) {
        for (double v : model.stored_inputs().row(i)) writer.write_f64(v);
    }
    for (std::size_t i = 0; i < model.stored_targets().rows(); ++i) {
        for (double v : model.stored_targets().row(i)) writer.write_f64(v);
    }
}

KnnModel read_knn_payload(PayloadReader& reader) {
    const std::uint64_t rows = reader.read_u64();
    const std::uint64_t input_count = reader.read_u64();
    const std::uint64_t target_count = reader.read_u64();
    const std::uint64_t k = reader.read_u64();
    if (rows == 0 || k == 0 || k > rows) {
        throw IoError("corrupt knn payload near offset " + std::to_string(reader.offset()));
    }

    KnnModel model;
    model.k_ = k;
    model.x_ = Matrix(rows, input_count);
    model.y_ = Matrix(rows, target_count);
    for (std::size_t i = 0; i < rows; ++i) {
        for (auto& v : model.x_.row(i)) v = reader.read_f64();
    }
    for (std::size_t i = 0; i < rows; ++i) {
        for (auto& v : model.y_.row(i)) v = reader.read_f64();
    }
    return model;
}

} // namespace nbm
