#pragma once

#include "nbm/matrix.hpp"
#include "nbm/model.hpp"

#include <span>

namespace nbm {

class PayloadReader;
class PayloadWriter;

/// K-nearest-neighbours regressor over the stored normalized training set.
/// Prediction scans all rows (the brute-force scan is the reference
/// semantics); Euclidean distance, ties at the K-th distance broken by lower
/// training-row index.
class KnnModel final : public Regressor {
public:
    KnnModel() = default;

    std::size_t input_count() const override { return x_.cols(); }
    std::size_t target_count() const override { return y_.cols(); }
    std::vector<double> predict_row(std::span<const double> x) const override;

    const ModelMetadata& metadata() const override { return metadata_; }
    ModelMetadata& metadata() override { return metadata_; }

    std::size_t neighbour_count() const { return k_; }
    const Matrix& stored_inputs() const { return x_; }
    const Matrix& stored_targets() const { return y_; }

    friend KnnModel fit_knn(const Matrix& X, const Matrix& Y, std::size_t k);
    friend KnnModel read_knn_payload(PayloadReader& reader);

private:
    Matrix x_;
    Matrix y_;
    std::size_t k_ = 1;
    ModelMetadata metadata_;
};

/// Stores the data unmodified; throws ConfigError unless 1 <= k <= rows.
KnnModel fit_knn(const Matrix& X, const Matrix& Y, std::size_t k);

void write_knn_payload(const KnnModel& model, PayloadWriter& writer);
KnnModel read_knn_payload(PayloadReader& reader);

} // namespace nbm
