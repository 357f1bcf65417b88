#include "nbm/model.hpp"

#include "nbm/error.hpp"

namespace nbm {

Matrix predict_batch(const Regressor& model, const Matrix& X) {
    if (X.cols() != model.input_count()) {
        throw DimensionError("predict_batch: X width " + std::to_string(X.cols()) +
                             " != model input width " + std::to_string(model.input_count()));
    }
    Matrix out(X.rows(), model.target_count());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const auto pred = model.predict_row(X.row(i));
        auto dst = out.row(i);
        for (std::size_t j = 0; j < pred.size(); ++j) dst[j] = pred[j];
    }
    return out;
}

} // namespace nbm
