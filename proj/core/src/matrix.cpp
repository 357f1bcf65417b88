#include "nbm/matrix.hpp"

#include "nbm/error.hpp"

#include <cmath>

namespace nbm {

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m;
    m.rows_ = rows.size();
    m.cols_ = rows.size() == 0 ? 0 : rows.begin()->size();
    m.data_.reserve(m.rows_ * m.cols_);
    for (const auto& r : rows) {
        if (r.size() != m.cols_) {
            throw DimensionError("Matrix::from_rows: ragged row lengths");
        }
        m.data_.insert(m.data_.end(), r.begin(), r.end());
    }
    return m;
}

Matrix Matrix::take_rows(std::span<const std::size_t> indices) const {
    Matrix out(indices.size(), cols_);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const auto src = row(indices[i]);
        auto dst = out.row(i);
        for (std::size_t j = 0; j < cols_; ++j) dst[j] = src[j];
    }
    return out;
}

std::vector<double> Matrix::column(std::size_t j) const {
    std::vector<double> col(rows_);
    for (std::size_t i = 0; i < rows_; ++i) col[i] = (*this)(i, j);
    return col;
}

bool Matrix::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

} // namespace nbm
