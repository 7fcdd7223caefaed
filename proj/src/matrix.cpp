#include "srda/matrix.hpp"

#include <cmath>

namespace srda {

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
    std::size_t r = 0;
    for (const auto& row : rows) {
        if (row.size() != m.cols_) throw ShapeError("from_rows: ragged rows");
        std::size_t c = 0;
        for (double v : row) m.at(r, c++) = v;
        ++r;
    }
    return m;
}

Matrix Matrix::row_vector(const std::vector<double>& v) {
    Matrix m(1, v.size());
    m.data_ = v;
    return m;
}

Matrix Matrix::gaussian(std::size_t rows, std::size_t cols, Rng& rng, double sd) {
    Matrix m(rows, cols);
    for (double& x : m.data_) x = sd * rng.normal();
    return m;
}

bool Matrix::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

Matrix& Matrix::operator+=(const Matrix& o) {
    if (!same_shape(o)) throw ShapeError("matrix +=: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
    if (!same_shape(o)) throw ShapeError("matrix -=: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

Matrix Matrix::matmul(const Matrix& o) const {
    if (cols_ != o.rows_) throw ShapeError("matmul: inner dimensions differ");
    Matrix out(rows_, o.cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        const double* a = row_ptr(r);
        double* dst = out.row_ptr(r);
        for (std::size_t k = 0; k < cols_; ++k) {
            const double aval = a[k];
            const double* b = o.row_ptr(k);
            for (std::size_t c = 0; c < o.cols_; ++c) dst[c] += aval * b[c];
        }
    }
    return out;
}

Matrix Matrix::transpose() const {
    Matrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) out.at(c, r) = at(r, c);
    return out;
}

Matrix Matrix::row_copy(std::size_t r) const {
    if (r >= rows_) throw ShapeError("row_copy: row out of range");
    Matrix out(1, cols_);
    for (std::size_t c = 0; c < cols_; ++c) out.at(0, c) = at(r, c);
    return out;
}

void Matrix::set_row(std::size_t r, const Matrix& row) {
    if (r >= rows_ || row.rows() != 1 || row.cols() != cols_)
        throw ShapeError("set_row: shape mismatch");
    for (std::size_t c = 0; c < cols_; ++c) at(r, c) = row.at(0, c);
}

Matrix Matrix::gather_rows(const std::vector<std::size_t>& idx) const {
    Matrix out(idx.size(), cols_);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] >= rows_) throw ShapeError("gather_rows: index out of range");
        for (std::size_t c = 0; c < cols_; ++c) out.at(i, c) = at(idx[i], c);
    }
    return out;
}

double l2_norm(const Matrix& m) {
    double acc = 0.0;
    for (double v : m.data()) acc += v * v;
    return std::sqrt(acc);
}

Matrix l2_normalize(const Matrix& v) {
    if (!v.all_finite()) throw InvalidInput("l2_normalize: non-finite input");
    const double n = l2_norm(v);
    if (n < 1e-12) throw ZeroNorm("l2_normalize: norm below 1e-12");
    Matrix out = v;
    out *= 1.0 / n;
    return out;
}

} // namespace srda
