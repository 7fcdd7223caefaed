#ifndef SRDA_MATRIX_HPP
#define SRDA_MATRIX_HPP

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "srda/error.hpp"
#include "srda/rng.hpp"

namespace srda {

/// Dense 2-D row-major double matrix.
///
/// The one value type for samples, features, logits, probabilities and
/// gradients. Desk-scale sizes, so storage is a plain std::vector and the
/// kernels are straightforward loops.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    /// 1 x n row vector.
    static Matrix row_vector(const std::vector<double>& v);
    /// i.i.d. N(0, sd^2) entries.
    static Matrix gaussian(std::size_t rows, std::size_t cols, Rng& rng, double sd = 1.0);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* row_ptr(std::size_t r) { return data_.data() + r * cols_; }
    const double* row_ptr(std::size_t r) const { return data_.data() + r * cols_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
    bool all_finite() const;

    Matrix& operator+=(const Matrix& o);
    Matrix& operator-=(const Matrix& o);
    Matrix& operator*=(double s);

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, double s) { return a *= s; }
    friend Matrix operator*(double s, Matrix a) { return a *= s; }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

    /// this (r x k) times o (k x c).
    Matrix matmul(const Matrix& o) const;
    Matrix transpose() const;

    /// Copy of row r as a 1 x cols matrix.
    Matrix row_copy(std::size_t r) const;
    void set_row(std::size_t r, const Matrix& row);

    /// Rows selected by index, in order (duplicates allowed).
    Matrix gather_rows(const std::vector<std::size_t>& idx) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// L2 norm over all entries (rows x cols treated as one flat vector).
double l2_norm(const Matrix& m);

/// v / ||v||_2; throws ZeroNorm when the norm is below 1e-12.
Matrix l2_normalize(const Matrix& v);

} // namespace srda

#endif
