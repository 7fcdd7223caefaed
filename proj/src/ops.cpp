#include "srda/ops.hpp"

#include <algorithm>
#include <cmath>

namespace srda {

Matrix softmax(const Matrix& logits) {
    if (!logits.all_finite()) throw InvalidInput("softmax: non-finite logits");
    if (logits.cols() == 0) throw ShapeError("softmax: empty rows");
    Matrix out(logits.rows(), logits.cols());
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        const double* z = logits.row_ptr(r);
        double* q = out.row_ptr(r);
        double zmax = z[0];
        for (std::size_t c = 1; c < logits.cols(); ++c) zmax = std::max(zmax, z[c]);
        double sum = 0.0;
        for (std::size_t c = 0; c < logits.cols(); ++c) {
            q[c] = std::exp(z[c] - zmax);
            sum += q[c];
        }
        for (std::size_t c = 0; c < logits.cols(); ++c) q[c] /= sum;
    }
    return out;
}

double cross_entropy(const Matrix& q, const Matrix& p) {
    if (!q.same_shape(p)) throw ShapeError("cross_entropy: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double pk = p.data()[i];
        if (pk == 0.0) continue; // 0 * log q := 0
        acc -= pk * std::log(std::max(q.data()[i], kProbFloor));
    }
    return acc;
}

double entropy(const Matrix& p) {
    return cross_entropy(p, p);
}

std::size_t argmax_row(const Matrix& m, std::size_t r) {
    if (r >= m.rows() || m.cols() == 0) throw ShapeError("argmax_row: out of range");
    const double* v = m.row_ptr(r);
    std::size_t best = 0;
    for (std::size_t c = 1; c < m.cols(); ++c) {
        if (v[c] > v[best]) best = c;
    }
    return best;
}

Matrix one_hot(std::size_t k, std::size_t hot) {
    if (hot >= k) throw InvalidInput("one_hot: index out of range");
    Matrix m(1, k);
    m.at(0, hot) = 1.0;
    return m;
}

} // namespace srda
