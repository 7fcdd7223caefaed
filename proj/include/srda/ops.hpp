#ifndef SRDA_OPS_HPP
#define SRDA_OPS_HPP

#include <cstddef>
#include <vector>

#include "srda/matrix.hpp"

namespace srda {

/// Probabilities below this are clamped before taking logs.
inline constexpr double kProbFloor = 1e-12;

/// Row-wise softmax with max-subtraction, so large logits cannot overflow.
/// Every output row is a probability vector (positive, sums to 1).
Matrix softmax(const Matrix& logits);

/// D(q, p) = -sum_k p_k log q_k over two equal-length probability rows.
/// p is a constant reference distribution; no gradient ever flows into it.
double cross_entropy(const Matrix& q, const Matrix& p);

/// Shannon entropy -sum_k p_k log p_k of one probability row.
double entropy(const Matrix& p);

/// Index of the largest entry in row r; ties break to the lowest index.
std::size_t argmax_row(const Matrix& m, std::size_t r = 0);

/// One-hot 1 x k row.
Matrix one_hot(std::size_t k, std::size_t hot);

} // namespace srda

#endif
