#pragma once

#include "jrank/ad/graph.hpp"

#include <cstddef>
#include <vector>

/// Differentiable operations. Every op checks operand shapes and throws
/// ShapeError naming the op and the offending shapes. Broadcasting exists only
/// between a (1x1) operand and an array.
namespace jrank::ad {

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);

Var matmul(Var a, Var b);
/// x (n x k) * w (k x m) + bias (1 x m) added to every row.
Var linear(Var x, Var w, Var bias);
Var transpose(Var a);

Var concat_cols(const std::vector<Var>& parts);
Var concat_rows(const std::vector<Var>& parts);
/// Stacks `times` copies of a single-row array.
Var repeat_rows(Var row, std::size_t times);

Var relu(Var a);
Var tanh(Var a);
Var sigmoid(Var a);
/// axis 0: normalize each column over rows; axis 1: each row over columns.
Var softmax(Var a, int axis);

/// 1-D convolution along rows with window 3 and one row of zero padding on
/// each side. x is (n x d_in), w is (3*d_in x d_out) with the window offsets
/// -1, 0, +1 stacked in that order, bias is (1 x d_out). Output (n x d_out).
Var conv1d_window3(Var x, Var w, Var bias);

/// Pairwise cosine similarity of the rows of a (n x d) and b (m x d), giving
/// (n x m). Rows of norm below 1e-12 have similarity 0 with everything.
Var cosine_matrix(Var a, Var b);

/// Row-wise reductions, each producing (n x 1).
Var row_max(Var a);
Var row_mean(Var a);
/// Mean of the k largest entries of each row; ties go to the lower column.
Var row_topk_mean(Var a, std::size_t k);

Var dot(Var a, Var b);
Var sum(Var a);

/// max(0, margin - x) for a (1x1) x.
Var hinge(Var x, double margin);

/// Sum over entries of the binary cross-entropy of sigmoid(logits) against
/// `labels` in {0, 1}. Probabilities are clamped to [eps, 1 - eps]; the
/// gradient is zero where the clamp is active.
Var bce_with_logits(Var logits, const Array& labels, double eps = 1e-7);

} // namespace jrank::ad
