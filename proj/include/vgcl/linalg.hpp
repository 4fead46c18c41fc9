/*
 * Copyright 2026 VGCL Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <vector>

#include "vgcl/core.hpp"
#include "vgcl/dataset.hpp"

namespace vgcl {

// Throws FiniteError when the matrix holds a NaN or infinity.
void require_finite(const Matrix& m, const char* what);

// Y[i] = sum over stored (i, j) of value(i,j) * X[j], accumulated left to
// right within each row. Empty rows yield zero rows.
Matrix spmm(const NormalizedAdjacency& adj, const Matrix& x);

struct RowNormalizeResult {
  Matrix rows;
  std::vector<std::uint8_t> degenerate;  // 1 where the row norm fell below eps
};

// Scales every row to unit Euclidean norm. Rows with norm < eps are returned
// unchanged and flagged.
RowNormalizeResult row_l2_normalize(const Matrix& x, double eps = 1e-12);

// Gradient of row_l2_normalize: given d(normalized rows), returns d(raw rows).
// Flagged (pass-through) rows propagate their gradient unchanged.
Matrix row_l2_normalize_backward(const Matrix& x, const Matrix& grad_rows,
                                 double eps = 1e-12);

// Shape-checked wrappers around the dense kernels. Results are verified finite.
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix rowwise_add(const Matrix& x, const RowVector& v);
Matrix scale(const Matrix& a, double s);

}  // namespace vgcl
