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
#include "vgcl/linalg.hpp"

#include <cmath>
#include <string>

namespace vgcl {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw FiniteError(std::string(what) + ": non-finite entries");
  }
}

Matrix spmm(const NormalizedAdjacency& adj, const Matrix& x) {
  if (x.rows() != adj.node_count) {
    throw ShapeError("spmm: X has " + std::to_string(x.rows()) + " rows, graph has " +
                     std::to_string(adj.node_count) + " nodes");
  }
  Matrix y = Matrix::Zero(x.rows(), x.cols());
  for (Index i = 0; i < adj.node_count; ++i) {
    auto row = y.row(i);
    for (std::int64_t k = adj.row_ptr[i]; k < adj.row_ptr[i + 1]; ++k) {
      row += adj.value[k] * x.row(adj.col_index[k]);
    }
  }
  return y;
}

RowNormalizeResult row_l2_normalize(const Matrix& x, double eps) {
  if (!(eps > 0.0)) throw ConfigError("row_l2_normalize: eps must be positive");
  RowNormalizeResult result;
  result.rows = x;
  result.degenerate.assign(x.rows(), 0);
  for (Index i = 0; i < x.rows(); ++i) {
    const double norm = x.row(i).norm();
    if (norm < eps) {
      result.degenerate[i] = 1;
    } else {
      result.rows.row(i) /= norm;
    }
  }
  return result;
}

Matrix row_l2_normalize_backward(const Matrix& x, const Matrix& grad_rows, double eps) {
  if (x.rows() != grad_rows.rows() || x.cols() != grad_rows.cols()) {
    throw ShapeError("row_l2_normalize_backward: shape mismatch");
  }
  Matrix out(x.rows(), x.cols());
  for (Index i = 0; i < x.rows(); ++i) {
    const double norm = x.row(i).norm();
    if (norm < eps) {
      out.row(i) = grad_rows.row(i);
      continue;
    }
    // v = x / n;  dx = (dv - v (v . dv)) / n
    const RowVector v = x.row(i) / norm;
    const double vdot = v.dot(grad_rows.row(i));
    out.row(i) = (grad_rows.row(i) - vdot * v) / norm;
  }
  return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + std::to_string(a.cols()) + " inner vs " +
                     std::to_string(b.rows()));
  }
  Matrix c = a * b;
  require_finite(c, "matmul");
  return c;
}

Matrix transpose(const Matrix& a) { return a.transpose(); }

Matrix hadamard(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("hadamard: shape mismatch");
  }
  Matrix c = a.cwiseProduct(b);
  require_finite(c, "hadamard");
  return c;
}

Matrix rowwise_add(const Matrix& x, const RowVector& v) {
  if (x.cols() != v.cols()) throw ShapeError("rowwise_add: width mismatch");
  Matrix y = x;
  y.rowwise() += v;
  require_finite(y, "rowwise_add");
  return y;
}

Matrix scale(const Matrix& a, double s) {
  Matrix c = a * s;
  require_finite(c, "scale");
  return c;
}

}  // namespace vgcl
