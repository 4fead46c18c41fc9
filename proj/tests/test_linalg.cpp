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
#include <doctest.h>

#include "oracles.hpp"
#include "vgcl/linalg.hpp"
#include "vgcl/rng.hpp"

using namespace vgcl;

namespace {

InteractionTable random_table(int users, int items, double density, std::uint64_t seed) {
  InteractionTable t;
  t.user_count = users;
  t.item_count = items;
  RngStream rng(seed);
  for (int u = 0; u < users; ++u) {
    for (int i = 0; i < items; ++i) {
      if (rng.uniform() < density) t.pairs.emplace_back(u, i);
    }
  }
  if (t.pairs.empty()) t.pairs.emplace_back(0, 0);
  return t;
}

Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  Matrix m(rows, cols);
  RngStream rng(seed);
  rng.fill_normal(m);
  return m;
}

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("spmm swaps rows across a single unit edge") {
  const InteractionTable t{{ {0, 0} }, 1, 1};
  const NormalizedAdjacency adj = build_graph(t);
  Matrix x(2, 3);
  x << 1, 2, 3, 4, 5, 6;
  const Matrix y = spmm(adj, x);
  CHECK(y.row(0) == x.row(1));
  CHECK(y.row(1) == x.row(0));
}

TEST_CASE("spmm row sums match hand-computed path-graph values") {
  // user0 - item0, user0 - item1: a 3-node path through the user
  const InteractionTable t{{ {0, 0}, {0, 1} }, 1, 2};
  const NormalizedAdjacency adj = build_graph(t);
  const Matrix ones = Matrix::Ones(3, 1);
  const Matrix y = spmm(adj, ones);
  CHECK(y(0, 0) == doctest::Approx(2.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(y(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(y(2, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("spmm of zero input is zero") {
  const NormalizedAdjacency adj = build_graph(random_table(5, 6, 0.4, 1));
  const Matrix zero = Matrix::Zero(11, 4);
  CHECK(spmm(adj, zero).isZero(0.0));
}

TEST_CASE("spmm rejects mismatched rows") {
  const NormalizedAdjacency adj = build_graph(random_table(4, 4, 0.5, 2));
  CHECK_THROWS_AS(spmm(adj, Matrix::Zero(3, 2)), ShapeError);
}

TEST_CASE("spmm agrees with the dense oracle on random small graphs") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const InteractionTable t = random_table(6 + seed % 10, 7 + seed % 9, 0.35, 100 + seed);
    const NormalizedAdjacency adj = build_graph(t);
    const Matrix dense = oracle::dense_normalized_adjacency(t);
    const Matrix x = random_matrix(adj.node_count, 5, 200 + seed);
    const Matrix sparse_result = spmm(adj, x);
    const Matrix dense_result = dense * x;
    CHECK((sparse_result - dense_result).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("spmm is self-adjoint on the symmetric adjacency") {
  const InteractionTable t = random_table(10, 12, 0.3, 9);
  const NormalizedAdjacency adj = build_graph(t);
  const Matrix x = random_matrix(adj.node_count, 4, 10);
  const Matrix xp = random_matrix(adj.node_count, 4, 11);
  const double lhs = (spmm(adj, x).cwiseProduct(xp)).sum();
  const double rhs = (x.cwiseProduct(spmm(adj, xp))).sum();
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("spmm is bitwise deterministic") {
  const InteractionTable t = random_table(9, 9, 0.4, 21);
  const NormalizedAdjacency adj = build_graph(t);
  const Matrix x = random_matrix(adj.node_count, 6, 22);
  const Matrix a = spmm(adj, x);
  const Matrix b = spmm(adj, x);
  CHECK((a.array() == b.array()).all());
}

TEST_CASE("row normalization scales (3,4) to (0.6,0.8) and flags zero rows") {
  Matrix x(3, 2);
  x << 3, 4, 0.6, 0.8, 0, 0;
  const RowNormalizeResult r = row_l2_normalize(x, 1e-12);
  CHECK(r.rows(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(r.rows(0, 1) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(r.rows.row(1) == x.row(1));  // already unit
  CHECK(r.rows.row(2) == x.row(2));  // untouched
  CHECK(r.degenerate[0] == 0);
  CHECK(r.degenerate[2] == 1);
}

TEST_CASE("row normalization backward matches finite differences") {
  const Matrix x = random_matrix(4, 3, 33);
  const Matrix upstream = random_matrix(4, 3, 34);
  const Matrix analytic = row_l2_normalize_backward(x, upstream);

  const double h = 1e-6;
  for (Index r = 0; r < x.rows(); ++r) {
    for (Index c = 0; c < x.cols(); ++c) {
      Matrix xp = x, xm = x;
      xp(r, c) += h;
      xm(r, c) -= h;
      const double up = (row_l2_normalize(xp).rows.cwiseProduct(upstream)).sum();
      const double down = (row_l2_normalize(xm).rows.cwiseProduct(upstream)).sum();
      const double fd = (up - down) / (2 * h);
      CHECK(analytic(r, c) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("checked kernels honor their contracts") {
  const Matrix x = random_matrix(3, 4, 40);
  const Matrix identity = Matrix::Identity(3, 3);
  CHECK((matmul(identity, x) - x).cwiseAbs().maxCoeff() == 0.0);

  const Matrix a = random_matrix(3, 4, 41);
  const Matrix b = random_matrix(4, 2, 42);
  const Matrix lhs = transpose(matmul(a, b));
  const Matrix rhs = matmul(transpose(b), transpose(a));
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);

  CHECK((hadamard(x, Matrix::Ones(3, 4)) - x).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(matmul(a, a), ShapeError);
  CHECK_THROWS_AS(hadamard(a, b), ShapeError);
  CHECK_THROWS_AS(rowwise_add(a, RowVector::Zero(3)), ShapeError);

  RowVector v(4);
  v << 1, 2, 3, 4;
  const Matrix shifted = rowwise_add(x, v);
  CHECK(shifted(2, 3) == doctest::Approx(x(2, 3) + 4.0));
}

TEST_CASE("non-finite products raise FiniteError") {
  Matrix inf_mat = Matrix::Constant(2, 2, 1e308);
  CHECK_THROWS_AS(matmul(inf_mat, inf_mat), FiniteError);
}

}  // TEST_SUITE
