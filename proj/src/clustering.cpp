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
#include "vgcl/clustering.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

namespace vgcl {

namespace {

// Squared distances point-to-centroid via |x|^2 + |c|^2 - 2 x.c.
Matrix squared_distances(const Matrix& points, const Matrix& centroids) {
  const Vector pn = points.rowwise().squaredNorm();
  const Vector cn = centroids.rowwise().squaredNorm();
  Matrix d = -2.0 * (points * centroids.transpose());
  d.colwise() += pn;
  d.rowwise() += cn.transpose();
  return d.cwiseMax(0.0);
}

void assign_nearest(const Matrix& dist2, std::vector<int>& labels) {
  labels.resize(dist2.rows());
  for (Index i = 0; i < dist2.rows(); ++i) {
    int best = 0;
    double best_d = dist2(i, 0);
    for (Index k = 1; k < dist2.cols(); ++k) {
      if (dist2(i, k) < best_d) {  // strict: ties keep the lowest index
        best_d = dist2(i, k);
        best = static_cast<int>(k);
      }
    }
    labels[i] = best;
  }
}

Matrix kmeanspp_seed(const Matrix& points, int k, RngStream& rng) {
  const Index n = points.rows();
  Matrix centroids(k, points.cols());
  centroids.row(0) = points.row(static_cast<Index>(rng.next(n)));

  Vector best_d2 = (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = best_d2.sum();
    Index chosen;
    if (total <= 0.0) {
      chosen = static_cast<Index>(rng.next(n));
    } else {
      double target = rng.uniform() * total;
      chosen = n - 1;
      for (Index i = 0; i < n; ++i) {
        target -= best_d2(i);
        if (target <= 0.0) {
          chosen = i;
          break;
        }
      }
    }
    centroids.row(c) = points.row(chosen);
    best_d2 = best_d2.cwiseMin(
        (points.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }
  return centroids;
}

}  // namespace

KMeansResult kmeans_fit(const Matrix& points, int k, RngStream& rng, int max_iters,
                        double tol) {
  const Index n = points.rows();
  if (k < 1 || static_cast<Index>(k) > n) {
    throw ConfigError("kmeans_fit: need 1 <= k <= point count, got k=" +
                      std::to_string(k) + " for " + std::to_string(n) + " points");
  }
  if (!points.allFinite()) throw FiniteError("kmeans_fit: non-finite points");

  KMeansResult result;
  result.centroids = kmeanspp_seed(points, k, rng);

  for (int iter = 0; iter < max_iters; ++iter) {
    Matrix dist2 = squared_distances(points, result.centroids);
    assign_nearest(dist2, result.labels);

    double objective = 0.0;
    for (Index i = 0; i < n; ++i) objective += dist2(i, result.labels[i]);
    result.objective_history.push_back(objective);
    result.iterations = iter + 1;

    Matrix sums = Matrix::Zero(k, points.cols());
    std::vector<Index> counts(k, 0);
    for (Index i = 0; i < n; ++i) {
      sums.row(result.labels[i]) += points.row(i);
      ++counts[result.labels[i]];
    }

    Matrix updated(k, points.cols());
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        updated.row(c) = sums.row(c) / static_cast<double>(counts[c]);
      } else {
        // Re-seed from the worst-served point; it adopts the cluster.
        Index farthest = 0;
        double worst = -1.0;
        for (Index i = 0; i < n; ++i) {
          const double d = dist2(i, result.labels[i]);
          if (d > worst) {
            worst = d;
            farthest = i;
          }
        }
        updated.row(c) = points.row(farthest);
        dist2(farthest, result.labels[farthest]) = 0.0;
      }
    }

    const double shift = (updated - result.centroids).rowwise().norm().maxCoeff();
    result.centroids = std::move(updated);
    if (shift < tol) break;
  }

  // Labels for the final centroid positions.
  Matrix dist2 = squared_distances(points, result.centroids);
  assign_nearest(dist2, result.labels);
  return result;
}

Matrix assign_probs(const Matrix& points, const Matrix& centroids, AssignMode mode,
                    double temperature) {
  if (points.cols() != centroids.cols()) {
    throw ShapeError("assign_probs: dimension mismatch");
  }
  const Matrix dist2 = squared_distances(points, centroids);
  Matrix probs = Matrix::Zero(points.rows(), centroids.rows());

  if (mode == AssignMode::kHard) {
    std::vector<int> labels;
    assign_nearest(dist2, labels);
    for (Index i = 0; i < points.rows(); ++i) probs(i, labels[i]) = 1.0;
    return probs;
  }

  if (!(temperature > 0.0)) throw ConfigError("assign_probs: temperature must be > 0");
  for (Index i = 0; i < points.rows(); ++i) {
    RowVector logits = -dist2.row(i) / temperature;
    const double m = logits.maxCoeff();
    RowVector w = (logits.array() - m).exp();
    probs.row(i) = w / w.sum();
  }
  return probs;
}

Matrix same_cluster_prob(const Matrix& probs, std::span<const int> idx_a,
                         std::span<const int> idx_b) {
  Matrix pa(idx_a.size(), probs.cols());
  Matrix pb(idx_b.size(), probs.cols());
  for (std::size_t r = 0; r < idx_a.size(); ++r) pa.row(r) = probs.row(idx_a[r]);
  for (std::size_t r = 0; r < idx_b.size(); ++r) pb.row(r) = probs.row(idx_b[r]);
  return pa * pb.transpose();
}

ClusterModel fit_cluster_model(const Matrix& user_points, const Matrix& item_points,
                               int k_users, int k_items, AssignMode mode,
                               double temperature, RngStream& rng, int max_iters,
                               double tol) {
  ClusterModel model;
  model.mode = mode;
  model.temperature = temperature;
  KMeansResult users = kmeans_fit(user_points, k_users, rng, max_iters, tol);
  KMeansResult items = kmeans_fit(item_points, k_items, rng, max_iters, tol);
  model.centroids_users = std::move(users.centroids);
  model.centroids_items = std::move(items.centroids);
  model.assign_users = assign_probs(user_points, model.centroids_users, mode, temperature);
  model.assign_items = assign_probs(item_points, model.centroids_items, mode, temperature);
  return model;
}

void write_cluster_summary(const std::string& path, const Matrix& centroids,
                           const std::vector<int>& labels) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write cluster summary: " + path);
  std::vector<int> histogram(centroids.rows(), 0);
  for (int l : labels) ++histogram[l];
  out << "clusters=" << centroids.rows() << " points=" << labels.size() << "\n";
  for (Index c = 0; c < centroids.rows(); ++c) {
    out << "cluster=" << c << " size=" << histogram[c] << " centroid=";
    for (Index j = 0; j < centroids.cols(); ++j) {
      out << (j ? "," : "") << centroids(c, j);
    }
    out << "\n";
  }
}

}  // namespace vgcl
