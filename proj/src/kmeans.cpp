#include "rogpl/kmeans.hpp"

#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace rogpl {
namespace {

double assign_points(const Matrix& points, const Matrix& centroids, std::vector<int>& assignment,
                     std::vector<double>& dist) {
  double sse = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
      const double d = (points.row(i) - centroids.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    assignment[i] = best;
    dist[i] = best_d;
    sse += best_d;
  }
  return sse;
}

Matrix seed_plus_plus(const Matrix& points, int k, std::mt19937_64& rng) {
  const int n = static_cast<int>(points.rows());
  Matrix centroids(k, points.cols());
  std::vector<bool> chosen(n, false);
  std::uniform_int_distribution<int> first(0, n - 1);
  int idx = first(rng);
  centroids.row(0) = points.row(idx);
  chosen[idx] = true;
  std::vector<double> d2(n);
  for (int i = 0; i < n; ++i) d2[i] = (points.row(i) - centroids.row(0)).squaredNorm();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += chosen[i] ? 0.0 : d2[i];
    idx = -1;
    if (total > 0.0) {
      double target = unit(rng) * total;
      for (int i = 0; i < n; ++i) {
        if (chosen[i] || d2[i] <= 0.0) continue;
        idx = i;
        target -= d2[i];
        if (target <= 0.0) break;
      }
    }
    if (idx < 0) {
      // Remaining points coincide with chosen centers; take the first unused.
      for (int i = 0; i < n && idx < 0; ++i) {
        if (!chosen[i]) idx = i;
      }
    }
    chosen[idx] = true;
    centroids.row(c) = points.row(idx);
    for (int i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], (points.row(i) - centroids.row(c)).squaredNorm());
    }
  }
  return centroids;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int max_iter) {
  const int n = static_cast<int>(points.rows());
  if (k < 1) throw std::invalid_argument("kmeans: k must be at least 1");
  if (n < k) {
    throw std::invalid_argument("kmeans: " + std::to_string(n) + " points for " +
                                std::to_string(k) + " clusters");
  }
  std::mt19937_64 rng(seed);
  KMeansResult res;
  res.centroids = seed_plus_plus(points, k, rng);
  res.assignment.assign(n, -1);
  std::vector<int> previous;
  std::vector<double> dist(n);
  std::vector<int> sizes(k);
  for (int it = 0; it < std::max(1, max_iter); ++it) {
    previous = res.assignment;
    res.sse_history.push_back(assign_points(points, res.centroids, res.assignment, dist));
    res.iterations = it + 1;
    if (res.assignment == previous) break;

    std::fill(sizes.begin(), sizes.end(), 0);
    for (int a : res.assignment) ++sizes[a];
    for (int c = 0; c < k; ++c) {
      if (sizes[c] > 0) continue;
      int far = -1;
      for (int i = 0; i < n; ++i) {
        if (sizes[res.assignment[i]] < 2) continue;
        if (far < 0 || dist[i] > dist[far]) far = i;
      }
      if (far < 0) break;
      --sizes[res.assignment[far]];
      res.assignment[far] = c;
      dist[far] = 0.0;
      sizes[c] = 1;
    }
    res.centroids.setZero();
    for (int i = 0; i < n; ++i) res.centroids.row(res.assignment[i]) += points.row(i);
    for (int c = 0; c < k; ++c) {
      if (sizes[c] > 0) res.centroids.row(c) /= sizes[c];
    }
  }
  return res;
}

ClusterAssignment cluster_regions(const Matrix& z_clean, std::span<const int> pseudo_labels,
                                  int n_classes, int k_clusters, std::uint64_t seed,
                                  int max_iter) {
  if (static_cast<Eigen::Index>(pseudo_labels.size()) != z_clean.rows()) {
    throw DimensionError("cluster_regions: label count differs from latent rows");
  }
  if (z_clean.rows() < k_clusters) {
    throw std::invalid_argument("cluster_regions: fewer clean nodes (" +
                                std::to_string(z_clean.rows()) + ") than clusters (" +
                                std::to_string(k_clusters) + ")");
  }
  const KMeansResult km = kmeans(z_clean, k_clusters, seed, max_iter);
  ClusterAssignment ca;
  ca.n_clusters = k_clusters;
  ca.n_classes = n_classes;
  ca.node_cluster = km.assignment;
  ca.sse_history = km.sse_history;
  ca.members.assign(k_clusters, std::vector<std::vector<int>>(n_classes));
  for (std::size_t i = 0; i < pseudo_labels.size(); ++i) {
    const int y = pseudo_labels[i];
    if (y < 0 || y >= n_classes) throw std::invalid_argument("cluster_regions: bad pseudo-label");
    ca.members[km.assignment[i]][y].push_back(static_cast<int>(i));
  }
  ca.homogeneous.assign(k_clusters, false);
  for (int k = 0; k < k_clusters; ++k) {
    int nonempty = 0;
    for (const auto& part : ca.members[k]) nonempty += part.empty() ? 0 : 1;
    ca.homogeneous[k] = nonempty == 1;
  }
  return ca;
}

}  // namespace rogpl
