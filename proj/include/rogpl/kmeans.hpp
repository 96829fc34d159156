#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rogpl/types.hpp"

namespace rogpl {

struct KMeansResult {
  std::vector<int> assignment;
  Matrix centroids;
  /// Within-cluster SSE after each assignment step.
  std::vector<double> sse_history;
  int iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding and Euclidean distance.
/// Assignment ties go to the lowest cluster id; a cluster that empties is
/// re-seeded with the point farthest from its centroid.
KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int max_iter = 100);

/// Latent-space regions over the clean nodes, labeled by hard pseudo-labels.
struct ClusterAssignment {
  int n_clusters = 0;
  int n_classes = 0;
  /// Row index into the clustered matrix -> cluster id.
  std::vector<int> node_cluster;
  /// True when every member of the cluster shares one pseudo-label.
  std::vector<bool> homogeneous;
  /// members[k][c]: rows of cluster k whose pseudo-label is c.
  std::vector<std::vector<std::vector<int>>> members;
  std::vector<double> sse_history;
};

/// Throws std::invalid_argument when there are fewer rows than clusters.
ClusterAssignment cluster_regions(const Matrix& z_clean, std::span<const int> pseudo_labels,
                                  int n_classes, int k_clusters, std::uint64_t seed,
                                  int max_iter = 100);

}  // namespace rogpl
