#pragma once

#include <cstdint>

#include "rogpl/graph.hpp"

namespace rogpl {

/// Two Gaussian blobs (unit variance) whose centers lie `separation` apart,
/// one class per blob, with homophilous random edges.
struct BlobGraphSpec {
  int n_nodes = 200;
  int n_features = 8;
  double separation = 12.0;
  double mean_degree = 6.0;
  /// Fraction of edges that join the two blobs.
  double cross_fraction = 0.02;
  std::uint64_t seed = 0;
};

Graph make_two_blob_graph(const BlobGraphSpec& spec);

/// Sparse bag-of-words graph with planted communities, shaped like a small
/// citation network: each class owns a block of topic words, nodes sample
/// most of their words from their class topic, and most edges stay inside
/// a class.
struct CitationLikeSpec {
  int n_classes = 7;
  int nodes_per_class = 150;
  int vocabulary = 500;
  int words_per_node = 20;
  double topic_fraction = 0.6;
  double mean_degree = 4.0;
  double homophily = 0.8;
  std::uint64_t seed = 0;
};

Graph make_citation_like_graph(const CitationLikeSpec& spec);

}  // namespace rogpl
