#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "rogpl/sparse.hpp"
#include "rogpl/types.hpp"

namespace rogpl {

/// Undirected attributed graph with (possibly noisy) class labels.
///
/// The adjacency is symmetric with unit weights and no stored self-loops.
/// `labels[i]` is a class id in [0, n_classes) or kUnlabeled.
struct Graph {
  Matrix features;
  CsrMatrix adjacency;
  std::vector<int> labels;
  int n_classes = 0;

  int n_nodes() const { return static_cast<int>(labels.size()); }
  int n_features() const { return static_cast<int>(features.cols()); }

  /// Throws std::invalid_argument naming the first violated invariant.
  void validate() const;
};

/// Builds a graph from an undirected edge list. Edges are symmetrized by
/// union, duplicates collapse and self-loops are dropped.
Graph make_graph(Matrix features, std::span<const std::pair<int, int>> edges,
                 std::vector<int> labels, int n_classes);

/// Subgraph induced by `ids`; node k of the result is ids[k] of `g`.
Graph induced_subgraph(const Graph& g, std::span<const int> ids);

/// Reads `nodes.tsv`, `edges.tsv` and `meta.json` from `dir`.
Graph load_dataset(const std::filesystem::path& dir);

/// Writes the three dataset files into `dir` (created if missing).
void save_dataset(const Graph& g, const std::filesystem::path& dir);

/// Scales every nonzero feature row to unit L1 mass.
void row_normalize_features(Graph& g);

/// D̃^{-1/2}(A+I)D̃^{-1/2}, the symmetric GCN propagation operator.
struct NormalizedAdjacency {
  CsrMatrix matrix;
};

NormalizedAdjacency normalize_adjacency(const CsrMatrix& adjacency);
inline NormalizedAdjacency normalize_adjacency(const Graph& g) {
  return normalize_adjacency(g.adjacency);
}

struct SplitSpec {
  double train_fraction = 0.70;
  double val_fraction = 0.10;
  double test_fraction = 0.20;
  std::uint64_t seed = 0;
};

struct NodeSplit {
  std::vector<int> train;
  std::vector<int> val;
  std::vector<int> test;
};

/// Per-class stratified partition of the labeled nodes. Every class with at
/// least one labeled node needs three of them so each part is non-empty.
/// Output id lists are sorted ascending.
NodeSplit split_nodes(const Graph& g, const SplitSpec& spec);

}  // namespace rogpl
