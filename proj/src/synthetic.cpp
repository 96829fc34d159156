#include "rogpl/synthetic.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rogpl {
namespace {

// Adds round(mean_degree * n / 2) undirected edges, a `cross` fraction of
// them between nodes of different classes.
std::vector<std::pair<int, int>> planted_edges(const std::vector<int>& labels, int n_classes,
                                               double mean_degree, double cross,
                                               std::mt19937_64& rng) {
  const int n = static_cast<int>(labels.size());
  std::vector<std::vector<int>> by_class(n_classes);
  for (int i = 0; i < n; ++i) by_class[labels[i]].push_back(i);
  const long target = std::lround(mean_degree * n / 2.0);
  std::uniform_int_distribution<int> node(0, n - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::pair<int, int>> edges;
  edges.reserve(target);
  while (static_cast<long>(edges.size()) < target) {
    const int u = node(rng);
    int v;
    if (unit(rng) < cross || n_classes == 1) {
      v = node(rng);
      if (n_classes > 1 && labels[v] == labels[u]) continue;
    } else {
      const auto& same = by_class[labels[u]];
      v = same[std::uniform_int_distribution<std::size_t>(0, same.size() - 1)(rng)];
    }
    if (u != v) edges.emplace_back(u, v);
  }
  return edges;
}

}  // namespace

Graph make_two_blob_graph(const BlobGraphSpec& spec) {
  if (spec.n_nodes < 2 || spec.n_features < 1) throw std::invalid_argument("blob graph too small");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<int> labels(spec.n_nodes);
  Matrix features(spec.n_nodes, spec.n_features);
  for (int i = 0; i < spec.n_nodes; ++i) {
    labels[i] = i < spec.n_nodes / 2 ? 0 : 1;
    const double center = labels[i] == 0 ? -spec.separation / 2.0 : spec.separation / 2.0;
    for (int f = 0; f < spec.n_features; ++f) features(i, f) = noise(rng);
    features(i, 0) += center;
  }
  auto edges = planted_edges(labels, 2, spec.mean_degree, spec.cross_fraction, rng);
  return make_graph(std::move(features), edges, std::move(labels), 2);
}

Graph make_citation_like_graph(const CitationLikeSpec& spec) {
  if (spec.n_classes < 1 || spec.nodes_per_class < 1 || spec.vocabulary < spec.n_classes) {
    throw std::invalid_argument("citation-like graph: invalid shape");
  }
  std::mt19937_64 rng(spec.seed);
  const int n = spec.n_classes * spec.nodes_per_class;
  const int block = spec.vocabulary / spec.n_classes;
  std::vector<int> labels(n);
  Matrix features = Matrix::Zero(n, spec.vocabulary);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> any_word(0, spec.vocabulary - 1);
  std::uniform_int_distribution<int> topic_word(0, block - 1);
  for (int i = 0; i < n; ++i) {
    const int c = i % spec.n_classes;
    labels[i] = c;
    for (int w = 0; w < spec.words_per_node; ++w) {
      const int word = unit(rng) < spec.topic_fraction ? c * block + topic_word(rng) : any_word(rng);
      features(i, word) = 1.0;
    }
  }
  auto edges = planted_edges(labels, spec.n_classes, spec.mean_degree, 1.0 - spec.homophily, rng);
  return make_graph(std::move(features), edges, std::move(labels), spec.n_classes);
}

}  // namespace rogpl
