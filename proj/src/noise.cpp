#include "rogpl/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace rogpl {
namespace {

enum class Stream : std::uint32_t { kOodLabels = 1, kIndFlips = 2, kFarOod = 3 };

std::mt19937_64 stream_rng(std::uint64_t seed, Stream s) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(s)};
  return std::mt19937_64(seq);
}

NoisyDataset build_scenario(const Graph& raw, int n_ood_classes, std::uint64_t seed,
                            const SplitSpec& split) {
  const int total = raw.n_classes;
  const int n_known = total - 1 - n_ood_classes;
  if (n_known < 1) {
    throw std::invalid_argument("scenario needs at least " + std::to_string(2 + n_ood_classes) +
                                " classes, dataset has " + std::to_string(total));
  }
  const int unknown_class = total - 1;
  const int ood_class = n_ood_classes > 0 ? total - 2 : -1;

  NoisyDataset ds;
  ds.graph = raw;
  ds.graph.n_classes = n_known;
  const int n = raw.n_nodes();
  ds.truth.assign(n, kUnlabeled);
  ds.provenance.assign(n, Provenance::kClean);
  for (int c = 0; c < n_known; ++c) ds.known_classes.push_back(c);
  ds.unknown_classes = {unknown_class};
  if (ood_class >= 0) ds.ood_classes = {ood_class};

  std::vector<int> ood_nodes, unknown_nodes;
  for (int i = 0; i < n; ++i) {
    const int y = raw.labels[i];
    if (y == kUnlabeled) continue;
    if (y < n_known) {
      ds.truth[i] = y;
    } else {
      ds.graph.labels[i] = kUnlabeled;
      if (y == unknown_class) {
        ds.truth[i] = kUnknown;
        ds.provenance[i] = Provenance::kUnknownTest;
        unknown_nodes.push_back(i);
      } else {
        ds.truth[i] = kOodTruth;
        ds.provenance[i] = Provenance::kOodNoise;
        ood_nodes.push_back(i);
      }
    }
  }

  SplitSpec s = split;
  s.seed = seed;
  NodeSplit parts = split_nodes(ds.graph, s);
  auto rng = stream_rng(seed, Stream::kOodLabels);
  std::uniform_int_distribution<int> pick(0, n_known - 1);
  for (int i : ood_nodes) ds.graph.labels[i] = pick(rng);

  ds.train_ids = std::move(parts.train);
  ds.train_ids.insert(ds.train_ids.end(), ood_nodes.begin(), ood_nodes.end());
  std::sort(ds.train_ids.begin(), ds.train_ids.end());
  ds.val_ids = std::move(parts.val);
  ds.test_ids = std::move(parts.test);
  ds.test_ids.insert(ds.test_ids.end(), unknown_nodes.begin(), unknown_nodes.end());
  std::sort(ds.test_ids.begin(), ds.test_ids.end());
  return ds;
}

std::vector<int> known_training_nodes(const NoisyDataset& ds) {
  std::vector<int> out;
  for (int i : ds.train_ids) {
    if (ds.provenance[i] == Provenance::kClean || ds.provenance[i] == Provenance::kIndNoise) {
      out.push_back(i);
    }
  }
  return out;
}

// The k targets most cosine-similar to `x` (ties to the lower node id).
std::vector<int> most_similar(const Vector& x, const Matrix& features,
                              const std::vector<int>& targets, int k) {
  const double nx = x.norm();
  std::vector<std::pair<double, int>> sims;
  sims.reserve(targets.size());
  for (int t : targets) {
    const double nt = features.row(t).norm();
    const double cos = nx > 0.0 && nt > 0.0 ? features.row(t).dot(x) / (nx * nt) : 0.0;
    sims.emplace_back(-cos, t);
  }
  const int take = std::min<int>(k, static_cast<int>(sims.size()));
  std::partial_sort(sims.begin(), sims.begin() + take, sims.end());
  std::vector<int> out;
  for (int q = 0; q < take; ++q) out.push_back(sims[q].second);
  return out;
}

}  // namespace

std::string to_string(OodMode mode) {
  switch (mode) {
    case OodMode::kNone: return "none";
    case OodMode::kNear: return "near";
    case OodMode::kFar: return "far";
  }
  return "none";
}

OodMode parse_ood_mode(const std::string& s) {
  if (s == "none") return OodMode::kNone;
  if (s == "near") return OodMode::kNear;
  if (s == "far") return OodMode::kFar;
  throw std::invalid_argument("ood_mode must be none, near or far, got '" + s + "'");
}

void NoiseSpec::validate() const {
  if (!(ind_rate >= 0.0 && ind_rate < 1.0)) throw std::invalid_argument("ind_rate outside [0, 1)");
  if (!(ood_rate >= 0.0 && ood_rate < 1.0)) throw std::invalid_argument("ood_rate outside [0, 1)");
  if (ood_mode == OodMode::kFar && far_source.empty()) {
    throw std::invalid_argument("far_source is required when ood_mode is far");
  }
  if (ood_mode != OodMode::kFar && !far_source.empty()) {
    throw std::invalid_argument("far_source is only valid when ood_mode is far");
  }
}

int NoisyDataset::count(Provenance p) const {
  return static_cast<int>(std::count(provenance.begin(), provenance.end(), p));
}

NoisyDataset hold_out_last_class(const Graph& raw, std::uint64_t seed, const SplitSpec& split) {
  return build_scenario(raw, 0, seed, split);
}

NoisyDataset build_near_ood_scenario(const Graph& raw, std::uint64_t seed, const SplitSpec& split) {
  if (raw.n_classes < 3) {
    throw std::invalid_argument("near-OOD scenario needs at least 3 classes");
  }
  return build_scenario(raw, 1, seed, split);
}

NoisyDataset inject_ind_noise(NoisyDataset ds, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate < 1.0)) throw std::invalid_argument("IND noise rate outside [0, 1)");
  const int c = ds.graph.n_classes;
  if (c < 2) throw std::invalid_argument("IND noise needs at least two known classes");
  std::vector<int> candidates;
  for (int i : ds.train_ids) {
    if (ds.provenance[i] == Provenance::kClean) candidates.push_back(i);
  }
  const int flips = static_cast<int>(std::lround(rate * static_cast<double>(candidates.size())));
  auto rng = stream_rng(seed, Stream::kIndFlips);
  std::shuffle(candidates.begin(), candidates.end(), rng);
  std::uniform_int_distribution<int> other(0, c - 2);
  for (int k = 0; k < flips; ++k) {
    const int i = candidates[k];
    int y = other(rng);
    if (y >= ds.graph.labels[i]) ++y;
    ds.graph.labels[i] = y;
    ds.provenance[i] = Provenance::kIndNoise;
  }
  return ds;
}

Matrix reconcile_features(const Matrix& features, int width) {
  Matrix out = Matrix::Zero(features.rows(), width);
  const int keep = std::min<int>(width, static_cast<int>(features.cols()));
  out.leftCols(keep) = features.leftCols(keep);
  return out;
}

NoisyDataset inject_far_ood(NoisyDataset ds, const Graph& source, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate < 1.0)) throw std::invalid_argument("far-OOD rate outside [0, 1)");
  const std::vector<int> known_train = known_training_nodes(ds);
  std::vector<int> known_test;
  for (int i : ds.test_ids) {
    if (ds.provenance[i] != Provenance::kUnknownTest) known_test.push_back(i);
  }
  const int n_noise = static_cast<int>(std::lround(rate * static_cast<double>(known_train.size())));
  const int n_unknown = static_cast<int>(std::lround(rate * static_cast<double>(known_test.size())));
  if (n_noise == 0 && n_unknown == 0) return ds;

  std::vector<int> noise_pool, unknown_pool;
  for (int i = 0; i < source.n_nodes(); ++i) {
    if (source.labels[i] == 0 || source.labels[i] == 1) noise_pool.push_back(i);
    if (source.labels[i] == 2) unknown_pool.push_back(i);
  }
  if (static_cast<int>(noise_pool.size()) < n_noise) {
    throw std::invalid_argument("far-OOD source exhausted: need " + std::to_string(n_noise) +
                                " nodes of its first two classes, have " +
                                std::to_string(noise_pool.size()));
  }
  if (static_cast<int>(unknown_pool.size()) < n_unknown) {
    throw std::invalid_argument("far-OOD source exhausted: need " + std::to_string(n_unknown) +
                                " nodes of its third class, have " +
                                std::to_string(unknown_pool.size()));
  }
  auto rng = stream_rng(seed, Stream::kFarOod);
  std::shuffle(noise_pool.begin(), noise_pool.end(), rng);
  std::shuffle(unknown_pool.begin(), unknown_pool.end(), rng);
  noise_pool.resize(n_noise);
  unknown_pool.resize(n_unknown);

  const int width = ds.graph.n_features();
  const Matrix src = reconcile_features(source.features, width);
  Graph& g = ds.graph;
  const int n_old = g.n_nodes();
  const int n_new = n_old + n_noise + n_unknown;

  Matrix features(n_new, width);
  features.topRows(n_old) = g.features;
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n_old; ++i) {
    for (int j : g.adjacency.row_cols(i)) {
      if (i < j) edges.emplace_back(i, j);
    }
  }
  std::uniform_int_distribution<int> degree(1, 5);
  std::uniform_int_distribution<int> label(0, g.n_classes - 1);
  const std::vector<int> old_train = ds.train_ids;
  const std::vector<int> old_test = ds.test_ids;

  int next = n_old;
  auto append = [&](int src_node, const std::vector<int>& anchors, int visible_label, int truth,
                    Provenance prov, std::vector<int>& split) {
    const Vector x = src.row(src_node).transpose();
    features.row(next) = x.transpose();
    for (int t : most_similar(x, g.features, anchors, degree(rng))) edges.emplace_back(next, t);
    g.labels.push_back(visible_label);
    ds.truth.push_back(truth);
    ds.provenance.push_back(prov);
    split.push_back(next);
    ++next;
  };
  for (int s : noise_pool) {
    append(s, old_train, label(rng), kOodTruth, Provenance::kOodNoise, ds.train_ids);
  }
  for (int s : unknown_pool) {
    append(s, old_test, kUnlabeled, kUnknown, Provenance::kUnknownTest, ds.test_ids);
  }
  g = make_graph(std::move(features), edges, std::move(g.labels), g.n_classes);
  ds.ood_classes = {0, 1};
  return ds;
}

NoisyDataset make_scenario(const Graph& raw, const NoiseSpec& spec, const Graph* far_source) {
  spec.validate();
  NoisyDataset ds = spec.ood_mode == OodMode::kNear ? build_near_ood_scenario(raw, spec.seed)
                                                     : hold_out_last_class(raw, spec.seed);
  ds = inject_ind_noise(std::move(ds), spec.ind_rate, spec.seed);
  if (spec.ood_mode == OodMode::kFar) {
    if (far_source == nullptr) throw std::invalid_argument("far-OOD scenario needs a source graph");
    ds = inject_far_ood(std::move(ds), *far_source, spec.ood_rate, spec.seed);
  }
  return ds;
}

}  // namespace rogpl
