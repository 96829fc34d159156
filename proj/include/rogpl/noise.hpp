#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rogpl/graph.hpp"

namespace rogpl {

/// Ground truth of an OOD-noise node: its class is outside the known set.
inline constexpr int kOodTruth = -3;

enum class OodMode { kNone, kNear, kFar };

std::string to_string(OodMode mode);
OodMode parse_ood_mode(const std::string& s);

struct NoiseSpec {
  double ind_rate = 0.05;
  OodMode ood_mode = OodMode::kNear;
  /// Far-OOD injection rate relative to the known training set.
  double ood_rate = 0.0;
  /// Dataset directory providing far-OOD nodes.
  std::string far_source;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class Provenance : std::uint8_t { kClean, kIndNoise, kOodNoise, kUnknownTest };

/// A graph prepared for one open-set experiment together with the
/// bookkeeping needed to score it.
///
/// `graph.labels` are the labels visible to training: noisy on IND/OOD
/// noise nodes and kUnlabeled on unknown-class nodes. `truth` holds the
/// compact known class id, kUnknown for test unknowns, kOodTruth for OOD
/// noise and kUnlabeled for nodes outside every split.
struct NoisyDataset {
  Graph graph;
  std::vector<int> truth;
  std::vector<Provenance> provenance;
  std::vector<int> train_ids;
  std::vector<int> val_ids;
  std::vector<int> test_ids;
  /// Original class ids: known classes in compact order, held-out unknown
  /// classes, and classes used as OOD noise.
  std::vector<int> known_classes;
  std::vector<int> unknown_classes;
  std::vector<int> ood_classes;

  int count(Provenance p) const;
};

/// Holds out the last class as test-only unknowns; all others are known.
NoisyDataset hold_out_last_class(const Graph& raw, std::uint64_t seed, const SplitSpec& split = {});

/// Last class -> test unknowns; second-last class -> OOD noise in the
/// training set with uniformly random known labels; the rest are known
/// classes relabeled to 0..C-1. Needs at least three classes.
NoisyDataset build_near_ood_scenario(const Graph& raw, std::uint64_t seed,
                                     const SplitSpec& split = {});

/// Flips round(rate * |known training nodes|) labels to a uniformly chosen
/// different known class. Needs rate in [0, 1) and at least two classes.
NoisyDataset inject_ind_noise(NoisyDataset ds, double rate, std::uint64_t seed);

/// Appends round(rate * |known training nodes|) nodes drawn from the first
/// two classes of `source` as OOD noise with random known labels, each
/// attached to k ~ U{1..5} most feature-similar existing training nodes,
/// plus round(rate * |known test nodes|) class-2 source nodes as test
/// unknowns attached the same way to existing test nodes. Source features
/// are zero-padded or truncated to the target width.
NoisyDataset inject_far_ood(NoisyDataset ds, const Graph& source, double rate, std::uint64_t seed);

/// Zero-pads or truncates feature columns to `width`.
Matrix reconcile_features(const Matrix& features, int width);

/// Full scenario for a NoiseSpec: base split, IND flips, then far-OOD
/// injection when requested (`far_source` must then be non-null).
NoisyDataset make_scenario(const Graph& raw, const NoiseSpec& spec, const Graph* far_source);

}  // namespace rogpl
