#pragma once

#include <functional>
#include <span>
#include <vector>

#include "rogpl/config.hpp"
#include "rogpl/gcn.hpp"
#include "rogpl/graph.hpp"
#include "rogpl/prototypes.hpp"

namespace rogpl {

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;
  double l_cls = 0.0;
  double l_div = 0.0;
  int n_clean = 0;
  double val_macro_f1 = 0.0;
};

/// Emitted at every denoising refresh.
struct RefreshRecord {
  int epoch = 0;
  int n_clean = 0;
  int n_removed = 0;
  double mean_max_confidence = 0.0;
  int cg_iterations = 0;
};

struct TrainDiagnostics {
  std::vector<EpochRecord> epochs;
  std::vector<RefreshRecord> refreshes;
  /// Graph node ids kept by the last clean selection.
  std::vector<int> final_clean;
  /// Pseudo-labels of `final_clean`, aligned with it.
  std::vector<int> final_pseudo_labels;
  int best_epoch = -1;
  int n_clean_final = 0;
};

struct Model {
  GcnParams encoder;
  PrototypePool pool;
  TrainConfig config;
  AblationFlags variant;
  int n_classes = 0;
  /// Rejection threshold used by predict (cfg.tau unless swept).
  double tau = 0.5;
  TrainDiagnostics diagnostics;
  /// Free-form provenance stored with the model (dataset, noise spec).
  nlohmann::json metadata = nlohmann::json::object();
};

/// Called after every epoch; used for the JSON-lines training log.
using EpochObserver = std::function<void(const EpochRecord&)>;

/// Alternates denoising and prototype learning on the subgraph induced by
/// train_ids and val_ids. Labels of val_ids are used only for model
/// selection. Throws TrainingError when the clean set drops below the class
/// count or the loss diverges.
Model train(const Graph& g, std::span<const int> train_ids, std::span<const int> val_ids,
            const TrainConfig& cfg, const AblationFlags& variant = {},
            const EpochObserver& observer = {});

struct OpenSetPrediction {
  /// Class id in [0, C) or kUnknown.
  std::vector<int> labels;
  /// max_c softmax(scores / T)_c.
  std::vector<double> confidence;
  Matrix scores;
};

/// Encodes the whole graph and classifies the nodes in `ids`; nodes with
/// confidence below `tau` are rejected as kUnknown.
OpenSetPrediction predict(const Model& m, const Graph& g, std::span<const int> ids);
OpenSetPrediction predict(const Model& m, const Graph& g, std::span<const int> ids, double tau);

/// Versioned binary persistence (`model.rogpl`).
void save_model(const Model& m, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace rogpl
