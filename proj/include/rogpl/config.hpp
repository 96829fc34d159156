#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

namespace rogpl {

/// Hyper-parameters of the training loop.
struct TrainConfig {
  int epochs = 200;
  int warmup_epochs = 30;
  /// Epochs between denoising / region refreshes after warm-up.
  int refresh_period = 5;
  double lr = 1e-3;
  /// Interior prototype step size.
  double phi = 1e-4;
  /// Weight of the diversity loss.
  double lambda = 1e-2;
  double temperature = 0.1;
  double alpha = 0.99;
  double beta = 3.0;
  int k_nn = 30;
  double eta = 1.0;
  double tau = 0.5;
  /// Number of K-means regions; 0 means 5 * n_classes.
  int k_clusters = 0;
  int hidden_dim = 128;
  int latent_dim = 128;
  std::uint64_t seed = 0;

  double cg_tol = 1e-6;
  int cg_max_iter = 200;
  int kmeans_max_iter = 100;
  /// Build the kNN affinity on unit-normalized latent rows (cosine kNN).
  bool normalize_latent = true;
  /// Scale feature rows to unit L1 mass before training.
  bool row_normalize_features = false;
  /// Pick tau from {0.1, ..., 0.9} on validation confidences after training.
  bool tau_sweep = false;
  /// Validation rejection budget used by the tau sweep.
  double tau_sweep_reject_rate = 0.05;

  int effective_clusters(int n_classes) const {
    return k_clusters > 0 ? k_clusters : 5 * n_classes;
  }

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Ablation switches; all false is the full method.
struct AblationFlags {
  /// Propagate over the original graph instead of the latent kNN graph.
  bool no_gn = false;
  /// Skip label propagation; every training node stays clean.
  bool no_denoise = false;
  /// No regions: no border prototypes, interior rows see all clean nodes.
  bool no_region = false;
  /// Drop the diversity term from the loss.
  bool no_ldiv = false;

  /// "full" or the CLI spelling of the single active switch, e.g. "no-region".
  std::string name() const;
  static AblationFlags parse(const std::string& name);
};

nlohmann::json to_json(const TrainConfig& cfg);

/// Sets one TrainConfig field from its JSON key. Returns false for a key
/// that is not a TrainConfig field; throws on a value of the wrong type.
bool set_train_field(TrainConfig& cfg, const std::string& key, const nlohmann::json& value);

/// Strict parse: every key must be a TrainConfig field.
TrainConfig train_config_from_json(const nlohmann::json& j);

}  // namespace rogpl
