#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "rogpl/config.hpp"
#include "rogpl/noise.hpp"
#include "rogpl/pipeline.hpp"

namespace rogpl {

/// Contents of a `--config` file: TrainConfig and NoiseSpec fields side by
/// side, with one shared `seed`.
struct ExperimentConfig {
  TrainConfig train;
  NoiseSpec noise;
};

/// Strict: unknown keys throw std::invalid_argument.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

struct OpenSetMetrics {
  double macro_f1 = 0.0;
  /// NaN when the test set has no unknowns (or only unknowns).
  double auroc = 0.0;
  double known_acc = 0.0;
  double unknown_acc = 0.0;
  double overall_acc = 0.0;
};

/// Scores a prediction made on `ds.test_ids` (in that order).
OpenSetMetrics evaluate(const NoisyDataset& ds, const OpenSetPrediction& pred);

struct MetricsRow {
  std::string dataset;
  std::string ood_mode;
  double ind_rate = 0.0;
  double ood_rate = 0.0;
  std::string variant;
  /// Seed as text so the aggregate row can say "median".
  std::string seed;
  OpenSetMetrics metrics;
  int n_clean_final = 0;
  double wall_seconds = 0.0;
};

const std::vector<std::string>& csv_columns();
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const MetricsRow& row);

/// Element-wise median of every numeric column; NaN entries are ignored.
MetricsRow median_row(const std::vector<MetricsRow>& rows);

/// Receives each row as soon as it exists.
using RowSink = std::function<void(const MetricsRow&)>;

struct ExperimentInputs {
  std::string dataset_name;
  const Graph* raw = nullptr;
  /// Required when the noise mode is far.
  const Graph* far_source = nullptr;
};

/// Trains one model on the scenario built from `cfg.noise`.
struct SeedRun {
  NoisyDataset data;
  Model model;
  MetricsRow row;
};
SeedRun run_single(const ExperimentInputs& in, const ExperimentConfig& cfg,
                   const AblationFlags& variant);

/// For s in [0, n_seeds): seed = cfg seed + s. Returns the per-seed rows
/// followed by the median row.
std::vector<MetricsRow> run_experiment(const ExperimentInputs& in, const ExperimentConfig& cfg,
                                       const AblationFlags& variant, int n_seeds,
                                       const RowSink& sink = {});

enum class SweepAxis { kInd, kOod };
SweepAxis parse_sweep_axis(const std::string& s);

/// One run_experiment per value of the chosen rate.
std::vector<MetricsRow> run_sweep(const ExperimentInputs& in, const ExperimentConfig& cfg,
                                  const AblationFlags& variant, SweepAxis axis,
                                  const std::vector<double>& values, int n_seeds,
                                  const RowSink& sink = {});

}  // namespace rogpl
