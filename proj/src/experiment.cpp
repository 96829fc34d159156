#include "rogpl/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "rogpl/metrics.hpp"

namespace rogpl {

using nlohmann::json;

ExperimentConfig experiment_config_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  ExperimentConfig cfg;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "seed") {
        cfg.train.seed = value.get<std::uint64_t>();
        cfg.noise.seed = cfg.train.seed;
      } else if (key == "ind_rate") {
        cfg.noise.ind_rate = value.get<double>();
      } else if (key == "ood_mode") {
        cfg.noise.ood_mode = parse_ood_mode(value.get<std::string>());
      } else if (key == "ood_rate") {
        cfg.noise.ood_rate = value.get<double>();
      } else if (key == "far_source") {
        cfg.noise.far_source = value.get<std::string>();
      } else if (!set_train_field(cfg.train, key, value)) {
        throw std::invalid_argument("unknown config key: " + key);
      }
    } catch (const json::exception& e) {
      throw std::invalid_argument("config key " + key + ": " + e.what());
    }
  }
  cfg.train.validate();
  cfg.noise.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  return experiment_config_from_json(j);
}

json to_json(const ExperimentConfig& cfg) {
  json j = to_json(cfg.train);
  j["ind_rate"] = cfg.noise.ind_rate;
  j["ood_mode"] = to_string(cfg.noise.ood_mode);
  j["ood_rate"] = cfg.noise.ood_rate;
  j["far_source"] = cfg.noise.far_source;
  return j;
}

OpenSetMetrics evaluate(const NoisyDataset& ds, const OpenSetPrediction& pred) {
  const auto n = ds.test_ids.size();
  if (pred.labels.size() != n || pred.confidence.size() != n) {
    throw DimensionError("prediction does not cover the test set");
  }
  std::vector<int> truth(n);
  std::vector<double> unknown_score(n);
  std::vector<bool> is_unknown(n);
  int n_known = 0, n_unknown = 0, known_hits = 0, unknown_hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    truth[i] = ds.truth[ds.test_ids[i]];
    unknown_score[i] = 1.0 - pred.confidence[i];
    is_unknown[i] = truth[i] == kUnknown;
    const bool hit = pred.labels[i] == truth[i];
    if (is_unknown[i]) {
      ++n_unknown;
      unknown_hits += hit;
    } else {
      ++n_known;
      known_hits += hit;
    }
  }
  OpenSetMetrics m;
  m.macro_f1 = macro_f1(pred.labels, truth, true);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  m.auroc = (n_known > 0 && n_unknown > 0) ? auroc(unknown_score, is_unknown) : nan;
  m.known_acc = n_known > 0 ? static_cast<double>(known_hits) / n_known : nan;
  m.unknown_acc = n_unknown > 0 ? static_cast<double>(unknown_hits) / n_unknown : nan;
  m.overall_acc = static_cast<double>(known_hits + unknown_hits) / static_cast<double>(n);
  return m;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "dataset", "ood_mode",  "ind_rate",    "ood_rate",    "variant",       "seed",        "macro_f1",
      "auroc",   "known_acc", "unknown_acc", "overall_acc", "n_clean_final", "wall_seconds"};
  return cols;
}

void write_csv_header(std::ostream& out) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n' << std::flush;
}

namespace {

std::string fmt(double v, int digits = 6) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

double median_of(std::vector<double> v) {
  v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return std::isnan(x); }), v.end());
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

void write_csv_row(std::ostream& out, const MetricsRow& r) {
  out << r.dataset << ',' << r.ood_mode << ',' << fmt(r.ind_rate, 4) << ',' << fmt(r.ood_rate, 4)
      << ',' << r.variant << ',' << r.seed << ',' << fmt(r.metrics.macro_f1) << ','
      << fmt(r.metrics.auroc) << ',' << fmt(r.metrics.known_acc) << ','
      << fmt(r.metrics.unknown_acc) << ',' << fmt(r.metrics.overall_acc) << ',' << r.n_clean_final
      << ',' << fmt(r.wall_seconds, 3) << '\n'
      << std::flush;
}

MetricsRow median_row(const std::vector<MetricsRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("median_row: no rows");
  MetricsRow out = rows.front();
  out.seed = "median";
  auto col = [&](auto get) {
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(get(r));
    return median_of(std::move(v));
  };
  out.metrics.macro_f1 = col([](const MetricsRow& r) { return r.metrics.macro_f1; });
  out.metrics.auroc = col([](const MetricsRow& r) { return r.metrics.auroc; });
  out.metrics.known_acc = col([](const MetricsRow& r) { return r.metrics.known_acc; });
  out.metrics.unknown_acc = col([](const MetricsRow& r) { return r.metrics.unknown_acc; });
  out.metrics.overall_acc = col([](const MetricsRow& r) { return r.metrics.overall_acc; });
  out.n_clean_final = static_cast<int>(
      std::lround(col([](const MetricsRow& r) { return static_cast<double>(r.n_clean_final); })));
  out.wall_seconds = col([](const MetricsRow& r) { return r.wall_seconds; });
  return out;
}

SeedRun run_single(const ExperimentInputs& in, const ExperimentConfig& cfg,
                   const AblationFlags& variant) {
  if (in.raw == nullptr) throw std::invalid_argument("run_single: no dataset");
  cfg.noise.validate();
  const auto start = std::chrono::steady_clock::now();
  SeedRun run;
  run.data = make_scenario(*in.raw, cfg.noise, in.far_source);
  run.model = train(run.data.graph, run.data.train_ids, run.data.val_ids, cfg.train, variant);
  run.model.metadata = {{"dataset", in.dataset_name}, {"experiment", to_json(cfg)}};
  const auto pred = predict(run.model, run.data.graph, run.data.test_ids);
  const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;

  run.row.dataset = in.dataset_name;
  run.row.ood_mode = to_string(cfg.noise.ood_mode);
  run.row.ind_rate = cfg.noise.ind_rate;
  run.row.ood_rate = cfg.noise.ood_rate;
  run.row.variant = variant.name();
  run.row.seed = std::to_string(cfg.train.seed);
  run.row.metrics = evaluate(run.data, pred);
  run.row.n_clean_final = run.model.diagnostics.n_clean_final;
  run.row.wall_seconds = wall.count();
  return run;
}

std::vector<MetricsRow> run_experiment(const ExperimentInputs& in, const ExperimentConfig& cfg,
                                       const AblationFlags& variant, int n_seeds,
                                       const RowSink& sink) {
  if (n_seeds < 1) throw std::invalid_argument("n_seeds must be >= 1");
  std::vector<MetricsRow> rows;
  for (int s = 0; s < n_seeds; ++s) {
    ExperimentConfig c = cfg;
    c.train.seed = cfg.train.seed + static_cast<std::uint64_t>(s);
    c.noise.seed = c.train.seed;
    rows.push_back(run_single(in, c, variant).row);
    if (sink) sink(rows.back());
  }
  rows.push_back(median_row(rows));
  if (sink) sink(rows.back());
  return rows;
}

SweepAxis parse_sweep_axis(const std::string& s) {
  if (s == "ind") return SweepAxis::kInd;
  if (s == "ood") return SweepAxis::kOod;
  throw std::invalid_argument("sweep axis must be ind or ood, got " + s);
}

std::vector<MetricsRow> run_sweep(const ExperimentInputs& in, const ExperimentConfig& cfg,
                                  const AblationFlags& variant, SweepAxis axis,
                                  const std::vector<double>& values, int n_seeds,
                                  const RowSink& sink) {
  if (axis == SweepAxis::kOod && cfg.noise.ood_mode != OodMode::kFar) {
    throw std::invalid_argument("an ood sweep needs ood_mode = far");
  }
  std::vector<MetricsRow> all;
  for (const double v : values) {
    ExperimentConfig c = cfg;
    (axis == SweepAxis::kInd ? c.noise.ind_rate : c.noise.ood_rate) = v;
    auto rows = run_experiment(in, c, variant, n_seeds, sink);
    all.insert(all.end(), rows.begin(), rows.end());
  }
  return all;
}

}  // namespace rogpl
