// rogpl: command line front end for dataset preparation, training,
// evaluation and noise sweeps.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "rogpl/experiment.hpp"
#include "rogpl/prepare.hpp"
#include "rogpl/synthetic.hpp"

namespace fs = std::filesystem;
using namespace rogpl;

namespace {

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> out;
  std::stringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad value in --values: " + item);
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("--values is empty");
  return out;
}

std::string dataset_name(const fs::path& dir) {
  const fs::path clean = dir.lexically_normal();
  return clean.has_filename() ? clean.filename().string() : clean.parent_path().filename().string();
}

struct LoadedInputs {
  Graph raw;
  std::optional<Graph> far;
  ExperimentInputs view() const {
    return {"", &raw, far ? &*far : nullptr};
  }
};

LoadedInputs load_inputs(const fs::path& data, const NoiseSpec& noise) {
  LoadedInputs in{load_dataset(data), std::nullopt};
  if (noise.ood_mode == OodMode::kFar) in.far = load_dataset(noise.far_source);
  return in;
}

void write_diagnostics(const TrainDiagnostics& d, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "epoch\tn_clean\tn_removed\tmean_max_confidence\tcg_iterations\n";
  for (const auto& r : d.refreshes) {
    out << r.epoch << '\t' << r.n_clean << '\t' << r.n_removed << '\t' << r.mean_max_confidence
        << '\t' << r.cg_iterations << '\n';
  }
}

void write_prototypes(const PrototypePool& pool, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  auto row = [&](int c, const char* kind, int cluster, const auto& vec) {
    out << c << '\t' << kind << '\t' << cluster;
    for (Eigen::Index j = 0; j < vec.size(); ++j) out << '\t' << vec(j);
    out << '\n';
  };
  for (int c = 0; c < pool.n_classes(); ++c) {
    row(c, "interior", -1, pool.interior.row(c));
    for (const auto& b : pool.border[c]) row(c, "border", b.cluster_id, b.vec);
  }
}

int cmd_prepare(const fs::path& in, const fs::path& out) {
  const Graph g = convert_raw_dataset(in);
  save_dataset(g, out);
  std::cout << "wrote " << g.n_nodes() << " nodes, " << g.adjacency.nnz() / 2 << " edges, "
            << g.n_classes << " classes, " << g.n_features() << " features to " << out << '\n';
  return 0;
}

int cmd_train(const fs::path& data, const fs::path& config, const std::string& ablate,
              std::optional<std::uint64_t> seed, const fs::path& out, const fs::path& log,
              const fs::path& diagnostics, const fs::path& dump) {
  ExperimentConfig cfg = config.empty() ? ExperimentConfig{} : load_experiment_config(config);
  if (seed) cfg.train.seed = cfg.noise.seed = *seed;
  const AblationFlags variant = AblationFlags::parse(ablate);
  const LoadedInputs inputs = load_inputs(data, cfg.noise);

  std::ofstream log_out;
  if (!log.empty()) {
    log_out.open(log);
    if (!log_out) throw std::runtime_error("cannot write " + log.string());
  }
  const NoisyDataset ds = make_scenario(inputs.raw, cfg.noise, inputs.far ? &*inputs.far : nullptr);
  Model m = train(ds.graph, ds.train_ids, ds.val_ids, cfg.train, variant,
                  [&](const EpochRecord& r) {
                    if (!log_out.is_open()) return;
                    nlohmann::json j = {{"epoch", r.epoch},     {"loss", r.loss},
                                        {"l_cls", r.l_cls},     {"l_div", r.l_div},
                                        {"n_clean", r.n_clean}, {"val_macro_f1", r.val_macro_f1}};
                    log_out << j.dump() << '\n';
                  });
  m.metadata = {{"dataset", dataset_name(data)}, {"experiment", to_json(cfg)}};
  save_model(m, out);
  if (!diagnostics.empty()) write_diagnostics(m.diagnostics, diagnostics);
  if (!dump.empty()) write_prototypes(m.pool, dump);
  std::cout << "trained " << variant.name() << " on " << ds.train_ids.size() << " nodes ("
            << m.diagnostics.n_clean_final << " clean at the end), best epoch "
            << m.diagnostics.best_epoch << ", saved " << out << '\n';
  return 0;
}

int cmd_eval(const fs::path& model_path, const fs::path& data, const fs::path& out) {
  const auto start = std::chrono::steady_clock::now();
  const Model m = load_model(model_path);
  if (!m.metadata.contains("experiment")) {
    throw std::invalid_argument("model carries no experiment settings; cannot rebuild its test split");
  }
  const ExperimentConfig cfg = experiment_config_from_json(m.metadata.at("experiment"));
  const LoadedInputs inputs = load_inputs(data, cfg.noise);
  const NoisyDataset ds = make_scenario(inputs.raw, cfg.noise, inputs.far ? &*inputs.far : nullptr);
  const auto pred = predict(m, ds.graph, ds.test_ids);

  MetricsRow row;
  row.dataset = dataset_name(data);
  row.ood_mode = to_string(cfg.noise.ood_mode);
  row.ind_rate = cfg.noise.ind_rate;
  row.ood_rate = cfg.noise.ood_rate;
  row.variant = m.variant.name();
  row.seed = std::to_string(cfg.train.seed);
  row.metrics = evaluate(ds, pred);
  row.n_clean_final = m.diagnostics.n_clean_final;
  row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::ofstream csv(out);
  if (!csv) throw std::runtime_error("cannot write " + out.string());
  write_csv_header(csv);
  write_csv_row(csv, row);
  write_csv_row(std::cout, row);
  return 0;
}

int cmd_sweep(const std::string& axis, const std::string& values, const fs::path& config,
              int seeds, const fs::path& out, const fs::path& data, const std::string& ablate) {
  const ExperimentConfig cfg = config.empty() ? ExperimentConfig{} : load_experiment_config(config);
  const auto vals = parse_values(values);
  const LoadedInputs inputs = load_inputs(data, cfg.noise);
  ExperimentInputs view = inputs.view();
  view.dataset_name = dataset_name(data);

  std::ofstream csv(out);
  if (!csv) throw std::runtime_error("cannot write " + out.string());
  write_csv_header(csv);
  run_sweep(view, cfg, AblationFlags::parse(ablate), parse_sweep_axis(axis), vals, seeds,
            [&](const MetricsRow& r) {
              write_csv_row(csv, r);
              write_csv_row(std::cout, r);
            });
  return 0;
}

int cmd_synth(const std::string& kind, std::uint64_t seed, const fs::path& out) {
  Graph g;
  if (kind == "blobs") {
    BlobGraphSpec spec;
    spec.seed = seed;
    g = make_two_blob_graph(spec);
  } else if (kind == "citation") {
    CitationLikeSpec spec;
    spec.seed = seed;
    g = make_citation_like_graph(spec);
  } else {
    throw std::invalid_argument("synth kind must be blobs or citation");
  }
  save_dataset(g, out);
  std::cout << "wrote " << g.n_nodes() << " nodes, " << g.n_classes << " classes to " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust open-set node classification with label-propagation denoising"};
  app.require_subcommand(1);

  fs::path prep_in, prep_out;
  auto* prepare = app.add_subcommand("prepare", "Convert a raw citation dataset into nodes/edges/meta files");
  prepare->add_option("--in", prep_in, "Raw dataset directory")->required();
  prepare->add_option("--out", prep_out, "Output directory")->required();

  fs::path train_data, train_config, train_out, train_log, train_diag, train_dump;
  std::string train_ablate = "full";
  std::optional<std::uint64_t> train_seed;
  auto* train_cmd = app.add_subcommand("train", "Build the noisy scenario and train a model");
  train_cmd->add_option("--data", train_data, "Prepared dataset directory")->required();
  train_cmd->add_option("--config", train_config, "JSON config (training + noise fields)");
  train_cmd->add_option("--ablate", train_ablate, "full, no-gn, no-denoise, no-region or no-ldiv");
  train_cmd->add_option("--seed", train_seed, "Overrides the config seed");
  train_cmd->add_option("--out", train_out, "Model file")->required();
  train_cmd->add_option("--log", train_log, "Per-epoch JSON lines log");
  train_cmd->add_option("--diagnostics", train_diag, "Per-refresh denoising TSV");
  train_cmd->add_option("--dump-prototypes", train_dump, "Prototype TSV dump");

  fs::path eval_model, eval_data, eval_out;
  auto* eval = app.add_subcommand("eval", "Evaluate a model on the test split it was trained for");
  eval->add_option("--model", eval_model, "Model file")->required();
  eval->add_option("--data", eval_data, "Prepared dataset directory")->required();
  eval->add_option("--out", eval_out, "Metrics CSV")->required();

  std::string sweep_axis, sweep_values = "0,0.05,0.25,0.5,0.75", sweep_ablate = "full";
  fs::path sweep_config, sweep_out, sweep_data;
  int sweep_seeds = 3;
  auto* sweep = app.add_subcommand("sweep", "Run experiments over a range of noise rates");
  sweep->add_option("--axis", sweep_axis, "ind or ood")->required();
  sweep->add_option("--values", sweep_values, "Comma separated rates");
  sweep->add_option("--config", sweep_config, "JSON config (training + noise fields)");
  sweep->add_option("--seeds", sweep_seeds, "Seeds per value")->check(CLI::PositiveNumber);
  sweep->add_option("--out", sweep_out, "Metrics CSV")->required();
  sweep->add_option("--data", sweep_data, "Prepared dataset directory")->required();
  sweep->add_option("--ablate", sweep_ablate, "Variant to run");

  std::string synth_kind = "citation";
  std::uint64_t synth_seed = 0;
  fs::path synth_out;
  auto* synth = app.add_subcommand("synth", "Write a synthetic dataset");
  synth->add_option("--kind", synth_kind, "blobs or citation");
  synth->add_option("--seed", synth_seed, "Generator seed");
  synth->add_option("--out", synth_out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*prepare) return cmd_prepare(prep_in, prep_out);
    if (*train_cmd) {
      return cmd_train(train_data, train_config, train_ablate, train_seed, train_out, train_log,
                       train_diag, train_dump);
    }
    if (*eval) return cmd_eval(eval_model, eval_data, eval_out);
    if (*sweep) {
      return cmd_sweep(sweep_axis, sweep_values, sweep_config, sweep_seeds, sweep_out, sweep_data,
                       sweep_ablate);
    }
    if (*synth) return cmd_synth(synth_kind, synth_seed, synth_out);
  } catch (const std::exception& e) {
    std::cerr << "rogpl: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
