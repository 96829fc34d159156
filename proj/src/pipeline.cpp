#include "rogpl/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rogpl/denoise.hpp"
#include "rogpl/metrics.hpp"

namespace rogpl {
namespace {

constexpr std::uint64_t kPrototypeSeedSalt = 0x9e3779b97f4a7c15ULL;

Matrix gather_rows(const Matrix& m, std::span<const int> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) out.row(k) = m.row(rows[k]);
  return out;
}

std::vector<int> argmax_rows(const Matrix& scores) {
  std::vector<int> out(scores.rows());
  for (Eigen::Index i = 0; i < scores.rows(); ++i) out[i] = argmax_lowest(scores.row(i));
  return out;
}

std::vector<double> max_softmax(const Matrix& scores, double temperature) {
  const Matrix prob = softmax_rows(scores, temperature);
  std::vector<double> out(prob.rows());
  for (Eigen::Index i = 0; i < prob.rows(); ++i) out[i] = prob.row(i).maxCoeff();
  return out;
}

// Largest grid threshold that rejects at most `budget` of the validation nodes.
double sweep_tau(const std::vector<double>& confidence, double budget, double fallback) {
  if (confidence.empty()) return fallback;
  double chosen = 0.1;
  for (int step = 1; step <= 9; ++step) {
    const double tau = 0.1 * step;
    const auto rejected = std::count_if(confidence.begin(), confidence.end(),
                                        [&](double c) { return c < tau; });
    if (static_cast<double>(rejected) <= budget * static_cast<double>(confidence.size())) {
      chosen = tau;
    }
  }
  return chosen;
}

struct Snapshot {
  GcnParams encoder;
  PrototypePool pool;
};

}  // namespace

Model train(const Graph& g, std::span<const int> train_ids, std::span<const int> val_ids,
            const TrainConfig& cfg, const AblationFlags& variant, const EpochObserver& observer) {
  cfg.validate();
  const int c_count = g.n_classes;
  const int n_train = static_cast<int>(train_ids.size());
  const int n_val = static_cast<int>(val_ids.size());
  if (n_train == 0) throw std::invalid_argument("train: no training nodes");
  if (c_count < 1) throw std::invalid_argument("train: graph declares no classes");

  std::vector<int> sub_ids(train_ids.begin(), train_ids.end());
  sub_ids.insert(sub_ids.end(), val_ids.begin(), val_ids.end());
  {
    std::vector<int> sorted = sub_ids;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw std::invalid_argument("train: train and validation ids overlap or repeat");
    }
  }
  Graph sub = induced_subgraph(g, sub_ids);
  if (cfg.row_normalize_features) row_normalize_features(sub);

  std::vector<int> labels(sub.labels.begin(), sub.labels.begin() + n_train);
  std::vector<int> val_labels(sub.labels.begin() + n_train, sub.labels.end());
  for (int y : labels) {
    if (y < 0 || y >= c_count) throw std::invalid_argument("train: unlabeled training node");
  }
  for (int y : val_labels) {
    if (y < 0 || y >= c_count) throw std::invalid_argument("train: unlabeled validation node");
  }

  const auto input = make_gcn_input(normalize_adjacency(sub), sub.features);
  Model model;
  model.config = cfg;
  model.variant = variant;
  model.n_classes = c_count;
  model.tau = cfg.tau;
  model.encoder = init_params(sub.n_features(), cfg.hidden_dim, cfg.latent_dim, cfg.seed);
  model.pool = init_prototypes(c_count, cfg.latent_dim, cfg.seed ^ kPrototypeSeedSalt);
  AdamState adam = AdamState::for_params(model.encoder);

  AffinityGraph graph_affinity;
  if (variant.no_gn && !variant.no_denoise) {
    std::vector<int> local_train(n_train);
    for (int i = 0; i < n_train; ++i) local_train[i] = i;
    graph_affinity = affinity_from_adjacency(induced_subgraph(sub, local_train).adjacency);
  }

  const int warmup = variant.no_denoise ? cfg.epochs : cfg.warmup_epochs;
  const double lambda = variant.no_ldiv ? 0.0 : cfg.lambda;
  const auto proto_mode =
      variant.no_region ? PrototypeGradient::kAll : PrototypeGradient::kMaskedOwnClass;

  CleanMask prev_clean{std::vector<bool>(n_train, true), cfg.eta, 0};
  std::vector<int> pseudo = labels;
  std::vector<int> clean_rows;
  std::vector<int> clean_labels;
  std::vector<bool> homogeneous_sample;

  TrainDiagnostics& diag = model.diagnostics;
  Snapshot best{model.encoder, model.pool};
  double best_f1 = -1.0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const ForwardCache fwd = forward(model.encoder, input);
    const Matrix z_train = fwd.latent.topRows(n_train);
    const bool warm = epoch < warmup;
    const bool refresh = warm || (epoch - warmup) % cfg.refresh_period == 0;

    if (refresh) {
      std::vector<bool> keep(n_train, true);
      if (warm) {
        pseudo = labels;
      } else {
        const Matrix scores = score_batch(z_train, model.pool).scores;
        AffinityGraph affinity;
        if (variant.no_gn) {
          affinity = graph_affinity;
        } else {
          Matrix zk = z_train;
          if (cfg.normalize_latent) {
            for (Eigen::Index i = 0; i < zk.rows(); ++i) {
              const double nrm = zk.row(i).norm();
              if (nrm > 0.0) zk.row(i) /= nrm;
            }
          }
          affinity = build_knn_affinity(zk, std::min(cfg.k_nn, n_train - 1), cfg.beta);
        }
        const SoftLabels seed =
            assemble_seed_labels(labels, prev_clean, &scores, c_count, cfg.temperature);
        const PropagationResult prop =
            propagate_labels(affinity, seed, cfg.alpha, cfg.cg_tol, cfg.cg_max_iter);
        CleanSelection sel = select_clean(prop.labels, labels, cfg.eta);
        sel.mask.iteration = epoch;
        const int kept = sel.mask.count();
        if (kept < c_count) {
          throw TrainingError("clean set shrank to " + std::to_string(kept) +
                              " nodes (fewer than " + std::to_string(c_count) +
                              " classes) at epoch " + std::to_string(epoch) +
                              "; eta may be too high");
        }
        double conf = 0.0;
        for (Eigen::Index i = 0; i < sel.normalized.rows(); ++i) {
          conf += sel.normalized.row(i).maxCoeff();
        }
        diag.refreshes.push_back({epoch, kept, n_train - kept, conf / n_train,
                                  prop.total_iterations()});
        keep = sel.mask.keep;
        pseudo = sel.pseudo_labels;
        prev_clean = std::move(sel.mask);
      }

      clean_rows.clear();
      clean_labels.clear();
      for (int i = 0; i < n_train; ++i) {
        if (keep[i]) {
          clean_rows.push_back(i);
          clean_labels.push_back(pseudo[i]);
        }
      }
      homogeneous_sample.assign(clean_rows.size(), false);
      if (variant.no_region) {
        model.pool.border.assign(c_count, {});
      } else {
        const Matrix z_clean = gather_rows(z_train, clean_rows);
        const int k = std::min(cfg.effective_clusters(c_count), static_cast<int>(clean_rows.size()));
        const ClusterAssignment ca = cluster_regions(z_clean, clean_labels, c_count, k,
                                                     cfg.seed + static_cast<std::uint64_t>(epoch),
                                                     cfg.kmeans_max_iter);
        model.pool.border = compute_border_prototypes(ca, z_clean);
        for (std::size_t j = 0; j < clean_rows.size(); ++j) {
          homogeneous_sample[j] = ca.homogeneous[ca.node_cluster[j]];
        }
      }
    }

    double val_f1 = 0.0;
    if (n_val > 0) {
      const Matrix z_val = fwd.latent.bottomRows(n_val);
      val_f1 = macro_f1(argmax_rows(score_batch(z_val, model.pool).scores), val_labels, false);
    }
    if (val_f1 > best_f1 || n_val == 0) {
      best_f1 = val_f1;
      best = {model.encoder, model.pool};
      diag.best_epoch = epoch;
    }

    const Matrix z_clean = gather_rows(z_train, clean_rows);
    const ScoreBatch batch = score_batch(z_clean, model.pool);
    const LossAndGrad cls = classification_loss(batch.scores, clean_labels, cfg.temperature);
    const ScoreBackprop bp = backprop_scores(z_clean, model.pool, batch, cls.grad, proto_mode,
                                             clean_labels, homogeneous_sample);
    const LossAndGrad div = diversity_loss(model.pool.interior);
    const double loss = cls.loss + lambda * div.loss;
    if (!std::isfinite(loss)) {
      throw TrainingError("loss diverged at epoch " + std::to_string(epoch));
    }

    Matrix grad_latent = Matrix::Zero(fwd.latent.rows(), fwd.latent.cols());
    for (std::size_t j = 0; j < clean_rows.size(); ++j) {
      grad_latent.row(clean_rows[j]) = bp.grad_latent.row(j);
    }
    const GcnGrads grads = backward(model.encoder, fwd, grad_latent);
    adam_step(model.encoder, grads, adam, cfg.lr);
    update_interior(model.pool.interior, bp.grad_interior + lambda * div.grad, cfg.phi);

    const EpochRecord rec{epoch, loss, cls.loss, div.loss, static_cast<int>(clean_rows.size()),
                          val_f1};
    diag.epochs.push_back(rec);
    if (observer) observer(rec);
  }

  diag.final_clean.clear();
  diag.final_pseudo_labels.clear();
  for (std::size_t j = 0; j < clean_rows.size(); ++j) {
    diag.final_clean.push_back(train_ids[clean_rows[j]]);
    diag.final_pseudo_labels.push_back(clean_labels[j]);
  }
  diag.n_clean_final = static_cast<int>(clean_rows.size());
  model.encoder = std::move(best.encoder);
  model.pool = std::move(best.pool);

  if (cfg.tau_sweep && n_val > 0) {
    const ForwardCache fwd = forward(model.encoder, input);
    const Matrix scores = score_batch(fwd.latent.bottomRows(n_val), model.pool).scores;
    model.tau = sweep_tau(max_softmax(scores, cfg.temperature), cfg.tau_sweep_reject_rate, cfg.tau);
  }
  return model;
}

OpenSetPrediction predict(const Model& m, const Graph& g, std::span<const int> ids) {
  return predict(m, g, ids, m.tau);
}

OpenSetPrediction predict(const Model& m, const Graph& g, std::span<const int> ids, double tau) {
  if (g.n_features() != m.encoder.input_dim()) {
    throw DimensionError("predict: graph has " + std::to_string(g.n_features()) +
                         " features, model expects " + std::to_string(m.encoder.input_dim()));
  }
  for (int id : ids) {
    if (id < 0 || id >= g.n_nodes()) throw std::out_of_range("predict: node id out of range");
  }
  const Matrix* features = &g.features;
  Graph normalized;
  if (m.config.row_normalize_features) {
    normalized.features = g.features;
    normalized.labels = g.labels;
    row_normalize_features(normalized);
    features = &normalized.features;
  }
  const ForwardCache fwd = forward(m.encoder, make_gcn_input(normalize_adjacency(g), *features));
  OpenSetPrediction out;
  out.scores = score_batch(gather_rows(fwd.latent, ids), m.pool).scores;
  out.confidence = max_softmax(out.scores, m.config.temperature);
  out.labels.resize(ids.size());
  for (std::size_t k = 0; k < ids.size(); ++k) {
    out.labels[k] = out.confidence[k] >= tau ? argmax_lowest(out.scores.row(k)) : kUnknown;
  }
  return out;
}

}  // namespace rogpl
