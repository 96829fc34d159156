#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rogpl/denoise.hpp"
#include "rogpl/experiment.hpp"
#include "rogpl/metrics.hpp"
#include "rogpl/prepare.hpp"
#include "rogpl/synthetic.hpp"

namespace py = pybind11;
using namespace rogpl;

namespace {

nlohmann::json parse_json(const std::string& text) {
  try {
    return nlohmann::json::parse(text.empty() ? "{}" : text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad JSON: ") + e.what());
  }
}

Graph graph_from_arrays(const Matrix& features, const std::vector<std::pair<int, int>>& edges,
                        std::vector<int> labels, int n_classes) {
  return make_graph(features, edges, std::move(labels), n_classes);
}

std::vector<std::pair<int, int>> graph_edges(const Graph& g) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < g.n_nodes(); ++i) {
    for (int j : g.adjacency.row_cols(i)) {
      if (i < j) e.emplace_back(i, j);
    }
  }
  return e;
}

py::dict row_to_dict(const MetricsRow& r) {
  py::dict d;
  d["dataset"] = r.dataset;
  d["ood_mode"] = r.ood_mode;
  d["ind_rate"] = r.ind_rate;
  d["ood_rate"] = r.ood_rate;
  d["variant"] = r.variant;
  d["seed"] = r.seed;
  d["macro_f1"] = r.metrics.macro_f1;
  d["auroc"] = r.metrics.auroc;
  d["known_acc"] = r.metrics.known_acc;
  d["unknown_acc"] = r.metrics.unknown_acc;
  d["overall_acc"] = r.metrics.overall_acc;
  d["n_clean_final"] = r.n_clean_final;
  d["wall_seconds"] = r.wall_seconds;
  return d;
}

std::vector<std::string> provenance_names(const NoisyDataset& ds) {
  static const char* names[] = {"clean", "ind_noise", "ood_noise", "unknown_test"};
  std::vector<std::string> out;
  for (auto p : ds.provenance) out.emplace_back(names[static_cast<int>(p)]);
  return out;
}

}  // namespace

PYBIND11_MODULE(_rogpl, m) {
  m.doc() = "Robust open-set node classification (C++ core)";
  m.attr("UNKNOWN") = kUnknown;
  m.attr("UNLABELED") = kUnlabeled;

  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<TrainingError>(m, "TrainingError", PyExc_RuntimeError);

  py::class_<Graph>(m, "Graph")
      .def(py::init(&graph_from_arrays), py::arg("features"), py::arg("edges"), py::arg("labels"),
           py::arg("n_classes"))
      .def_readonly("features", &Graph::features)
      .def_readonly("labels", &Graph::labels)
      .def_readonly("n_classes", &Graph::n_classes)
      .def_property_readonly("n_nodes", &Graph::n_nodes)
      .def_property_readonly("n_features", &Graph::n_features)
      .def_property_readonly("edges", &graph_edges)
      .def("__repr__", [](const Graph& g) {
        return "<Graph nodes=" + std::to_string(g.n_nodes()) +
               " edges=" + std::to_string(g.adjacency.nnz() / 2) +
               " classes=" + std::to_string(g.n_classes) + ">";
      });

  m.def("load_dataset", &load_dataset, py::arg("path"));
  m.def("save_dataset", &save_dataset, py::arg("graph"), py::arg("path"));
  m.def("convert_raw_dataset", &convert_raw_dataset, py::arg("path"));
  m.def(
      "two_blob_graph",
      [](int n_nodes, double separation, std::uint64_t seed) {
        BlobGraphSpec s;
        s.n_nodes = n_nodes;
        s.separation = separation;
        s.seed = seed;
        return make_two_blob_graph(s);
      },
      py::arg("n_nodes") = 200, py::arg("separation") = 12.0, py::arg("seed") = 0);
  m.def(
      "citation_like_graph",
      [](int n_classes, int nodes_per_class, std::uint64_t seed) {
        CitationLikeSpec s;
        s.n_classes = n_classes;
        s.nodes_per_class = nodes_per_class;
        s.seed = seed;
        return make_citation_like_graph(s);
      },
      py::arg("n_classes") = 7, py::arg("nodes_per_class") = 150, py::arg("seed") = 0);

  m.def(
      "split_nodes",
      [](const Graph& g, std::uint64_t seed) {
        const NodeSplit s = split_nodes(g, {0.7, 0.1, 0.2, seed});
        return py::make_tuple(s.train, s.val, s.test);
      },
      py::arg("graph"), py::arg("seed") = 0);

  // Denoising primitives on dense inputs.
  m.def(
      "knn_affinity",
      [](const Matrix& z, int k, double beta) { return build_knn_affinity(z, k, beta).weights.to_dense(); },
      py::arg("z"), py::arg("k"), py::arg("beta") = 3.0);
  m.def(
      "propagate_labels",
      [](const Matrix& w, const Matrix& seed, double alpha, double tol, int max_iter) {
        const AffinityGraph a{CsrMatrix::from_dense(w), 0, 1.0, {}};
        return propagate_labels(a, {seed, LabelRole::kSeed}, alpha, tol, max_iter).labels.values;
      },
      py::arg("w"), py::arg("seed_labels"), py::arg("alpha") = 0.99, py::arg("tol") = 1e-6,
      py::arg("max_iter") = 200);
  m.def(
      "select_clean",
      [](const Matrix& y_bar, const std::vector<int>& labels, double eta) {
        const CleanSelection s = select_clean({y_bar, LabelRole::kPropagated}, labels, eta);
        return py::make_tuple(s.mask.keep, s.pseudo_labels);
      },
      py::arg("y_bar"), py::arg("labels"), py::arg("eta"));

  m.def(
      "macro_f1",
      [](const std::vector<int>& p, const std::vector<int>& t, bool c_plus_one) {
        return macro_f1(p, t, c_plus_one);
      },
      py::arg("preds"), py::arg("truth"), py::arg("c_plus_one") = true);
  m.def(
      "auroc",
      [](const std::vector<double>& s, const std::vector<bool>& pos) { return auroc(s, pos); },
      py::arg("scores"), py::arg("is_positive"));

  py::class_<Model>(m, "Model")
      .def_readonly("n_classes", &Model::n_classes)
      .def_readwrite("tau", &Model::tau)
      .def_property_readonly("variant", [](const Model& mo) { return mo.variant.name(); })
      .def_property_readonly("config_json", [](const Model& mo) { return to_json(mo.config).dump(); })
      .def_property_readonly("interior_prototypes", [](const Model& mo) { return mo.pool.interior; })
      .def_property_readonly("border_count", [](const Model& mo) { return mo.pool.border_count(); })
      .def_property_readonly("final_clean", [](const Model& mo) { return mo.diagnostics.final_clean; })
      .def_property_readonly("best_epoch", [](const Model& mo) { return mo.diagnostics.best_epoch; })
      .def_property_readonly("epochs",
                             [](const Model& mo) {
                               py::list out;
                               for (const auto& e : mo.diagnostics.epochs) {
                                 py::dict d;
                                 d["epoch"] = e.epoch;
                                 d["loss"] = e.loss;
                                 d["l_cls"] = e.l_cls;
                                 d["l_div"] = e.l_div;
                                 d["n_clean"] = e.n_clean;
                                 d["val_macro_f1"] = e.val_macro_f1;
                                 out.append(d);
                               }
                               return out;
                             })
      .def(
          "predict",
          [](const Model& mo, const Graph& g, const std::vector<int>& ids, std::optional<double> tau) {
            const auto p = tau ? predict(mo, g, ids, *tau) : predict(mo, g, ids);
            return py::make_tuple(p.labels, p.confidence, p.scores);
          },
          py::arg("graph"), py::arg("ids"), py::arg("tau") = py::none())
      .def("save", [](const Model& mo, const std::filesystem::path& p) { save_model(mo, p); });

  m.def("load_model", &load_model, py::arg("path"));

  m.def(
      "_train",
      [](const Graph& g, const std::vector<int>& train_ids, const std::vector<int>& val_ids,
         const std::string& config_json, const std::string& variant) {
        const TrainConfig cfg = train_config_from_json(parse_json(config_json));
        py::gil_scoped_release release;
        return train(g, train_ids, val_ids, cfg, AblationFlags::parse(variant));
      },
      py::arg("graph"), py::arg("train_ids"), py::arg("val_ids"), py::arg("config_json"),
      py::arg("variant"));

  py::class_<NoisyDataset>(m, "NoisyDataset")
      .def_readonly("graph", &NoisyDataset::graph)
      .def_readonly("truth", &NoisyDataset::truth)
      .def_readonly("train_ids", &NoisyDataset::train_ids)
      .def_readonly("val_ids", &NoisyDataset::val_ids)
      .def_readonly("test_ids", &NoisyDataset::test_ids)
      .def_property_readonly("provenance", &provenance_names);

  m.def(
      "_make_scenario",
      [](const Graph& raw, const std::string& config_json, const Graph* far_source) {
        const ExperimentConfig cfg = experiment_config_from_json(parse_json(config_json));
        return make_scenario(raw, cfg.noise, far_source);
      },
      py::arg("raw"), py::arg("config_json"), py::arg("far_source") = nullptr);

  m.def(
      "_run_experiment",
      [](const std::string& name, const Graph& raw, const std::string& config_json,
         const std::string& variant, int n_seeds, const Graph* far_source) {
        const ExperimentConfig cfg = experiment_config_from_json(parse_json(config_json));
        std::vector<MetricsRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_experiment({name, &raw, far_source}, cfg, AblationFlags::parse(variant), n_seeds);
        }
        py::list out;
        for (const auto& r : rows) out.append(row_to_dict(r));
        return out;
      },
      py::arg("name"), py::arg("raw"), py::arg("config_json"), py::arg("variant"), py::arg("n_seeds"),
      py::arg("far_source") = nullptr);
}
