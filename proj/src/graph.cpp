#include "rogpl/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <string_view>

#include "json.hpp"

namespace rogpl {
namespace {

using nlohmann::json;

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::string_view trim_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view field, const std::string& where) {
  T value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || field.empty()) {
    throw FormatError(where + ": not a number: '" + std::string(field) + "'");
  }
  return value;
}

std::ifstream open_or_throw(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw FormatError("missing file: " + p.string());
  return in;
}

void write_double(std::ostream& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, res.ptr - buf);
}

}  // namespace

void Graph::validate() const {
  const int n = n_nodes();
  if (features.rows() != n) throw std::invalid_argument("feature row count differs from node count");
  if (adjacency.rows != n || adjacency.cols != n) {
    throw std::invalid_argument("adjacency shape differs from node count");
  }
  for (int i = 0; i < n; ++i) {
    for (int j : adjacency.row_cols(i)) {
      if (j == i) throw std::invalid_argument("stored self-loop at node " + std::to_string(i));
    }
  }
  if (!adjacency.is_symmetric()) throw std::invalid_argument("adjacency is not symmetric");
  for (int i = 0; i < n; ++i) {
    const int y = labels[i];
    if (y != kUnlabeled && (y < 0 || y >= n_classes)) {
      throw std::invalid_argument("label " + std::to_string(y) + " of node " + std::to_string(i) +
                                  " outside [0, " + std::to_string(n_classes) + ")");
    }
  }
}

Graph make_graph(Matrix features, std::span<const std::pair<int, int>> edges,
                 std::vector<int> labels, int n_classes) {
  const int n = static_cast<int>(labels.size());
  std::vector<Triplet> entries;
  entries.reserve(edges.size() * 2);
  for (const auto& [u, v] : edges) {
    if (u < 0 || u >= n || v < 0 || v >= n) {
      throw FormatError("dangling edge endpoint (" + std::to_string(u) + ", " + std::to_string(v) +
                        ") in a graph of " + std::to_string(n) + " nodes");
    }
    if (u == v) continue;
    entries.push_back({u, v, 1.0});
    entries.push_back({v, u, 1.0});
  }
  Graph g;
  g.features = std::move(features);
  g.adjacency = CsrMatrix::from_triplets(n, n, std::move(entries), DuplicatePolicy::kMax);
  g.labels = std::move(labels);
  g.n_classes = n_classes;
  g.validate();
  return g;
}

Graph induced_subgraph(const Graph& g, std::span<const int> ids) {
  std::vector<int> local(g.n_nodes(), -1);
  for (std::size_t k = 0; k < ids.size(); ++k) local[ids[k]] = static_cast<int>(k);
  const int m = static_cast<int>(ids.size());
  Graph sub;
  sub.n_classes = g.n_classes;
  sub.features.resize(m, g.features.cols());
  sub.labels.resize(m);
  std::vector<Triplet> entries;
  for (int k = 0; k < m; ++k) {
    const int i = ids[k];
    sub.features.row(k) = g.features.row(i);
    sub.labels[k] = g.labels[i];
    for (int j : g.adjacency.row_cols(i)) {
      if (local[j] >= 0) entries.push_back({k, local[j], 1.0});
    }
  }
  sub.adjacency = CsrMatrix::from_triplets(m, m, std::move(entries), DuplicatePolicy::kMax);
  return sub;
}

Graph load_dataset(const std::filesystem::path& dir) {
  json meta;
  {
    auto in = open_or_throw(dir / "meta.json");
    try {
      in >> meta;
    } catch (const json::exception& e) {
      throw FormatError("meta.json: " + std::string(e.what()));
    }
  }
  int n = 0, s = 0, c = 0;
  try {
    n = meta.at("n_nodes").get<int>();
    s = meta.at("n_features").get<int>();
    c = meta.at("n_classes").get<int>();
  } catch (const json::exception& e) {
    throw FormatError("meta.json: " + std::string(e.what()));
  }
  if (n < 0 || s < 0 || c < 0) throw FormatError("meta.json: negative size");

  Matrix features = Matrix::Zero(n, s);
  std::vector<int> labels(n, kUnlabeled);
  std::vector<bool> seen(n, false);
  {
    auto in = open_or_throw(dir / "nodes.tsv");
    std::string line;
    if (!std::getline(in, line)) throw FormatError("nodes.tsv: empty file");
    const auto header = split_tabs(trim_cr(line));
    if (header.size() != static_cast<std::size_t>(s) + 2 || header[0] != "node_id" ||
        header[1] != "label") {
      throw FormatError("nodes.tsv: header must be node_id, label and " + std::to_string(s) +
                        " feature columns");
    }
    int line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      const auto view = trim_cr(line);
      if (view.empty()) continue;
      const std::string where = "nodes.tsv:" + std::to_string(line_no);
      const auto fields = split_tabs(view);
      if (fields.size() != static_cast<std::size_t>(s) + 2) {
        throw FormatError(where + ": expected " + std::to_string(s + 2) + " fields, got " +
                          std::to_string(fields.size()));
      }
      const int id = parse_number<int>(fields[0], where);
      if (id < 0 || id >= n) throw FormatError(where + ": node id out of range");
      if (seen[id]) throw FormatError(where + ": duplicate node id " + std::to_string(id));
      seen[id] = true;
      const int y = parse_number<int>(fields[1], where);
      if (y != kUnlabeled && (y < 0 || y >= c)) {
        throw FormatError(where + ": label " + std::to_string(y) + " not below declared " +
                          std::to_string(c) + " classes");
      }
      labels[id] = y;
      for (int f = 0; f < s; ++f) features(id, f) = parse_number<double>(fields[f + 2], where);
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!seen[i]) throw FormatError("nodes.tsv: node " + std::to_string(i) + " missing");
  }

  std::vector<std::pair<int, int>> edges;
  {
    auto in = open_or_throw(dir / "edges.tsv");
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto view = trim_cr(line);
      if (view.empty()) continue;
      const std::string where = "edges.tsv:" + std::to_string(line_no);
      const auto fields = split_tabs(view);
      if (fields.size() != 2) throw FormatError(where + ": expected src<TAB>dst");
      const int u = parse_number<int>(fields[0], where);
      const int v = parse_number<int>(fields[1], where);
      if (u < 0 || u >= n || v < 0 || v >= n) {
        throw FormatError(where + ": dangling edge endpoint (" + std::to_string(u) + ", " +
                          std::to_string(v) + ")");
      }
      edges.emplace_back(u, v);
    }
  }
  return make_graph(std::move(features), edges, std::move(labels), c);
}

void save_dataset(const Graph& g, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "meta.json");
    if (!out) throw FormatError("cannot write " + (dir / "meta.json").string());
    json meta = {{"n_nodes", g.n_nodes()}, {"n_features", g.n_features()},
                 {"n_classes", g.n_classes}};
    out << meta.dump() << '\n';
  }
  {
    std::ofstream out(dir / "nodes.tsv");
    if (!out) throw FormatError("cannot write " + (dir / "nodes.tsv").string());
    out << "node_id\tlabel";
    for (int f = 1; f <= g.n_features(); ++f) out << "\tf" << f;
    out << '\n';
    for (int i = 0; i < g.n_nodes(); ++i) {
      out << i << '\t' << g.labels[i];
      for (int f = 0; f < g.n_features(); ++f) {
        out << '\t';
        write_double(out, g.features(i, f));
      }
      out << '\n';
    }
  }
  {
    std::ofstream out(dir / "edges.tsv");
    if (!out) throw FormatError("cannot write " + (dir / "edges.tsv").string());
    for (int i = 0; i < g.n_nodes(); ++i) {
      for (int j : g.adjacency.row_cols(i)) {
        if (i < j) out << i << '\t' << j << '\n';
      }
    }
  }
}

void row_normalize_features(Graph& g) {
  for (int i = 0; i < g.features.rows(); ++i) {
    const double mass = g.features.row(i).cwiseAbs().sum();
    if (mass > 0.0) g.features.row(i) /= mass;
  }
}

NormalizedAdjacency normalize_adjacency(const CsrMatrix& adjacency) {
  const int n = adjacency.rows;
  std::vector<double> inv_sqrt_deg(n);
  for (int i = 0; i < n; ++i) {
    double d = 1.0;
    for (double v : adjacency.row_values(i)) d += v;
    inv_sqrt_deg[i] = 1.0 / std::sqrt(d);
  }
  std::vector<Triplet> entries;
  entries.reserve(adjacency.nnz() + static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    entries.push_back({i, i, inv_sqrt_deg[i] * inv_sqrt_deg[i]});
    const auto cols = adjacency.row_cols(i);
    const auto vals = adjacency.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const int j = cols[k];
      if (j == i) continue;
      entries.push_back({i, j, vals[k] * inv_sqrt_deg[i] * inv_sqrt_deg[j]});
    }
  }
  return {CsrMatrix::from_triplets(n, n, std::move(entries))};
}

NodeSplit split_nodes(const Graph& g, const SplitSpec& spec) {
  const double total = spec.train_fraction + spec.val_fraction + spec.test_fraction;
  if (spec.train_fraction <= 0 || spec.val_fraction <= 0 || spec.test_fraction <= 0 ||
      std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("split fractions must be positive and sum to 1");
  }
  std::vector<std::vector<int>> by_class(g.n_classes);
  for (int i = 0; i < g.n_nodes(); ++i) {
    if (g.labels[i] != kUnlabeled) by_class[g.labels[i]].push_back(i);
  }
  bool any = false;
  for (const auto& members : by_class) any = any || !members.empty();
  if (!any) throw std::invalid_argument("split_nodes: graph has no labeled nodes");

  std::mt19937_64 rng(spec.seed);
  NodeSplit out;
  for (int c = 0; c < g.n_classes; ++c) {
    auto& members = by_class[c];
    const int m = static_cast<int>(members.size());
    if (m == 0) continue;
    if (m < 3) {
      throw std::invalid_argument("split_nodes: class " + std::to_string(c) + " has only " +
                                  std::to_string(m) + " labeled nodes");
    }
    std::shuffle(members.begin(), members.end(), rng);
    const int n_val = std::max(1, static_cast<int>(std::lround(spec.val_fraction * m)));
    const int n_test = std::max(1, static_cast<int>(std::lround(spec.test_fraction * m)));
    const int n_train = m - n_val - n_test;
    if (n_train < 1) {
      throw std::invalid_argument("split_nodes: class " + std::to_string(c) +
                                  " too small for the requested fractions");
    }
    out.train.insert(out.train.end(), members.begin(), members.begin() + n_train);
    out.val.insert(out.val.end(), members.begin() + n_train, members.begin() + n_train + n_val);
    out.test.insert(out.test.end(), members.begin() + n_train + n_val, members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.val.begin(), out.val.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace rogpl
