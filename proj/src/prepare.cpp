#include "rogpl/prepare.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace rogpl {
namespace {

namespace fs = std::filesystem;

fs::path find_with_suffix(const fs::path& dir, const std::string& suffix) {
  std::vector<fs::path> hits;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() >= suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      hits.push_back(entry.path());
    }
  }
  std::sort(hits.begin(), hits.end());
  return hits.empty() ? fs::path() : hits.front();
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::vector<int> class_ids(const std::vector<std::string>& names, int& n_classes) {
  std::vector<std::string> sorted = names;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  n_classes = static_cast<int>(sorted.size());
  std::vector<int> out;
  out.reserve(names.size());
  for (const auto& n : names) {
    out.push_back(static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), n) - sorted.begin()));
  }
  return out;
}

Graph convert_linqs(const fs::path& content, const fs::path& cites) {
  std::ifstream in(content);
  if (!in) throw FormatError("cannot read " + content.string());
  std::unordered_map<std::string, int> index;
  std::vector<std::string> class_names;
  std::vector<std::vector<double>> rows;
  std::string line;
  int width = -1;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tok = tokens(line);
    if (tok.empty()) continue;
    if (tok.size() < 3) throw FormatError(content.string() + ":" + std::to_string(line_no) + ": too few fields");
    const int w = static_cast<int>(tok.size()) - 2;
    if (width >= 0 && w != width) {
      throw FormatError(content.string() + ":" + std::to_string(line_no) + ": feature count changed");
    }
    width = w;
    if (!index.emplace(tok.front(), static_cast<int>(rows.size())).second) {
      throw FormatError(content.string() + ": duplicate paper id " + tok.front());
    }
    std::vector<double> row(w);
    for (int f = 0; f < w; ++f) {
      try {
        row[f] = std::stod(tok[f + 1]);
      } catch (const std::exception&) {
        throw FormatError(content.string() + ":" + std::to_string(line_no) + ": non-numeric feature");
      }
    }
    rows.push_back(std::move(row));
    class_names.push_back(tok.back());
  }
  Matrix features(static_cast<Eigen::Index>(rows.size()), std::max(width, 0));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int f = 0; f < width; ++f) features(i, f) = rows[i][f];
  }
  int n_classes = 0;
  std::vector<int> labels = class_ids(class_names, n_classes);

  std::ifstream cin(cites);
  if (!cin) throw FormatError("cannot read " + cites.string());
  std::vector<std::pair<int, int>> edges;
  while (std::getline(cin, line)) {
    const auto tok = tokens(line);
    if (tok.size() != 2) continue;
    const auto a = index.find(tok[0]);
    const auto b = index.find(tok[1]);
    if (a == index.end() || b == index.end()) continue;
    edges.emplace_back(a->second, b->second);
  }
  return make_graph(std::move(features), edges, std::move(labels), n_classes);
}

Graph convert_pubmed(const fs::path& nodes, const fs::path& cites) {
  std::ifstream in(nodes);
  if (!in) throw FormatError("cannot read " + nodes.string());
  std::string line;
  std::getline(in, line);  // "NODE\tpaper"
  std::getline(in, line);  // feature declarations
  std::map<std::string, int> word_index;
  {
    std::istringstream decl(line);
    std::string field;
    while (std::getline(decl, field, '\t')) {
      // numeric:<word>:0.0
      if (field.rfind("numeric:", 0) != 0) continue;
      const auto second = field.find(':', 8);
      const std::string word = field.substr(8, second == std::string::npos ? std::string::npos : second - 8);
      word_index.emplace(word, static_cast<int>(word_index.size()));
    }
  }
  std::unordered_map<std::string, int> index;
  std::vector<std::string> class_names;
  std::vector<std::vector<std::pair<int, double>>> rows;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string field;
    if (!std::getline(fields, field, '\t') || field.empty()) continue;
    const std::string id = field;
    std::string label;
    std::vector<std::pair<int, double>> row;
    while (std::getline(fields, field, '\t')) {
      const auto eq = field.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = field.substr(0, eq);
      const std::string value = field.substr(eq + 1);
      if (key == "label") {
        label = value;
      } else if (const auto w = word_index.find(key); w != word_index.end()) {
        try {
          row.emplace_back(w->second, std::stod(value));
        } catch (const std::exception&) {
          throw FormatError(nodes.string() + ": non-numeric feature for paper " + id);
        }
      }
    }
    if (label.empty()) throw FormatError(nodes.string() + ": paper " + id + " has no label");
    index.emplace(id, static_cast<int>(rows.size()));
    rows.push_back(std::move(row));
    class_names.push_back(label);
  }
  Matrix features = Matrix::Zero(static_cast<Eigen::Index>(rows.size()),
                                 static_cast<Eigen::Index>(word_index.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& [f, v] : rows[i]) features(i, f) = v;
  }
  int n_classes = 0;
  std::vector<int> labels = class_ids(class_names, n_classes);

  std::ifstream cin(cites);
  if (!cin) throw FormatError("cannot read " + cites.string());
  std::vector<std::pair<int, int>> edges;
  while (std::getline(cin, line)) {
    // <edge id>\tpaper:<a>\t|\tpaper:<b>
    std::istringstream fields(line);
    std::vector<std::string> parts;
    std::string field;
    while (std::getline(fields, field, '\t')) parts.push_back(field);
    if (parts.size() != 4 || parts[1].rfind("paper:", 0) != 0 || parts[3].rfind("paper:", 0) != 0) {
      continue;
    }
    const auto a = index.find(parts[1].substr(6));
    const auto b = index.find(parts[3].substr(6));
    if (a == index.end() || b == index.end()) continue;
    edges.emplace_back(a->second, b->second);
  }
  return make_graph(std::move(features), edges, std::move(labels), n_classes);
}

}  // namespace

Graph convert_raw_dataset(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw FormatError("not a directory: " + dir.string());
  const fs::path content = find_with_suffix(dir, ".content");
  const fs::path cites = find_with_suffix(dir, ".cites");
  if (!content.empty() && !cites.empty()) return convert_linqs(content, cites);
  const fs::path nodes = find_with_suffix(dir, ".NODE.paper.tab");
  const fs::path links = find_with_suffix(dir, ".DIRECTED.cites.tab");
  if (!nodes.empty() && !links.empty()) return convert_pubmed(nodes, links);
  throw FormatError("no recognized raw dataset files in " + dir.string());
}

}  // namespace rogpl
