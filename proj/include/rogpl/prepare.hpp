#pragma once

#include <filesystem>

#include "rogpl/graph.hpp"

namespace rogpl {

/// Converts a raw public citation dataset directory into a Graph.
///
/// Two layouts are recognized:
///  - `*.content` + `*.cites` (Cora / Citeseer distribution): one paper
///    per line, id, binary word features, class name.
///  - `*.NODE.paper.tab` + `*.DIRECTED.cites.tab` (Pubmed-Diabetes):
///    sparse TF-IDF features keyed by word name.
///
/// Class names are sorted lexicographically to assign ids 0..C-1. Citation
/// lines that mention an unknown paper id are skipped.
Graph convert_raw_dataset(const std::filesystem::path& dir);

}  // namespace rogpl
