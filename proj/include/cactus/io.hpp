#pragma once

#include "cactus/decomposition.hpp"
#include "cactus/graph.hpp"
#include "cactus/metric.hpp"
#include "cactus/realization.hpp"

#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cactus::io {

using json = nlohmann::ordered_json;

/// Malformed file contents (as opposed to a missing or unreadable file).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable or unwritable file.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class MatrixFormat { Auto, Csv, Tsv, Phylip, Json };

/// Parsed but not yet validated matrix.
template <Scalar T>
struct RawMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<T>> rows;
};

/// How values are printed: exact "p/q" by default, or rounded decimals.
struct ValueFormat {
  bool decimal = false;
  int digits = 6;
};

template <Scalar T>
std::string format_value(const T& v, const ValueFormat& f = {}) {
  return f.decimal ? scalar_traits<T>::format_decimal(v, f.digits) : num::format(v);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("cannot write " + path);
}

namespace detail {

inline std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    out.push_back(line);
  }
  return out;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

inline std::vector<std::string> tokens(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

template <Scalar T>
T parse_value(const std::string& s, const std::string& where) {
  try {
    return num::parse<T>(s);
  } catch (const std::exception&) {
    throw FormatError("bad value '" + s + "' at " + where);
  }
}

template <Scalar T>
RawMatrix<T> parse_delimited(const std::string& text, char sep) {
  auto lines = lines_of(text);
  if (lines.empty()) throw FormatError("empty matrix file");
  auto header = split(lines[0], sep);
  if (header.size() < 2) throw FormatError("header needs a corner cell and at least one label");
  RawMatrix<T> out;
  out.labels.assign(header.begin() + 1, header.end());
  const std::size_t n = out.labels.size();
  if (lines.size() - 1 != n) {
    throw FormatError("expected " + std::to_string(n) + " rows, found " + std::to_string(lines.size() - 1));
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto cells = split(lines[i + 1], sep);
    if (cells.size() != n + 1) throw FormatError("row " + std::to_string(i + 1) + " has wrong length");
    if (cells[0] != out.labels[i]) {
      throw FormatError("row label '" + cells[0] + "' does not match column label '" + out.labels[i] + "'");
    }
    std::vector<T> row;
    row.reserve(n);
    for (std::size_t j = 0; j < n; ++j) row.push_back(parse_value<T>(cells[j + 1], "row " + cells[0]));
    out.rows.push_back(std::move(row));
  }
  return out;
}

/// Square or lower-triangular (with or without diagonal) PHYLIP, one row
/// per line: the first line holds n, each row starts with its label.
template <Scalar T>
RawMatrix<T> parse_phylip(const std::string& text) {
  auto lines = lines_of(text);
  if (lines.empty()) throw FormatError("empty PHYLIP file");
  std::size_t n = 0;
  try {
    n = static_cast<std::size_t>(std::stoul(trim(lines[0])));
  } catch (const std::exception&) {
    throw FormatError("PHYLIP header must be the number of taxa");
  }
  if (lines.size() - 1 != n) throw FormatError("PHYLIP: expected " + std::to_string(n) + " rows");
  RawMatrix<T> out;
  out.rows.assign(n, std::vector<T>(n));
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < n; ++i) {
    auto t = tokens(lines[i + 1]);
    if (t.empty()) throw FormatError("PHYLIP: empty row");
    out.labels.push_back(t[0]);
    rows.emplace_back(t.begin() + 1, t.end());
  }
  const std::size_t first = n ? rows[0].size() : 0;
  const bool square = first == n && n > 1;
  const bool with_diagonal = !square && first == 1;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t expect = square ? n : (with_diagonal ? i + 1 : i);
    if (rows[i].size() != expect) throw FormatError("PHYLIP: row " + out.labels[i] + " has wrong length");
    for (std::size_t j = 0; j < expect; ++j) {
      T v = parse_value<T>(rows[i][j], "row " + out.labels[i]);
      out.rows[i][j] = v;
      if (!square) out.rows[j][i] = v;
    }
  }
  return out;
}

template <Scalar T>
T json_value(const json& v, const std::string& where) {
  if (v.is_string()) return parse_value<T>(v.get<std::string>(), where);
  if (v.is_number()) return parse_value<T>(v.dump(), where);
  throw FormatError("expected a number or numeric string at " + where);
}

template <Scalar T>
RawMatrix<T> parse_json_matrix(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("labels") || !j.contains("matrix")) {
    throw FormatError("JSON matrix needs \"labels\" and \"matrix\"");
  }
  RawMatrix<T> out;
  for (const auto& l : j["labels"]) {
    if (!l.is_string()) throw FormatError("labels must be strings");
    out.labels.push_back(l.get<std::string>());
  }
  for (const auto& row : j["matrix"]) {
    if (!row.is_array()) throw FormatError("matrix rows must be arrays");
    std::vector<T> r;
    for (const auto& v : row) r.push_back(json_value<T>(v, "matrix"));
    out.rows.push_back(std::move(r));
  }
  return out;
}

inline MatrixFormat sniff(const std::string& path, const std::string& text) {
  auto ext = std::filesystem::path(path).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".json") return MatrixFormat::Json;
  if (ext == ".tsv" || ext == ".tab") return MatrixFormat::Tsv;
  if (ext == ".csv") return MatrixFormat::Csv;
  if (ext == ".phy" || ext == ".phylip" || ext == ".dist") return MatrixFormat::Phylip;
  auto t = trim(text);
  if (!t.empty() && t.front() == '{') return MatrixFormat::Json;
  auto lines = lines_of(text);
  if (!lines.empty()) {
    auto head = trim(lines[0]);
    if (std::all_of(head.begin(), head.end(), [](unsigned char c) { return std::isdigit(c); })) {
      return MatrixFormat::Phylip;
    }
  }
  if (!lines.empty() && lines[0].find('\t') != std::string::npos) return MatrixFormat::Tsv;
  return MatrixFormat::Csv;
}

}  // namespace detail

template <Scalar T>
RawMatrix<T> parse_matrix(const std::string& text, MatrixFormat format) {
  switch (format) {
    case MatrixFormat::Csv: return detail::parse_delimited<T>(text, ',');
    case MatrixFormat::Tsv: return detail::parse_delimited<T>(text, '\t');
    case MatrixFormat::Phylip: return detail::parse_phylip<T>(text);
    case MatrixFormat::Json: return detail::parse_json_matrix<T>(text);
    case MatrixFormat::Auto: break;
  }
  throw std::invalid_argument("parse_matrix: format must be resolved");
}

/// Reads and validates a distance matrix; the format follows the file
/// extension, falling back to sniffing the contents.
template <Scalar T>
FiniteMetric<T> read_metric(const std::string& path, MatrixFormat format = MatrixFormat::Auto) {
  auto text = read_file(path);
  if (format == MatrixFormat::Auto) format = detail::sniff(path, text);
  auto raw = parse_matrix<T>(text, format);
  return validate_metric(raw.rows, std::move(raw.labels));
}

template <Scalar T>
std::string write_matrix_csv(const FiniteMetric<T>& m, const ValueFormat& f = {}) {
  std::string out;
  for (const auto& l : m.labels()) out += "," + l;
  out += "\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += m.label(i);
    for (std::size_t j = 0; j < m.size(); ++j) out += "," + format_value(m(i, j), f);
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Graphs

template <Scalar T>
json graph_to_json(const WeightedGraph<T>& g, const ValueFormat& f = {}) {
  json vs = json::array();
  for (auto v : g.vertices()) {
    json jv = {{"id", v}, {"label", nullptr}};
    if (const auto& l = g.label(v)) jv["label"] = *l;
    vs.push_back(std::move(jv));
  }
  json es = json::array();
  for (const auto& e : g.edges()) es.push_back({{"u", e.u}, {"v", e.v}, {"weight", format_value(e.weight, f)}});
  return {{"vertices", std::move(vs)}, {"edges", std::move(es)}};
}

template <Scalar T>
WeightedGraph<T> graph_from_json(const json& j) {
  if (!j.is_object() || !j.contains("vertices") || !j.contains("edges")) {
    throw FormatError("graph JSON needs \"vertices\" and \"edges\"");
  }
  WeightedGraph<T> g;
  try {
    for (const auto& v : j["vertices"]) {
      if (!v.contains("id") || !v["id"].is_number_unsigned()) throw FormatError("vertex id must be a nonnegative integer");
      std::optional<std::string> label;
      if (v.contains("label") && !v["label"].is_null()) {
        if (!v["label"].is_string()) throw FormatError("vertex label must be a string or null");
        label = v["label"].get<std::string>();
        if (is_synthetic_label(*label)) throw FormatError("label uses the reserved prefix: " + *label);
      }
      g.add_vertex_with_id(v["id"].get<std::size_t>(), label);
    }
    for (const auto& e : j["edges"]) {
      if (!e.contains("u") || !e.contains("v") || !e.contains("weight")) throw FormatError("edge needs u, v, weight");
      g.add_edge(e["u"].get<std::size_t>(), e["v"].get<std::size_t>(), detail::json_value<T>(e["weight"], "edge weight"));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("graph JSON: ") + e.what());
  }
  if (!g.is_connected()) throw_graph(GraphError::Kind::Disconnected, "input graph");
  return g;
}

template <Scalar T>
WeightedGraph<T> read_graph(const std::string& path) {
  auto text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("graph JSON: ") + e.what());
  }
  return graph_from_json<T>(j);
}

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

/// Labeled vertices filled black, unlabeled ones white; edges labeled by weight.
template <Scalar T>
std::string graph_to_dot(const WeightedGraph<T>& g, const ValueFormat& f = {}) {
  std::string out = "graph cactus {\n  node [shape=circle];\n";
  for (auto v : g.vertices()) {
    out += "  " + std::to_string(v);
    if (const auto& l = g.label(v)) {
      out += " [label=\"" + dot_escape(*l) + "\", style=filled, fillcolor=black, fontcolor=white];\n";
    } else {
      out += " [label=\"\", style=filled, fillcolor=white];\n";
    }
  }
  for (const auto& e : g.edges()) {
    out += "  " + std::to_string(e.u) + " -- " + std::to_string(e.v) + " [label=\"" + format_value(e.weight, f) +
           "\"];\n";
  }
  return out + "}\n";
}

// ---------------------------------------------------------------------------
// Reports

inline json certificate_to_json(const Certificate& c) {
  return {{"verified_metric_equality", c.verified_metric_equality},
          {"per_cycle_no_slack", c.per_cycle_no_slack},
          {"x_cactus_invariants", c.x_cactus_invariants}};
}

inline json rejection_to_json(const Rejection& r) {
  json j = {{"stage", r.stage}, {"reason", r.reason}};
  j["leaf"] = r.leaf ? json(*r.leaf) : json(nullptr);
  j["leaf_labels"] = r.leaf_labels;
  if (r.step) j["step"] = r.step;
  j["witness"] = r.witness;
  return j;
}

template <Scalar T>
json metric_to_json(const FiniteMetric<T>& m, const ValueFormat& f = {}) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.size(); ++j) row.push_back(format_value(m(i, j), f));
    rows.push_back(std::move(row));
  }
  return {{"labels", std::vector<std::string>(m.labels().begin(), m.labels().end())}, {"matrix", std::move(rows)}};
}

template <Scalar T>
json decomposition_to_json(const DecompositionTree<T>& t, const ValueFormat& f = {}) {
  json leaves = json::array();
  for (const auto& leaf : t.leaves) leaves.push_back(metric_to_json(leaf, f));
  json cuts = json::array();
  for (const auto& c : t.cut_points) {
    json jc = {{"kind", c.kind == CutPoint<T>::Kind::Labeled ? "labeled" : "virtual"}, {"label", c.label}};
    if (c.kind == CutPoint<T>::Kind::Virtual) {
      json d = json::object();
      for (const auto& [l, v] : c.distances) d[l] = format_value(v, f);
      jc["distances"] = std::move(d);
    }
    jc["partition"] = c.partition;
    cuts.push_back(std::move(jc));
  }
  return {{"k", t.k()}, {"leaves", std::move(leaves)}, {"cut_points", std::move(cuts)}, {"incidence", t.incidence}};
}

template <Scalar T>
json compactification_to_json(const Compactification<T>& c, const ValueFormat& f = {}) {
  json steps = json::array();
  for (const auto& s : c.steps) {
    json js = {{"pivot", s.pivot}};
    js["pivot_label"] = s.pivot_label ? json(*s.pivot_label) : json(nullptr);
    js["deltas"] = {format_value(s.deltas[0], f), format_value(s.deltas[1], f), format_value(s.deltas[2], f)};
    js["new_vertex"] = s.new_vertex;
    js["weight_before"] = format_value(s.weight_before, f);
    js["weight_after"] = format_value(s.weight_after, f);
    js["slack_before"] = s.slack_before;
    js["slack_after"] = s.slack_after;
    steps.push_back(std::move(js));
  }
  return {{"graph", graph_to_json(c.graph, f)},
          {"total_weight", format_value(c.graph.total_weight(), f)},
          {"steps", std::move(steps)}};
}

}  // namespace cactus::io
