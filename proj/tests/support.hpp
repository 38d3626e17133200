#pragma once

// Independent reference implementations used to check the library. None of
// these call into the code they are checking beyond the plain data types.

#include "cactus/cactus.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace testing_support {

using cactus::Rational;
using cactus::VertexId;
using cactus::WeightedGraph;
using cactus::FiniteMetric;

using R = Rational;

struct EdgeSpec {
  std::string u;
  std::string v;
  R w;
};

/// Graph from labeled edges; names starting with '_' become unlabeled
/// vertices. Vertex ids follow first appearance.
template <typename T = R>
WeightedGraph<T> build(const std::vector<EdgeSpec>& edges) {
  WeightedGraph<T> g;
  std::map<std::string, VertexId> id;
  auto vertex = [&](const std::string& name) {
    auto it = id.find(name);
    if (it != id.end()) return it->second;
    std::optional<std::string> label;
    if (name.front() != '_') label = name;
    auto v = g.add_vertex(label);
    id.emplace(name, v);
    return v;
  };
  for (const auto& e : edges) {
    auto a = vertex(e.u);
    auto b = vertex(e.v);
    if constexpr (std::is_same_v<T, double>) {
      g.add_edge(a, b, e.w.to_double());
    } else {
      g.add_edge(a, b, e.w);
    }
  }
  return g;
}

/// Cycle x[0]..x[m-1] with w[k] on the edge x[k]-x[k+1].
inline WeightedGraph<R> cycle_graph(const std::vector<std::string>& x, const std::vector<R>& w) {
  std::vector<EdgeSpec> e;
  for (std::size_t k = 0; k < x.size(); ++k) e.push_back({x[k], x[(k + 1) % x.size()], w[k]});
  return build(e);
}

inline FiniteMetric<R> metric(const std::vector<std::vector<R>>& rows, std::vector<std::string> labels) {
  return cactus::validate_metric(rows, std::move(labels));
}

/// All-pairs shortest paths by Floyd-Warshall over the whole vertex set,
/// reported on the given labels.
template <typename T>
std::vector<std::vector<std::optional<T>>> floyd(const WeightedGraph<T>& g) {
  const std::size_t n = g.id_bound();
  std::vector<std::vector<std::optional<T>>> d(n, std::vector<std::optional<T>>(n));
  for (auto v : g.vertices()) d[v][v] = T{};
  for (const auto& e : g.edges()) {
    d[e.u][e.v] = e.weight;
    d[e.v][e.u] = e.weight;
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!d[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (!d[k][j]) continue;
        T via = *d[i][k] + *d[k][j];
        if (!d[i][j] || via < *d[i][j]) d[i][j] = via;
      }
    }
  }
  return d;
}

template <typename T>
FiniteMetric<T> floyd_metric(const WeightedGraph<T>& g, const std::vector<std::string>& labels) {
  auto d = floyd(g);
  std::vector<T> flat;
  for (const auto& a : labels) {
    for (const auto& b : labels) flat.push_back(*d[*g.find_label(a)][*g.find_label(b)]);
  }
  return FiniteMetric<T>::trusted(labels, flat);
}

template <typename T>
bool connected_without(const WeightedGraph<T>& g, std::optional<VertexId> skip,
                       std::optional<std::pair<VertexId, VertexId>> skip_edge = std::nullopt) {
  auto vs = g.vertices();
  std::vector<VertexId> keep;
  for (auto v : vs) {
    if (!skip || v != *skip) keep.push_back(v);
  }
  if (keep.empty()) return true;
  std::vector<char> seen(g.id_bound(), 0);
  std::vector<VertexId> stack{keep.front()};
  seen[keep.front()] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    for (const auto& [w, _] : g.neighbors(v)) {
      if ((skip && w == *skip) || seen[w]) continue;
      if (skip_edge && ((v == skip_edge->first && w == skip_edge->second) ||
                        (v == skip_edge->second && w == skip_edge->first))) {
        continue;
      }
      seen[w] = 1;
      ++count;
      stack.push_back(w);
    }
  }
  return count == keep.size();
}

/// Articulation points by brute force: removing v disconnects the rest.
template <typename T>
std::vector<VertexId> articulation_points(const WeightedGraph<T>& g) {
  std::vector<VertexId> out;
  for (auto v : g.vertices()) {
    if (!connected_without(g, v)) out.push_back(v);
  }
  return out;
}

/// Edges whose removal keeps the graph connected (the edges on cycles).
template <typename T>
std::size_t non_bridge_edges(const WeightedGraph<T>& g) {
  std::size_t count = 0;
  for (const auto& e : g.edges()) {
    if (connected_without(g, std::nullopt, std::pair{e.u, e.v})) ++count;
  }
  return count;
}

/// Shortest arc distance between positions a and b on a cycle with edge
/// weights w (w[k] joins k and k+1).
inline R arc_distance(const std::vector<R>& w, std::size_t a, std::size_t b) {
  if (a > b) std::swap(a, b);
  R inner{}, total{};
  for (std::size_t k = 0; k < w.size(); ++k) {
    total = total + w[k];
    if (k >= a && k < b) inner = inner + w[k];
  }
  R outer = total - inner;
  return inner < outer ? inner : outer;
}

inline std::vector<std::string> names(const char* prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

inline std::vector<std::string> labels_of(const FiniteMetric<R>& m) {
  return {m.labels().begin(), m.labels().end()};
}

}  // namespace testing_support
