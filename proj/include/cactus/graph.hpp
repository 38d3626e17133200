#pragma once

#include "cactus/metric.hpp"

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace cactus {

class GraphError : public std::runtime_error {
 public:
  enum class Kind {
    UnknownVertex,
    UnknownLabel,
    DuplicateLabel,
    SelfLoop,
    ParallelEdge,
    MissingEdge,
    NonPositiveWeight,
    Disconnected,
    WouldCreateMultiEdgeConflict,
    DisconnectedUnion,
    ConflictingEdge,
    PreconditionViolation,
  };

  GraphError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

inline const char* to_string(GraphError::Kind k) {
  using K = GraphError::Kind;
  switch (k) {
    case K::UnknownVertex: return "UnknownVertex";
    case K::UnknownLabel: return "UnknownLabel";
    case K::DuplicateLabel: return "DuplicateLabel";
    case K::SelfLoop: return "SelfLoop";
    case K::ParallelEdge: return "ParallelEdge";
    case K::MissingEdge: return "MissingEdge";
    case K::NonPositiveWeight: return "NonPositiveWeight";
    case K::Disconnected: return "Disconnected";
    case K::WouldCreateMultiEdgeConflict: return "WouldCreateMultiEdgeConflict";
    case K::DisconnectedUnion: return "DisconnectedUnion";
    case K::ConflictingEdge: return "ConflictingEdge";
    case K::PreconditionViolation: return "PreconditionViolation";
  }
  return "Unknown";
}

[[noreturn]] inline void throw_graph(GraphError::Kind k, const std::string& detail) {
  throw GraphError(k, std::string(to_string(k)) + ": " + detail);
}

using VertexId = std::size_t;

/// Simple undirected graph with positive edge weights and stable vertex ids.
/// Labels are an optional per-vertex name, unique within the graph.
template <Scalar T>
class WeightedGraph {
 public:
  using value_type = T;

  struct Edge {
    VertexId u;
    VertexId v;
    T weight;
  };

  VertexId add_vertex(std::optional<std::string> label = std::nullopt) {
    VertexId id = nodes_.size();
    nodes_.emplace_back();
    nodes_.back().alive = true;
    ++alive_;
    set_label(id, std::move(label));
    return id;
  }

  /// Adds a vertex with a caller-chosen id (used when loading files).
  void add_vertex_with_id(VertexId id, std::optional<std::string> label) {
    if (id < nodes_.size() && nodes_[id].alive) throw_graph(GraphError::Kind::UnknownVertex, "duplicate vertex id " + std::to_string(id));
    if (id >= nodes_.size()) nodes_.resize(id + 1);
    nodes_[id] = Node{};
    nodes_[id].alive = true;
    ++alive_;
    set_label(id, std::move(label));
  }

  void add_edge(VertexId u, VertexId v, T w) {
    check(u);
    check(v);
    if (u == v) throw_graph(GraphError::Kind::SelfLoop, std::to_string(u));
    if (!num::positive(w)) throw_graph(GraphError::Kind::NonPositiveWeight, edge_name(u, v));
    if (has_edge(u, v)) throw_graph(GraphError::Kind::ParallelEdge, edge_name(u, v));
    nodes_[u].adj.emplace(v, w);
    nodes_[v].adj.emplace(u, std::move(w));
    ++edges_;
  }

  void remove_edge(VertexId u, VertexId v) {
    if (!has_edge(u, v)) throw_graph(GraphError::Kind::MissingEdge, edge_name(u, v));
    nodes_[u].adj.erase(v);
    nodes_[v].adj.erase(u);
    --edges_;
  }

  void remove_vertex(VertexId v) {
    check(v);
    std::vector<VertexId> nbrs;
    for (const auto& [w, _] : nodes_[v].adj) nbrs.push_back(w);
    for (auto w : nbrs) remove_edge(v, w);
    set_label(v, std::nullopt);
    nodes_[v].alive = false;
    --alive_;
  }

  void set_label(VertexId v, std::optional<std::string> label) {
    check(v);
    if (nodes_[v].label) by_label_.erase(*nodes_[v].label);
    if (label) {
      if (label->empty()) throw_graph(GraphError::Kind::UnknownLabel, "empty label");
      auto [it, inserted] = by_label_.emplace(*label, v);
      if (!inserted && it->second != v) throw_graph(GraphError::Kind::DuplicateLabel, *label);
    }
    nodes_[v].label = std::move(label);
  }

  bool contains(VertexId v) const { return v < nodes_.size() && nodes_[v].alive; }
  bool has_edge(VertexId u, VertexId v) const {
    return contains(u) && contains(v) && nodes_[u].adj.count(v) != 0;
  }
  const T& weight(VertexId u, VertexId v) const {
    if (!has_edge(u, v)) throw_graph(GraphError::Kind::MissingEdge, edge_name(u, v));
    return nodes_[u].adj.at(v);
  }
  const std::map<VertexId, T>& neighbors(VertexId v) const {
    check(v);
    return nodes_[v].adj;
  }
  std::size_t degree(VertexId v) const { return neighbors(v).size(); }
  const std::optional<std::string>& label(VertexId v) const {
    check(v);
    return nodes_[v].label;
  }
  std::optional<VertexId> find_label(std::string_view l) const {
    auto it = by_label_.find(std::string(l));
    if (it == by_label_.end()) return std::nullopt;
    return it->second;
  }
  VertexId vertex_of(std::string_view l) const {
    auto v = find_label(l);
    if (!v) throw_graph(GraphError::Kind::UnknownLabel, std::string(l));
    return *v;
  }

  std::vector<VertexId> vertices() const {
    std::vector<VertexId> out;
    out.reserve(alive_);
    for (VertexId v = 0; v < nodes_.size(); ++v) {
      if (nodes_[v].alive) out.push_back(v);
    }
    return out;
  }
  /// Edges with u < v, sorted by (u, v).
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edges_);
    for (VertexId u = 0; u < nodes_.size(); ++u) {
      if (!nodes_[u].alive) continue;
      for (const auto& [v, w] : nodes_[u].adj) {
        if (u < v) out.push_back(Edge{u, v, w});
      }
    }
    return out;
  }
  /// Labels in vertex-id order.
  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (VertexId v = 0; v < nodes_.size(); ++v) {
      if (nodes_[v].alive && nodes_[v].label) out.push_back(*nodes_[v].label);
    }
    return out;
  }

  std::size_t vertex_count() const noexcept { return alive_; }
  std::size_t edge_count() const noexcept { return edges_; }
  std::size_t id_bound() const noexcept { return nodes_.size(); }

  T total_weight() const {
    T sum{};
    for (const auto& e : edges()) sum = sum + e.weight;
    return sum;
  }

  bool is_connected() const {
    if (alive_ == 0) return true;
    auto vs = vertices();
    std::vector<char> seen(nodes_.size(), 0);
    std::vector<VertexId> stack{vs.front()};
    seen[vs.front()] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      VertexId v = stack.back();
      stack.pop_back();
      for (const auto& [w, _] : nodes_[v].adj) {
        if (!seen[w]) {
          seen[w] = 1;
          ++count;
          stack.push_back(w);
        }
      }
    }
    return count == alive_;
  }

 private:
  struct Node {
    std::optional<std::string> label;
    std::map<VertexId, T> adj;
    bool alive = false;
  };

  void check(VertexId v) const {
    if (!contains(v)) throw_graph(GraphError::Kind::UnknownVertex, std::to_string(v));
  }
  static std::string edge_name(VertexId u, VertexId v) {
    return "{" + std::to_string(u) + "," + std::to_string(v) + "}";
  }

  std::vector<Node> nodes_;
  std::unordered_map<std::string, VertexId> by_label_;
  std::size_t alive_ = 0;
  std::size_t edges_ = 0;
};

// ---------------------------------------------------------------------------
// Shortest paths

/// Single-source Dijkstra; entry is empty for unreachable (or dead) ids.
template <Scalar T>
std::vector<std::optional<T>> shortest_distances(const WeightedGraph<T>& g, VertexId source) {
  std::vector<std::optional<T>> dist(g.id_bound());
  if (!g.contains(source)) throw_graph(GraphError::Kind::UnknownVertex, std::to_string(source));
  using Item = std::pair<T, VertexId>;
  auto cmp = [](const Item& a, const Item& b) { return b.first < a.first; };
  std::priority_queue<Item, std::vector<Item>, decltype(cmp)> pq(cmp);
  std::vector<char> done(g.id_bound(), 0);
  dist[source] = T{};
  pq.emplace(T{}, source);
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (done[v]) continue;
    done[v] = 1;
    for (const auto& [w, wt] : g.neighbors(v)) {
      if (done[w]) continue;
      T nd = d + wt;
      if (!dist[w] || nd < *dist[w]) {
        dist[w] = nd;
        pq.emplace(std::move(nd), w);
      }
    }
  }
  return dist;
}

template <Scalar T>
T shortest_distance(const WeightedGraph<T>& g, VertexId a, VertexId b) {
  auto dist = shortest_distances(g, a);
  if (!dist[b]) throw_graph(GraphError::Kind::Disconnected, std::to_string(a) + " -/- " + std::to_string(b));
  return *dist[b];
}

/// Shortest-path metric of g restricted to the given labels (in that order).
template <Scalar T>
FiniteMetric<T> induced_metric(const WeightedGraph<T>& g, const std::vector<std::string>& on) {
  const std::size_t n = on.size();
  std::vector<VertexId> ids;
  ids.reserve(n);
  for (const auto& l : on) ids.push_back(g.vertex_of(l));
  std::vector<T> flat(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    auto dist = shortest_distances(g, ids[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!dist[ids[j]]) throw_graph(GraphError::Kind::Disconnected, on[i] + " -/- " + on[j]);
      flat[i * n + j] = *dist[ids[j]];
      flat[j * n + i] = *dist[ids[j]];
    }
  }
  return FiniteMetric<T>::trusted(on, std::move(flat));
}

/// Induced metric on every labeled vertex, in vertex-id order.
template <Scalar T>
FiniteMetric<T> induced_metric(const WeightedGraph<T>& g) {
  return induced_metric(g, g.labels());
}

// ---------------------------------------------------------------------------
// Blocks

struct Block {
  std::vector<VertexId> vertices;  // sorted
  std::vector<std::pair<VertexId, VertexId>> edges;

  bool is_bridge() const { return edges.size() == 1; }
  /// For a biconnected block, |E| == |V| >= 3 means it is exactly a cycle.
  bool is_cycle() const { return vertices.size() >= 3 && edges.size() == vertices.size(); }
};

struct BlockStructure {
  std::vector<Block> blocks;
  std::vector<VertexId> cut_vertices;                   // sorted
  std::vector<std::vector<std::size_t>> cut_incidence;  // block indices per cut vertex
};

/// Biconnected components via an iterative Hopcroft-Tarjan search.
template <Scalar T>
BlockStructure blocks(const WeightedGraph<T>& g) {
  const std::size_t bound = g.id_bound();
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> disc(bound, kUnset), low(bound, 0);
  std::vector<VertexId> parent(bound, kUnset);
  std::vector<std::vector<VertexId>> adj(bound);
  for (auto v : g.vertices()) {
    for (const auto& [w, _] : g.neighbors(v)) adj[v].push_back(w);
  }

  BlockStructure out;
  std::vector<std::pair<VertexId, VertexId>> edge_stack;
  std::size_t time = 0;

  auto emit_block = [&](VertexId p, VertexId v) {
    Block b;
    std::set<VertexId> vs;
    while (!edge_stack.empty()) {
      auto e = edge_stack.back();
      edge_stack.pop_back();
      b.edges.push_back({std::min(e.first, e.second), std::max(e.first, e.second)});
      vs.insert(e.first);
      vs.insert(e.second);
      if (e.first == p && e.second == v) break;
    }
    std::sort(b.edges.begin(), b.edges.end());
    b.vertices.assign(vs.begin(), vs.end());
    out.blocks.push_back(std::move(b));
  };

  for (auto root : g.vertices()) {
    if (disc[root] != kUnset) continue;
    disc[root] = low[root] = time++;
    std::vector<std::pair<VertexId, std::size_t>> frames{{root, 0}};
    while (!frames.empty()) {
      auto& [v, next] = frames.back();
      if (next < adj[v].size()) {
        VertexId w = adj[v][next++];
        if (w == parent[v]) continue;
        if (disc[w] == kUnset) {
          parent[w] = v;
          disc[w] = low[w] = time++;
          edge_stack.push_back({v, w});
          frames.push_back({w, 0});
        } else if (disc[w] < disc[v]) {
          edge_stack.push_back({v, w});
          low[v] = std::min(low[v], disc[w]);
        }
      } else {
        VertexId done = v;
        frames.pop_back();
        if (!frames.empty()) {
          VertexId p = frames.back().first;
          low[p] = std::min(low[p], low[done]);
          if (low[done] >= disc[p]) emit_block(p, done);
        }
      }
    }
  }

  std::sort(out.blocks.begin(), out.blocks.end(),
            [](const Block& a, const Block& b) { return a.edges.front() < b.edges.front(); });
  std::map<VertexId, std::vector<std::size_t>> membership;
  for (std::size_t i = 0; i < out.blocks.size(); ++i) {
    for (auto v : out.blocks[i].vertices) membership[v].push_back(i);
  }
  for (auto& [v, bs] : membership) {
    if (bs.size() >= 2) {
      out.cut_vertices.push_back(v);
      out.cut_incidence.push_back(bs);
    }
  }
  return out;
}

/// Vertices of a cycle block in cyclic order, starting at the smallest id and
/// continuing toward its smaller-id neighbour.
template <Scalar T>
std::vector<VertexId> cycle_order(const WeightedGraph<T>& g, const Block& b) {
  std::unordered_set<VertexId> in_block(b.vertices.begin(), b.vertices.end());
  auto block_nbrs = [&](VertexId v) {
    std::vector<VertexId> out;
    for (const auto& [w, _] : g.neighbors(v)) {
      if (in_block.count(w)) out.push_back(w);
    }
    return out;
  };
  std::vector<VertexId> order{b.vertices.front()};
  VertexId prev = b.vertices.front();
  VertexId cur = block_nbrs(prev).front();
  while (cur != order.front()) {
    order.push_back(cur);
    auto nb = block_nbrs(cur);
    VertexId next = nb[0] == prev ? nb[1] : nb[0];
    prev = cur;
    cur = next;
  }
  return order;
}

template <Scalar T>
std::size_t cycle_count(const WeightedGraph<T>& g) {
  if (g.vertex_count() == 0) return 0;
  return g.edge_count() + 1 - g.vertex_count();
}

/// Every block is a bridge or a cycle.
template <Scalar T>
bool is_cactus(const WeightedGraph<T>& g) {
  if (!g.is_connected()) return false;
  for (const auto& b : blocks(g).blocks) {
    if (!b.is_bridge() && !b.is_cycle()) return false;
  }
  return true;
}

/// Cactus whose vertices of degree <= 2 all carry a label from X, and with
/// at most |X| - 2 cycles.
template <Scalar T>
bool is_x_cactus(const WeightedGraph<T>& g, const std::vector<std::string>& x) {
  if (!is_cactus(g)) return false;
  std::unordered_set<std::string> xs(x.begin(), x.end());
  for (const auto& l : x) {
    if (!g.find_label(l)) return false;
  }
  for (auto v : g.vertices()) {
    if (g.degree(v) <= 2) {
      const auto& l = g.label(v);
      if (!l || !xs.count(*l)) return false;
    }
  }
  return cycle_count(g) + 2 <= std::max<std::size_t>(x.size(), 2);
}

/// Non-synthetic labels of g, in vertex-id order.
template <Scalar T>
std::vector<std::string> x_labels(const WeightedGraph<T>& g) {
  std::vector<std::string> out;
  for (auto& l : g.labels()) {
    if (!is_synthetic_label(l)) out.push_back(std::move(l));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Local rewrites

/// Replaces every unlabeled degree-2 vertex u (neighbours a, b) by a single
/// edge a-b of weight w(a,u) + w(u,b). Throws WouldCreateMultiEdgeConflict if
/// a-b already exists.
template <Scalar T>
WeightedGraph<T> suppress_unlabeled_degree2(WeightedGraph<T> g) {
  for (auto v : g.vertices()) {
    if (!g.contains(v) || g.label(v) || g.degree(v) != 2) continue;
    auto it = g.neighbors(v).begin();
    auto [a, wa] = *it++;
    auto [b, wb] = *it;
    if (g.has_edge(a, b)) {
      throw_graph(GraphError::Kind::WouldCreateMultiEdgeConflict,
                  "suppressing vertex " + std::to_string(v) + " duplicates edge {" + std::to_string(a) + "," +
                      std::to_string(b) + "}");
    }
    g.remove_vertex(v);
    g.add_edge(a, b, wa + wb);
  }
  return g;
}

/// Replaces each 3-cycle block by an equivalent tree: a star whose arms are
/// the Gromov products of the corner distances, with zero arms contracted.
/// A non-geodesic triangle edge is simply dropped.
template <Scalar T>
WeightedGraph<T> normalize_triangles(WeightedGraph<T> g) {
  auto bs = blocks(g);
  for (const auto& b : bs.blocks) {
    if (!(b.is_cycle() && b.vertices.size() == 3)) continue;
    const VertexId c[3] = {b.vertices[0], b.vertices[1], b.vertices[2]};
    T w[3][3];
    for (int i = 0; i < 3; ++i) {
      auto dist = shortest_distances(g, c[i]);
      for (int j = 0; j < 3; ++j) w[i][j] = i == j ? T{} : *dist[c[j]];
    }
    // Drop edges that are not geodesics.
    bool dropped = false;
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        if (num::gt(g.weight(c[i], c[j]), w[i][j])) {
          g.remove_edge(c[i], c[j]);
          dropped = true;
        }
      }
    }
    if (dropped) continue;

    T arm[3];
    for (int i = 0; i < 3; ++i) {
      int j = (i + 1) % 3, k = (i + 2) % 3;
      arm[i] = num::half(w[i][j] + w[i][k] - w[j][k]);
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) g.remove_edge(c[i], c[j]);
    }
    std::optional<VertexId> center;
    for (int i = 0; i < 3; ++i) {
      if (num::is_zero(arm[i])) center = c[i];
    }
    if (!center) center = g.add_vertex();
    for (int i = 0; i < 3; ++i) {
      if (c[i] != *center) g.add_edge(*center, c[i], arm[i]);
    }
  }
  return g;
}

/// Disjoint union with equally labeled vertices identified.
template <Scalar T>
WeightedGraph<T> glue(const std::vector<WeightedGraph<T>>& parts) {
  WeightedGraph<T> out;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const auto& part = parts[p];
    std::unordered_map<VertexId, VertexId> map;
    for (auto v : part.vertices()) {
      const auto& l = part.label(v);
      if (l) {
        if (auto existing = out.find_label(*l)) {
          map[v] = *existing;
          continue;
        }
      }
      map[v] = out.add_vertex(l);
    }
    for (const auto& e : part.edges()) {
      VertexId a = map[e.u], b = map[e.v];
      if (out.has_edge(a, b)) {
        if (!num::eq(out.weight(a, b), e.weight)) {
          throw_graph(GraphError::Kind::ConflictingEdge,
                      "part " + std::to_string(p) + " redefines edge {" + *out.label(a) + "," + *out.label(b) + "}");
        }
        continue;
      }
      out.add_edge(a, b, e.weight);
    }
  }
  if (!out.is_connected()) throw_graph(GraphError::Kind::DisconnectedUnion, std::to_string(parts.size()) + " parts");
  return out;
}

// ---------------------------------------------------------------------------
// Realization checks

/// First label pair whose graph distance differs from m, if any.
template <Scalar T>
std::optional<std::pair<std::string, std::string>> realization_mismatch(const WeightedGraph<T>& g,
                                                                        const FiniteMetric<T>& m) {
  std::vector<VertexId> ids;
  ids.reserve(m.size());
  for (const auto& l : m.labels()) {
    auto v = g.find_label(l);
    if (!v) throw_graph(GraphError::Kind::UnknownLabel, l);
    ids.push_back(*v);
  }
  for (std::size_t i = 0; i < m.size(); ++i) {
    auto dist = shortest_distances(g, ids[i]);
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      if (!dist[ids[j]] || !num::eq(*dist[ids[j]], m(i, j))) return std::pair{m.label(i), m.label(j)};
    }
  }
  return std::nullopt;
}

template <Scalar T>
bool verify_realization(const WeightedGraph<T>& g, const FiniteMetric<T>& m) {
  return !realization_mismatch(g, m).has_value();
}

/// No edge can be removed while keeping g a realization of m.
template <Scalar T>
bool is_minimal_realization(const WeightedGraph<T>& g, const FiniteMetric<T>& m) {
  for (const auto& e : g.edges()) {
    WeightedGraph<T> h = g;
    h.remove_edge(e.u, e.v);
    if (!h.is_connected()) continue;
    if (verify_realization(h, m)) return false;
  }
  return true;
}

/// Label- and weight-preserving isomorphism test. Labeled vertices are pinned
/// by label; unlabeled ones are matched by backtracking in BFS order from the
/// labeled set.
template <Scalar T>
bool labeled_isomorphic(const WeightedGraph<T>& g1, const WeightedGraph<T>& g2) {
  if (g1.vertex_count() != g2.vertex_count() || g1.edge_count() != g2.edge_count()) return false;
  auto l1 = g1.labels(), l2 = g2.labels();
  std::sort(l1.begin(), l1.end());
  std::sort(l2.begin(), l2.end());
  if (l1 != l2) return false;

  std::unordered_map<VertexId, VertexId> fwd;
  std::unordered_set<VertexId> used;
  for (auto v : g1.vertices()) {
    if (const auto& l = g1.label(v)) {
      VertexId w = *g2.find_label(*l);
      if (g1.degree(v) != g2.degree(w)) return false;
      fwd[v] = w;
      used.insert(w);
    }
  }

  // BFS order over unlabeled vertices, seeded from the labeled ones.
  std::vector<VertexId> order;
  {
    std::unordered_set<VertexId> seen;
    std::queue<VertexId> q;
    for (auto v : g1.vertices()) {
      if (g1.label(v)) {
        seen.insert(v);
        q.push(v);
      }
    }
    auto drain = [&]() {
      while (!q.empty()) {
        VertexId v = q.front();
        q.pop();
        for (const auto& [w, _] : g1.neighbors(v)) {
          if (seen.insert(w).second) {
            order.push_back(w);
            q.push(w);
          }
        }
      }
    };
    drain();
    for (auto v : g1.vertices()) {
      if (seen.insert(v).second) {
        order.push_back(v);
        q.push(v);
        drain();
      }
    }
  }

  std::vector<VertexId> unlabeled2;
  for (auto v : g2.vertices()) {
    if (!g2.label(v)) unlabeled2.push_back(v);
  }

  auto consistent = [&](VertexId v, VertexId c) {
    if (g1.degree(v) != g2.degree(c)) return false;
    for (const auto& [n, w] : g1.neighbors(v)) {
      auto it = fwd.find(n);
      if (it == fwd.end()) continue;
      if (!g2.has_edge(c, it->second) || !num::eq(g2.weight(c, it->second), w)) return false;
    }
    return true;
  };

  std::function<bool(std::size_t)> extend = [&](std::size_t k) -> bool {
    if (k == order.size()) {
      for (const auto& e : g1.edges()) {
        VertexId a = fwd.at(e.u), b = fwd.at(e.v);
        if (!g2.has_edge(a, b) || !num::eq(g2.weight(a, b), e.weight)) return false;
      }
      return true;
    }
    VertexId v = order[k];
    std::vector<VertexId> candidates;
    std::optional<VertexId> anchor;
    for (const auto& [n, _] : g1.neighbors(v)) {
      if (fwd.count(n)) {
        anchor = fwd.at(n);
        break;
      }
    }
    if (anchor) {
      for (const auto& [c, _] : g2.neighbors(*anchor)) {
        if (!g2.label(c) && !used.count(c)) candidates.push_back(c);
      }
    } else {
      for (auto c : unlabeled2) {
        if (!used.count(c)) candidates.push_back(c);
      }
    }
    for (auto c : candidates) {
      if (!consistent(v, c)) continue;
      fwd[v] = c;
      used.insert(c);
      if (extend(k + 1)) return true;
      fwd.erase(v);
      used.erase(c);
    }
    return false;
  };
  return extend(0);
}

}  // namespace cactus
