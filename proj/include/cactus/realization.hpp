#pragma once

#include "cactus/cycle.hpp"
#include "cactus/decomposition.hpp"
#include "cactus/graph.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace cactus {

// ---------------------------------------------------------------------------
// Slack in a cactus

/// A cycle vertex whose two cycle edges are not jointly a geodesic.
template <Scalar T>
struct SlackVertex {
  VertexId vertex;
  VertexId prev;
  VertexId next;
  std::array<T, 3> deltas;  // at prev, vertex, next
};

/// Slack vertices of every cycle block of g, measured in the shortest-path
/// metric of the whole graph, ordered by vertex id.
template <Scalar T>
std::vector<SlackVertex<T>> graph_slack_vertices(const WeightedGraph<T>& g) {
  std::vector<SlackVertex<T>> out;
  for (const auto& b : blocks(g).blocks) {
    if (!b.is_cycle()) continue;
    auto order = cycle_order(g, b);
    const std::size_t m = order.size();
    std::vector<std::vector<std::optional<T>>> dist;
    dist.reserve(m);
    for (auto v : order) dist.push_back(shortest_distances(g, v));
    for (std::size_t i = 0; i < m; ++i) {
      std::size_t ip = (i + m - 1) % m, in = (i + 1) % m;
      const T& d_pc = *dist[ip][order[i]];
      const T& d_cn = *dist[i][order[in]];
      const T& d_pn = *dist[ip][order[in]];
      T slack = num::half(d_pc + d_cn - d_pn);
      if (!num::positive(slack)) continue;
      out.push_back(SlackVertex<T>{order[i], order[ip], order[in],
                                   {num::half(d_pc + d_pn - d_cn), slack, num::half(d_cn + d_pn - d_pc)}});
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.vertex < b.vertex; });
  return out;
}

// ---------------------------------------------------------------------------
// Compactification

template <Scalar T>
struct CompactificationStep {
  VertexId pivot;
  std::optional<std::string> pivot_label;
  std::array<T, 3> deltas;  // at v_{i-1}, v_i, v_{i+1}
  VertexId new_vertex;
  T weight_before;
  T weight_after;
  std::size_t slack_before = 0;
  std::size_t slack_after = 0;
};

template <Scalar T>
struct Compactification {
  WeightedGraph<T> graph;
  std::vector<CompactificationStep<T>> steps;
};

/// Turns a minimal X-cactus realization into the optimal one by repeatedly
/// replacing the two cycle edges at a slack vertex v_i with a three-edge star
/// (arms Δ_{i-1}, Δ_i, Δ_{i+1}) and suppressing unlabeled degree-2 vertices.
/// The slack vertex with the smallest id goes first.
///
/// Preconditions (checked): after suppression g is an X-cactus, has no
/// 3-cycles, and is a minimal realization of its metric on X. Pass
/// check_minimal = false to skip the O(|E| * APSP) minimality test.
template <Scalar T>
Compactification<T> compactify(const WeightedGraph<T>& input, const std::vector<std::string>& x,
                               bool check_minimal = true) {
  Compactification<T> out;
  auto& g = out.graph;
  try {
    g = suppress_unlabeled_degree2(input);
  } catch (const GraphError& e) {
    throw_graph(GraphError::Kind::PreconditionViolation, e.what());
  }
  if (!is_x_cactus(g, x)) throw_graph(GraphError::Kind::PreconditionViolation, "not an X-cactus");
  for (const auto& b : blocks(g).blocks) {
    if (b.is_cycle() && b.vertices.size() == 3) {
      throw_graph(GraphError::Kind::PreconditionViolation, "3-cycle present; normalize triangles first");
    }
  }
  if (check_minimal && !is_minimal_realization(g, induced_metric(g, x))) {
    throw_graph(GraphError::Kind::PreconditionViolation, "not a minimal realization");
  }

  auto slack = graph_slack_vertices(g);
  const std::size_t limit = 2 * cycle_count(g) + 1;
  while (!slack.empty()) {
    if (out.steps.size() > limit) throw std::logic_error("compactify: slack count failed to decrease");
    const auto s = slack.front();
    CompactificationStep<T> step{s.vertex, g.label(s.vertex), s.deltas, s.vertex, g.total_weight(), T{},
                                 slack.size(), 0};

    g.remove_edge(s.prev, s.vertex);
    g.remove_edge(s.vertex, s.next);
    const std::array<VertexId, 3> corner{s.prev, s.vertex, s.next};
    std::optional<VertexId> center;
    if (num::is_zero(s.deltas[0])) center = s.prev;
    if (num::is_zero(s.deltas[2])) center = s.next;
    if (!center) center = g.add_vertex();
    for (int k = 0; k < 3; ++k) {
      if (corner[k] != *center) g.add_edge(*center, corner[k], s.deltas[k]);
    }
    step.new_vertex = *center;
    if (*center == s.prev || *center == s.next) g = normalize_triangles(std::move(g));
    g = suppress_unlabeled_degree2(std::move(g));

    slack = graph_slack_vertices(g);
    step.weight_after = g.total_weight();
    step.slack_after = slack.size();
    out.steps.push_back(std::move(step));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Recognition and realization

struct Certificate {
  bool verified_metric_equality = false;
  bool per_cycle_no_slack = false;
  bool x_cactus_invariants = false;

  bool passed() const { return verified_metric_equality && per_cycle_no_slack && x_cactus_invariants; }
};

/// Why a metric was found not to be a cactus metric.
struct Rejection {
  std::string stage;   // "leaf", "glue" or "certificate"
  std::string reason;  // NotCyclelike reason, "ThreePointLeaf", "RealizationMismatch", ...
  std::optional<std::size_t> leaf;
  std::vector<std::string> leaf_labels;
  std::size_t step = 0;
  std::vector<std::string> witness;
};

template <Scalar T>
struct RealizationResult {
  std::optional<WeightedGraph<T>> graph;
  Certificate certificate;
  std::optional<Rejection> rejection;
  std::size_t leaf_count = 0;
  std::size_t virtual_points = 0;

  bool realized() const { return graph.has_value(); }
};

class NotCactusMetric : public std::runtime_error {
 public:
  explicit NotCactusMetric(Rejection r)
      : std::runtime_error("not a cactus metric: " + r.stage + "/" + r.reason), rejection_(std::move(r)) {}
  const Rejection& rejection() const noexcept { return rejection_; }

 private:
  Rejection rejection_;
};

/// Certificate for g as the optimal realization of m.
template <Scalar T>
Certificate certify(const WeightedGraph<T>& g, const FiniteMetric<T>& m, Rejection* why = nullptr) {
  Certificate c;
  std::vector<std::string> x(m.labels().begin(), m.labels().end());
  auto mismatch = realization_mismatch(g, m);
  c.verified_metric_equality = !mismatch;
  auto slack = graph_slack_vertices(g);
  c.per_cycle_no_slack = slack.empty();
  c.x_cactus_invariants = is_x_cactus(g, x);
  if (why && !c.passed()) {
    why->stage = "certificate";
    if (mismatch) {
      why->reason = "RealizationMismatch";
      why->witness = {mismatch->first, mismatch->second};
    } else if (!slack.empty()) {
      why->reason = "SlackVertex";
      const auto& l = g.label(slack.front().vertex);
      why->witness = {l ? *l : "#" + std::to_string(slack.front().vertex)};
    } else {
      why->reason = "NotXCactus";
    }
  }
  return c;
}

/// Decides whether m is a cactus metric and, if so, builds its unique
/// optimal realization: decompose into blocks, realize each block as an edge
/// or an optimal cycle, glue at the cut points, forget synthetic labels and
/// suppress unlabeled degree-2 vertices, then certify the result.
template <Scalar T>
RealizationResult<T> realize_cactus(const FiniteMetric<T>& m) {
  RealizationResult<T> res;
  auto is_cycle_block = [](const FiniteMetric<T>& s) {
    return std::holds_alternative<CyclicOrder<T>>(recognize_optimal_cycle(s));
  };
  DecompositionTree<T> tree;
  try {
    tree = decompose(m, LeafHook<T>(is_cycle_block));
  } catch (const DecompositionError& e) {
    res.rejection = Rejection{"decomposition", "InconsistentF", std::nullopt, {}, 0, {e.what()}};
    return res;
  }
  res.leaf_count = tree.k();
  for (const auto& cp : tree.cut_points) {
    if (cp.kind == CutPoint<T>::Kind::Virtual) ++res.virtual_points;
  }

  std::vector<WeightedGraph<T>> parts;
  parts.reserve(tree.k());
  for (std::size_t i = 0; i < tree.k(); ++i) {
    const auto& leaf = tree.leaves[i];
    std::vector<std::string> names(leaf.labels().begin(), leaf.labels().end());
    if (leaf.size() == 2) {
      WeightedGraph<T> e;
      auto a = e.add_vertex(leaf.label(0));
      auto b = e.add_vertex(leaf.label(1));
      e.add_edge(a, b, leaf(0, 1));
      parts.push_back(std::move(e));
      continue;
    }
    if (leaf.size() == 3) {
      res.rejection = Rejection{"leaf", "ThreePointLeaf", i, names, 0, {}};
      return res;
    }
    auto rec = recognize_optimal_cycle(leaf);
    if (auto* bad = std::get_if<NotCyclelike>(&rec)) {
      res.rejection = Rejection{"leaf", to_string(bad->reason), i, names, bad->step, bad->witnesses};
      return res;
    }
    parts.push_back(to_graph(std::get<CyclicOrder<T>>(rec)));
  }

  WeightedGraph<T> g;
  try {
    g = glue(parts);
    for (auto v : g.vertices()) {
      if (const auto& l = g.label(v); l && is_synthetic_label(*l)) g.set_label(v, std::nullopt);
    }
    g = suppress_unlabeled_degree2(std::move(g));
  } catch (const GraphError& e) {
    res.rejection = Rejection{"glue", to_string(e.kind()), std::nullopt, {}, 0, {e.what()}};
    return res;
  }

  Rejection why;
  res.certificate = certify(g, m, &why);
  if (!res.certificate.passed()) {
    res.rejection = std::move(why);
    return res;
  }
  res.graph = std::move(g);
  return res;
}

enum class MetricClass { TreeMetric, Cyclelike, CactusGeneral, NotCactus };

inline const char* to_string(MetricClass c) {
  switch (c) {
    case MetricClass::TreeMetric: return "TreeMetric";
    case MetricClass::Cyclelike: return "Cyclelike";
    case MetricClass::CactusGeneral: return "CactusGeneral";
    case MetricClass::NotCactus: return "NotCactus";
  }
  return "Unknown";
}

template <Scalar T>
MetricClass classify_realization(const RealizationResult<T>& r, std::size_t n_labels) {
  if (!r.realized()) return MetricClass::NotCactus;
  const auto& g = *r.graph;
  const std::size_t cycles = cycle_count(g);
  if (cycles == 0) return MetricClass::TreeMetric;
  if (cycles == 1 && g.vertex_count() == n_labels && g.edge_count() == g.vertex_count()) {
    return MetricClass::Cyclelike;
  }
  return MetricClass::CactusGeneral;
}

template <Scalar T>
MetricClass classify_metric(const FiniteMetric<T>& m) {
  return classify_realization(realize_cactus(m), m.size());
}

/// Total edge weight of the optimal realization; throws NotCactusMetric.
template <Scalar T>
T optimal_weight(const FiniteMetric<T>& m) {
  auto r = realize_cactus(m);
  if (!r.realized()) throw NotCactusMetric(*r.rejection);
  return r.graph->total_weight();
}

}  // namespace cactus
