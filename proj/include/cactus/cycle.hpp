#pragma once

#include "cactus/graph.hpp"
#include "cactus/metric.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace cactus {

/// A cycle through every point of a metric: order[0..m-1], and weights[k] is
/// the weight of the edge {order[k], order[(k+1) % m]}.
template <Scalar T>
struct CyclicOrder {
  std::vector<std::string> order;
  std::vector<T> weights;

  std::size_t size() const { return order.size(); }
};

template <Scalar T>
WeightedGraph<T> to_graph(const CyclicOrder<T>& c) {
  WeightedGraph<T> g;
  std::vector<VertexId> ids;
  for (const auto& l : c.order) ids.push_back(g.add_vertex(l));
  for (std::size_t k = 0; k < c.size(); ++k) g.add_edge(ids[k], ids[(k + 1) % c.size()], c.weights[k]);
  return g;
}

/// Same cycle up to rotation and reflection (labels and weights).
template <Scalar T>
bool same_cycle(const CyclicOrder<T>& a, const CyclicOrder<T>& b) {
  const std::size_t m = a.size();
  if (m != b.size()) return false;
  if (m == 0) return true;
  auto start = std::find(b.order.begin(), b.order.end(), a.order[0]);
  if (start == b.order.end()) return false;
  const std::size_t s = static_cast<std::size_t>(start - b.order.begin());
  for (bool forward : {true, false}) {
    bool ok = true;
    for (std::size_t k = 0; k < m && ok; ++k) {
      std::size_t j = forward ? (s + k) % m : (s + m - k) % m;
      // edge a[k]-a[k+1] maps to b[j]-b[j+1] or b[j]-b[j-1]
      std::size_t edge_b = forward ? j : (j + m - 1) % m;
      ok = a.order[k] == b.order[j] && num::eq(a.weights[k], b.weights[edge_b]);
    }
    if (ok) return true;
  }
  return false;
}

/// Cycle vertices v_i with d(v_{i-1},v_i) + d(v_i,v_{i+1}) > d(v_{i-1},v_{i+1}).
template <Scalar T>
std::vector<std::string> slack_vertices(const CyclicOrder<T>& c, const FiniteMetric<T>& m) {
  const std::size_t n = c.size();
  std::vector<std::size_t> idx;
  for (const auto& l : c.order) idx.push_back(m.index_of(l));
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t prev = idx[(i + n - 1) % n], cur = idx[i], next = idx[(i + 1) % n];
    if (num::gt(m(prev, cur) + m(cur, next), m(prev, next))) out.push_back(c.order[i]);
  }
  return out;
}

/// The cycle realizes m and has no slack vertex, which makes it the unique
/// optimal realization of m.
template <Scalar T>
bool is_optimal_cycle(const CyclicOrder<T>& c, const FiniteMetric<T>& m) {
  if (m.size() < 4) throw std::invalid_argument("is_optimal_cycle: need at least 4 points");
  if (c.size() != m.size()) return false;
  for (const auto& w : c.weights) {
    if (!num::positive(w)) return false;
  }
  return verify_realization(to_graph(c), m) && slack_vertices(c, m).empty();
}

struct NotCyclelike {
  enum class Reason { NoCandidate, AmbiguousCandidate, FailsRealization, SlackVertexFound };
  Reason reason;
  std::size_t step = 0;                // j in step 2, 0 otherwise
  std::vector<std::string> witnesses;  // candidate labels, mismatching pair or slack vertex
};

inline const char* to_string(NotCyclelike::Reason r) {
  switch (r) {
    case NotCyclelike::Reason::NoCandidate: return "NoCandidate";
    case NotCyclelike::Reason::AmbiguousCandidate: return "AmbiguousCandidate";
    case NotCyclelike::Reason::FailsRealization: return "FailsRealization";
    case NotCyclelike::Reason::SlackVertexFound: return "SlackVertexFound";
  }
  return "Unknown";
}

template <Scalar T>
using CycleRecognition = std::variant<CyclicOrder<T>, NotCyclelike>;

/// Decides whether m has an optimal realization that is a cycle through all
/// of its points and, if so, returns that cycle.
///
/// Seeds with the closest pair, then repeatedly extends the path v_0..v_{j-1}
/// by the unique point x closest to v_{j-1} among those with v_{j-1} between
/// v_{j-2} and x, closes the cycle, and accepts only if the closed cycle
/// realizes m without slack vertices. O(n^2).
template <Scalar T>
CycleRecognition<T> recognize_optimal_cycle(const FiniteMetric<T>& m) {
  const std::size_t n = m.size();
  if (n < 4) throw std::invalid_argument("recognize_optimal_cycle: need at least 4 points");

  auto [s0, s1] = closest_pair_indices(m);
  std::vector<std::size_t> path{s0, s1};
  std::vector<char> used(n, 0);
  used[s0] = used[s1] = 1;

  for (std::size_t j = 2; j <= n - 1; ++j) {
    std::size_t a = path[j - 2], b = path[j - 1];
    std::optional<std::size_t> best;
    std::vector<std::size_t> tied;
    for (std::size_t x = 0; x < n; ++x) {
      if (used[x] || !is_between(m, a, b, x)) continue;
      if (!best || num::lt(m(b, x), m(b, *best))) {
        best = x;
        tied.assign(1, x);
      } else if (num::eq(m(b, x), m(b, *best))) {
        tied.push_back(x);
      }
    }
    if (!best) return NotCyclelike{NotCyclelike::Reason::NoCandidate, j, {m.label(a), m.label(b)}};
    if (tied.size() > 1) {
      std::vector<std::string> w;
      for (auto x : tied) w.push_back(m.label(x));
      return NotCyclelike{NotCyclelike::Reason::AmbiguousCandidate, j, std::move(w)};
    }
    path.push_back(*best);
    used[*best] = 1;
  }

  CyclicOrder<T> c;
  for (std::size_t k = 0; k < n; ++k) {
    c.order.push_back(m.label(path[k]));
    c.weights.push_back(m(path[k], path[(k + 1) % n]));
  }
  if (auto bad = realization_mismatch(to_graph(c), m)) {
    return NotCyclelike{NotCyclelike::Reason::FailsRealization, 0, {bad->first, bad->second}};
  }
  if (auto slack = slack_vertices(c, m); !slack.empty()) {
    return NotCyclelike{NotCyclelike::Reason::SlackVertexFound, 0, {slack.front()}};
  }
  return c;
}

class PropertyViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct SlackReport {
  std::size_t count = 0;
  bool adjacent = false;  // meaningful when count == 2
  std::vector<std::string> slack;
};

/// A minimal cycle realization has at most two slack vertices, and two slack
/// vertices are always neighbours. Throws PropertyViolation otherwise.
template <Scalar T>
SlackReport slack_structure_check(const CyclicOrder<T>& c, const FiniteMetric<T>& m) {
  SlackReport r;
  r.slack = slack_vertices(c, m);
  r.count = r.slack.size();
  if (r.count == 2) {
    const std::size_t n = c.size();
    auto pos = [&](const std::string& l) {
      return static_cast<std::size_t>(std::find(c.order.begin(), c.order.end(), l) - c.order.begin());
    };
    std::size_t a = pos(r.slack[0]), b = pos(r.slack[1]);
    r.adjacent = (a + 1) % n == b || (b + 1) % n == a;
  }
  if (r.count > 2 || (r.count == 2 && !r.adjacent)) {
    throw PropertyViolation("slack structure: " + std::to_string(r.count) + " slack vertices" +
                            (r.count == 2 ? " (not adjacent)" : ""));
  }
  return r;
}

}  // namespace cactus
