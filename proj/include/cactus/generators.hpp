#pragma once

#include "cactus/cycle.hpp"
#include "cactus/graph.hpp"
#include "cactus/metric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace cactus {

/// Deterministic 64-bit generator with platform-independent bounded draws
/// (the standard distributions are implementation-defined).
class Rng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [lo, hi].
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t span = hi - lo;
    if (span == UINT64_MAX) return next();
    const std::uint64_t range = span + 1;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return lo + x % range;
  }

  std::size_t index(std::size_t size) { return static_cast<std::size_t>(uniform(0, size - 1)); }

  /// Uniform in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return unit() < p; }

 private:
  std::mt19937_64 engine_;
};

/// Denominator of every generated weight.
inline constexpr std::int64_t kWeightDenominator = 64;

enum class SlackMode {
  Any,         // cycles are minimal, slack vertices allowed
  AtLeastOne,  // every cycle starts with one or two slack vertices
  None,        // every cycle is an optimal (slack-free) cycle
};

struct GenSpec {
  std::uint64_t seed = 1;
  std::size_t n_labels = 8;
  double cycle_fraction = 0.5;
  Rational weight_min{1};
  Rational weight_max{10};
  std::size_t min_cycle_length = 4;
  std::size_t max_cycle_length = 8;
  SlackMode slack = SlackMode::Any;
  /// Chance per growth step of labeling an unlabeled vertex of degree >= 3.
  double internal_label_prob = 0.15;
};

template <Scalar T>
struct GeneratedInstance {
  WeightedGraph<T> graph;
  FiniteMetric<T> metric;
  std::vector<std::string> labels;  // X, in vertex-id order
  std::string rng = Rng::kAlgorithm;
};

class GeneratorError : public std::runtime_error {
 public:
  enum class Kind { TooLarge, CannotPerturb, BadSpec };
  GeneratorError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

namespace detail {

struct WeightRange {
  std::int64_t lo;  // numerators over kWeightDenominator
  std::int64_t hi;
};

inline WeightRange weight_range(const Rational& min, const Rational& max) {
  auto lo = static_cast<std::int64_t>(std::ceil(min.to_double() * kWeightDenominator));
  auto hi = static_cast<std::int64_t>(std::floor(max.to_double() * kWeightDenominator));
  lo = std::max<std::int64_t>(lo, 1);
  if (hi < lo) throw GeneratorError(GeneratorError::Kind::BadSpec, "empty weight range");
  return {lo, hi};
}

inline std::vector<std::int64_t> draw_weights(Rng& rng, WeightRange r, std::size_t count) {
  std::vector<std::int64_t> w(count);
  for (auto& x : w) x = static_cast<std::int64_t>(rng.uniform(static_cast<std::uint64_t>(r.lo), static_cast<std::uint64_t>(r.hi)));
  return w;
}

/// Number of slack vertices in a cycle with edge weights w, where w[k]
/// joins vertex k and vertex k+1: vertex i is slack iff its two edges are
/// together longer than half the perimeter.
inline std::size_t cycle_slack_count(const std::vector<std::int64_t>& w) {
  const std::int64_t perimeter = std::accumulate(w.begin(), w.end(), std::int64_t{0});
  const std::size_t m = w.size();
  std::size_t count = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (2 * (w[(i + m - 1) % m] + w[i]) > perimeter) ++count;
  }
  return count;
}

inline bool cycle_is_minimal(const std::vector<std::int64_t>& w) {
  const std::int64_t perimeter = std::accumulate(w.begin(), w.end(), std::int64_t{0});
  return std::all_of(w.begin(), w.end(), [&](std::int64_t x) { return 2 * x < perimeter; });
}

/// Cycle with a slack vertex: the two edges at a random vertex take more
/// than half the perimeter, the remaining edges share what is left.
inline std::vector<std::int64_t> draw_slack_cycle_weights(Rng& rng, WeightRange r, std::size_t m) {
  const auto rest = static_cast<std::int64_t>(m - 2);
  if (rest * r.lo >= 2 * r.hi) throw GeneratorError(GeneratorError::Kind::BadSpec, "cycle too long for a slack vertex");
  for (int attempt = 0; attempt < 100000; ++attempt) {
    auto ab = draw_weights(rng, r, 2);
    std::int64_t budget = ab[0] + ab[1] - 1;
    if (budget < rest * r.lo) continue;
    std::vector<std::int64_t> w{ab[0], ab[1]};
    for (std::int64_t k = rest; k > 0; --k) {
      const std::int64_t hi = std::min(r.hi, budget - (k - 1) * r.lo);
      w.push_back(draw_weights(rng, WeightRange{r.lo, hi}, 1)[0]);
      budget -= w.back();
    }
    if (!cycle_is_minimal(w)) continue;
    std::rotate(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(m - 1 - rng.index(m)), w.end());
    return w;
  }
  throw GeneratorError(GeneratorError::Kind::BadSpec, "cannot draw cycle weights for this range");
}

/// Cycle weights matching the slack mode. A 4-cycle without slack must be a
/// rectangle, and slack cycles are built directly; the rest is rejection
/// sampling.
inline std::vector<std::int64_t> draw_cycle_weights(Rng& rng, WeightRange r, std::size_t m, SlackMode mode) {
  if (mode == SlackMode::None && m == 4) {
    auto ab = draw_weights(rng, r, 2);
    return {ab[0], ab[1], ab[0], ab[1]};
  }
  if (mode == SlackMode::AtLeastOne) return draw_slack_cycle_weights(rng, r, m);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    auto w = draw_weights(rng, r, m);
    if (!cycle_is_minimal(w)) continue;
    if (mode == SlackMode::None && cycle_slack_count(w) != 0) continue;
    return w;
  }
  throw GeneratorError(GeneratorError::Kind::BadSpec, "cannot draw cycle weights for this range");
}

template <Scalar T>
T weight_value(std::int64_t numerator) {
  return scalar_traits<T>::from_ratio(numerator, kWeightDenominator);
}

}  // namespace detail

/// Grows a random X-cactus by attaching pendant edges and cycles (one shared
/// vertex each) at uniformly chosen vertices. Every vertex of degree <= 2 is
/// labeled, plus a random subset of the others, for n_labels labels in all;
/// labels are x1..xn in vertex-id order.
template <Scalar T = Rational>
GeneratedInstance<T> gen_cactus(const GenSpec& spec) {
  if (spec.n_labels < 2) throw GeneratorError(GeneratorError::Kind::BadSpec, "n_labels must be >= 2");
  if (spec.min_cycle_length < 4 || spec.max_cycle_length < spec.min_cycle_length) {
    throw GeneratorError(GeneratorError::Kind::BadSpec, "bad cycle length range");
  }
  Rng rng(spec.seed);
  const auto range = detail::weight_range(spec.weight_min, spec.weight_max);
  const std::size_t n = spec.n_labels;

  struct Edge {
    std::size_t u, v;
    std::int64_t w;
  };
  std::vector<std::size_t> degree{0};
  std::vector<char> internal_label{0};
  std::vector<Edge> edges;
  std::size_t must = 1;  // vertices of degree <= 2
  std::size_t extra = 0;  // labeled vertices of degree >= 3

  auto bump = [&](std::size_t v, std::size_t by) {
    const bool was = degree[v] <= 2;
    degree[v] += by;
    if (was && degree[v] > 2) --must;
  };
  auto fresh = [&]() {
    degree.push_back(0);
    internal_label.push_back(0);
    ++must;
    return degree.size() - 1;
  };

  while (must + extra < n) {
    if (spec.internal_label_prob > 0 && rng.bernoulli(spec.internal_label_prob)) {
      std::vector<std::size_t> open;
      for (std::size_t v = 0; v < degree.size(); ++v) {
        if (degree[v] > 2 && !internal_label[v]) open.push_back(v);
      }
      if (!open.empty()) {
        internal_label[open[rng.index(open.size())]] = 1;
        ++extra;
        continue;
      }
    }
    const std::size_t v = rng.index(degree.size());
    // A cycle of length L at v adds L-1 vertices of degree 2; v itself
    // leaves the degree <= 2 set unless it had degree 0.
    const std::size_t lost = (degree[v] == 1 || degree[v] == 2) ? 1 : 0;
    const std::size_t room = n - extra - must + lost;  // new vertices allowed
    std::size_t max_len = std::min(spec.max_cycle_length, room + 1);
    if (max_len >= spec.min_cycle_length && rng.bernoulli(spec.cycle_fraction)) {
      const std::size_t len = static_cast<std::size_t>(rng.uniform(spec.min_cycle_length, max_len));
      auto w = detail::draw_cycle_weights(rng, range, len, spec.slack);
      std::vector<std::size_t> cyc{v};
      for (std::size_t k = 1; k < len; ++k) cyc.push_back(fresh());
      for (std::size_t k = 0; k < len; ++k) edges.push_back({cyc[k], cyc[(k + 1) % len], w[k]});
      for (std::size_t k = 1; k < len; ++k) degree[cyc[k]] = 2;
      bump(v, 2);
    } else {
      std::size_t leaf = fresh();
      edges.push_back({v, leaf, detail::draw_weights(rng, range, 1)[0]});
      bump(v, 1);
      degree[leaf] = 1;
    }
  }

  GeneratedInstance<T> out;
  std::size_t next_label = 1;
  for (std::size_t v = 0; v < degree.size(); ++v) {
    std::optional<std::string> label;
    if (degree[v] <= 2 || internal_label[v]) {
      label = "x" + std::to_string(next_label++);
      out.labels.push_back(*label);
    }
    out.graph.add_vertex(label);
  }
  for (const auto& e : edges) out.graph.add_edge(e.u, e.v, detail::weight_value<T>(e.w));
  out.metric = induced_metric(out.graph, out.labels);
  return out;
}

/// Random X-tree: gen_cactus without cycles.
template <Scalar T = Rational>
GeneratedInstance<T> gen_tree(GenSpec spec) {
  spec.cycle_fraction = 0.0;
  return gen_cactus<T>(spec);
}

struct CycleSpec {
  std::uint64_t seed = 1;
  std::size_t n = 5;
  Rational weight_min{1};
  Rational weight_max{10};
  SlackMode slack = SlackMode::Any;
};

/// A single minimal cycle x1..xn with random weights, and its metric.
template <Scalar T = Rational>
GeneratedInstance<T> gen_cycle(const CycleSpec& spec) {
  if (spec.n < 4) throw GeneratorError(GeneratorError::Kind::BadSpec, "cycle needs n >= 4");
  Rng rng(spec.seed);
  auto w = detail::draw_cycle_weights(rng, detail::weight_range(spec.weight_min, spec.weight_max), spec.n,
                                      spec.slack);
  GeneratedInstance<T> out;
  for (std::size_t k = 0; k < spec.n; ++k) {
    out.labels.push_back("x" + std::to_string(k + 1));
    out.graph.add_vertex(out.labels.back());
  }
  for (std::size_t k = 0; k < spec.n; ++k) out.graph.add_edge(k, (k + 1) % spec.n, detail::weight_value<T>(w[k]));
  out.metric = induced_metric(out.graph, out.labels);
  return out;
}

inline constexpr std::size_t kBruteForceLimit = 8;

/// Exhaustive search over all (n-1)!/2 cyclic orders for a cycle through
/// every point that realizes m and has no slack vertex. Distances on the
/// candidate cycle are computed from arc lengths directly.
template <Scalar T>
std::optional<CyclicOrder<T>> bruteforce_optimal_cycle(const FiniteMetric<T>& m) {
  const std::size_t n = m.size();
  if (n < 4) throw std::invalid_argument("bruteforce_optimal_cycle: need at least 4 points");
  if (n > kBruteForceLimit) {
    throw GeneratorError(GeneratorError::Kind::TooLarge, "bruteforce_optimal_cycle: n = " + std::to_string(n));
  }
  std::vector<std::size_t> rest(n - 1);
  std::iota(rest.begin(), rest.end(), 1);
  std::vector<std::size_t> order(n);
  std::vector<T> prefix(n + 1);
  do {
    if (rest.front() > rest.back()) continue;  // skip mirror images
    order[0] = 0;
    std::copy(rest.begin(), rest.end(), order.begin() + 1);
    prefix[0] = T{};
    for (std::size_t k = 0; k < n; ++k) prefix[k + 1] = prefix[k] + m(order[k], order[(k + 1) % n]);
    const T& perimeter = prefix[n];
    bool ok = true;
    for (std::size_t a = 0; a < n && ok; ++a) {
      for (std::size_t b = a + 1; b < n && ok; ++b) {
        T arc = prefix[b] - prefix[a];
        T other = perimeter - arc;
        const T& shortest = num::lt(other, arc) ? other : arc;
        ok = num::eq(shortest, m(order[a], order[b]));
      }
    }
    for (std::size_t i = 0; i < n && ok; ++i) {
      std::size_t p = order[(i + n - 1) % n], c = order[i], q = order[(i + 1) % n];
      ok = num::eq(m(p, c) + m(c, q), m(p, q));
    }
    if (!ok) continue;
    CyclicOrder<T> out;
    for (std::size_t k = 0; k < n; ++k) {
      out.order.push_back(m.label(order[k]));
      out.weights.push_back(m(order[k], order[(k + 1) % n]));
    }
    return out;
  } while (std::next_permutation(rest.begin(), rest.end()));
  return std::nullopt;
}

/// Adds +-magnitude to one random off-diagonal pair (symmetrically), retrying
/// other pairs and signs until the result is still a metric.
template <Scalar T>
FiniteMetric<T> perturb_metric(const FiniteMetric<T>& m, std::uint64_t seed, const T& magnitude) {
  if (num::is_zero(magnitude)) return m;
  const std::size_t n = m.size();
  std::vector<std::string> labels(m.labels().begin(), m.labels().end());
  Rng rng(seed);
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::size_t i = rng.index(n), j = rng.index(n - 1);
    if (j >= i) ++j;
    const bool up = rng.bernoulli(0.5);
    std::vector<std::vector<T>> rows(n, std::vector<T>(n));
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) rows[a][b] = m(a, b);
    }
    rows[i][j] = up ? m(i, j) + magnitude : m(i, j) - magnitude;
    rows[j][i] = rows[i][j];
    try {
      return validate_metric(rows, labels, /*allow_synthetic=*/true);
    } catch (const MetricError&) {
    }
  }
  throw GeneratorError(GeneratorError::Kind::CannotPerturb, "no valid perturbation after 64 attempts");
}

}  // namespace cactus
