#pragma once

#include "cactus/metric.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cactus {

class DecompositionError : public std::runtime_error {
 public:
  enum class Kind { InconsistentF, AxiomViolation };
  DecompositionError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// A point at which the metric splits as a 1-sum. Labeled cut points are
/// existing labels; virtual ones are adjoined under a synthetic "~k" label
/// with distance vector `distances`.
template <Scalar T>
struct CutPoint {
  enum class Kind { Labeled, Virtual };

  Kind kind = Kind::Labeled;
  std::string label;
  std::vector<std::pair<std::string, T>> distances;  // virtual only
  std::vector<std::vector<std::string>> partition;   // branches at the point
};

template <Scalar T>
struct DecompositionTree {
  std::vector<FiniteMetric<T>> leaves;
  std::vector<CutPoint<T>> cut_points;
  std::vector<std::vector<std::size_t>> incidence;  // per cut point, the leaves that contain it

  std::size_t k() const { return leaves.size(); }
};

template <Scalar T>
struct LabeledCut {
  std::string label;
  std::vector<std::vector<std::string>> partition;
};

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), sets_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (a > b) std::swap(a, b);
    parent_[b] = a;
    --sets_;
    return true;
  }
  std::size_t sets() const { return sets_; }

 private:
  std::vector<std::size_t> parent_;
  std::size_t sets_;
};

/// Component ids (0-based, numbered by first appearance) of the separation
/// graph H_c on all points but c: x ~ y iff d(x,y) < d(x,c) + d(c,y).
/// Entry c is -1. Returns the component count.
template <Scalar T>
std::size_t separation_components(const FiniteMetric<T>& m, std::size_t c, std::vector<int>& comp) {
  const std::size_t n = m.size();
  DisjointSets ds(n);
  // c itself is a singleton that we do not count.
  std::size_t target = 1 + 1;
  for (std::size_t x = 0; x < n && ds.sets() > target; ++x) {
    if (x == c) continue;
    const T& dxc = m(x, c);
    for (std::size_t y = x + 1; y < n; ++y) {
      if (y == c) continue;
      if (num::lt(m(x, y), dxc + m(c, y))) ds.unite(x, y);
    }
  }
  comp.assign(n, -1);
  std::map<std::size_t, int> ids;
  for (std::size_t x = 0; x < n; ++x) {
    if (x == c) continue;
    auto [it, inserted] = ids.emplace(ds.find(x), static_cast<int>(ids.size()));
    comp[x] = it->second;
  }
  return ids.size();
}

template <Scalar T>
std::vector<std::vector<std::string>> group_labels(const FiniteMetric<T>& m, const std::vector<int>& comp,
                                                   std::size_t count) {
  std::vector<std::vector<std::string>> out(count);
  for (std::size_t x = 0; x < m.size(); ++x) {
    if (comp[x] >= 0) out[static_cast<std::size_t>(comp[x])].push_back(m.label(x));
  }
  return out;
}

template <Scalar T>
struct SteinerCandidate {
  std::vector<T> f;
  std::vector<int> comp;
  std::size_t components = 0;
};

/// Tests the Steiner point of the triple (i, j, k) as a 1-sum point of m.
///
/// The distances from the point to the triple are the three Gromov products;
/// every other w gets f(w) = max over the triple of d(w,t) - f(t), which is
/// d(w,p) whenever the triple meets at least two branches at p. The point is
/// accepted when the extension by f is a metric and the graph joining u, w
/// with d(u,w) < f(u) + f(w) is disconnected.
template <Scalar T>
std::optional<SteinerCandidate<T>> try_steiner_point(const FiniteMetric<T>& m, std::size_t i, std::size_t j,
                                                     std::size_t k) {
  const std::size_t n = m.size();
  T fi = gromov_product(m, j, k, i);
  T fj = gromov_product(m, i, k, j);
  T fk = gromov_product(m, i, j, k);
  if (!num::positive(fi) || !num::positive(fj) || !num::positive(fk)) return std::nullopt;

  SteinerCandidate<T> cand;
  cand.f.resize(n);
  std::optional<std::size_t> at_point;
  for (std::size_t w = 0; w < n; ++w) {
    if (w == i) {
      cand.f[w] = fi;
    } else if (w == j) {
      cand.f[w] = fj;
    } else if (w == k) {
      cand.f[w] = fk;
    } else {
      T a = m(w, i) - fi, b = m(w, j) - fj, c = m(w, k) - fk;
      T best = num::lt(a, b) ? b : a;
      if (num::lt(best, c)) best = c;
      if (num::lt(best, T{})) return std::nullopt;
      if (num::is_zero(best) && !at_point) at_point = w;
      cand.f[w] = std::move(best);
    }
  }

  // Cheap connectivity pass first: most candidates are rejected here. A
  // point sitting exactly at the candidate is isolated in this graph and is
  // left out of the count.
  DisjointSets ds(n);
  const std::size_t floor = at_point ? 2 : 1;
  for (std::size_t u = 0; u < n && ds.sets() > floor; ++u) {
    for (std::size_t w = u + 1; w < n; ++w) {
      if (num::lt(m(u, w), cand.f[u] + cand.f[w])) ds.unite(u, w);
    }
  }
  std::size_t branches = 0;
  for (std::size_t x = 0; x < n; ++x) {
    if (ds.find(x) == x && !num::is_zero(cand.f[x])) ++branches;
  }
  if (branches < 2) return std::nullopt;

  // Metric axioms of the extension: |f(u) - f(w)| <= d(u,w) <= f(u) + f(w).
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t w = u + 1; w < n; ++w) {
      const T& d = m(u, w);
      if (num::gt(d, cand.f[u] + cand.f[w])) return std::nullopt;
      if (num::gt(cand.f[u], d + cand.f[w]) || num::gt(cand.f[w], d + cand.f[u])) return std::nullopt;
    }
  }
  if (at_point) {
    throw DecompositionError(DecompositionError::Kind::InconsistentF,
                             "InconsistentF: point " + m.label(*at_point) + " coincides with a cut point");
  }

  cand.comp.assign(n, -1);
  std::map<std::size_t, int> ids;
  for (std::size_t x = 0; x < n; ++x) {
    auto [it, inserted] = ids.emplace(ds.find(x), static_cast<int>(ids.size()));
    cand.comp[x] = it->second;
  }
  cand.components = ids.size();
  return cand;
}

template <Scalar T>
std::optional<SteinerCandidate<T>> search_steiner_points(const FiniteMetric<T>& m) {
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        if (auto c = try_steiner_point(m, i, j, k)) return c;
      }
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// First label c (in label order) whose separation graph H_c is disconnected,
/// with the components of H_c.
template <Scalar T>
std::optional<LabeledCut<T>> find_labeled_cut_vertex(const FiniteMetric<T>& m) {
  if (m.size() < 3) throw std::invalid_argument("find_labeled_cut_vertex: need at least 3 points");
  std::vector<int> comp;
  for (std::size_t c = 0; c < m.size(); ++c) {
    std::size_t count = detail::separation_components(m, c, comp);
    if (count >= 2) return LabeledCut<T>{m.label(c), detail::group_labels(m, comp, count)};
  }
  return std::nullopt;
}

/// Searches for an unlabeled point at which m splits as a 1-sum.
///
/// Candidates are Steiner points of triples scanned in lexicographic index
/// order (so every triple through the first label comes first). Meant for
/// metrics without a labeled cut vertex; throws InconsistentF when a valid
/// split point coincides with a label.
template <Scalar T>
std::optional<CutPoint<T>> find_virtual_cut_point(const FiniteMetric<T>& m, std::string synthetic_label = "~1") {
  if (m.size() < 3) throw std::invalid_argument("find_virtual_cut_point: need at least 3 points");
  auto cand = detail::search_steiner_points(m);
  if (!cand) return std::nullopt;
  CutPoint<T> p;
  p.kind = CutPoint<T>::Kind::Virtual;
  p.label = std::move(synthetic_label);
  for (std::size_t x = 0; x < m.size(); ++x) p.distances.emplace_back(m.label(x), cand->f[x]);
  p.partition = detail::group_labels(m, cand->comp, cand->components);
  return p;
}

/// Extends m by a virtual point; the new label is appended last.
template <Scalar T>
FiniteMetric<T> adjoin_point(const FiniteMetric<T>& m, const CutPoint<T>& p) {
  const std::size_t n = m.size();
  if (p.kind != CutPoint<T>::Kind::Virtual) throw std::invalid_argument("adjoin_point: not a virtual point");
  if (m.contains(p.label)) {
    throw DecompositionError(DecompositionError::Kind::AxiomViolation, "AxiomViolation: label exists: " + p.label);
  }
  std::vector<std::optional<T>> f(n);
  for (const auto& [l, v] : p.distances) f[m.index_of(l)] = v;
  std::vector<std::vector<T>> rows(n + 1, std::vector<T>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    if (!f[i]) {
      throw DecompositionError(DecompositionError::Kind::AxiomViolation,
                               "AxiomViolation: no distance for " + m.label(i));
    }
    for (std::size_t j = 0; j < n; ++j) rows[i][j] = m(i, j);
    rows[i][n] = *f[i];
    rows[n][i] = *f[i];
  }
  std::vector<std::string> labels(m.labels().begin(), m.labels().end());
  labels.push_back(p.label);
  try {
    return validate_metric(rows, std::move(labels), /*allow_synthetic=*/true);
  } catch (const MetricError& e) {
    throw DecompositionError(DecompositionError::Kind::AxiomViolation, std::string("AxiomViolation: ") + e.what());
  }
}

/// Called on cut-free components of size >= 4 before the virtual cut-point
/// search; returning true makes the component a leaf.
template <Scalar T>
using LeafHook = std::function<bool(const FiniteMetric<T>&)>;

/// Splits m recursively at labeled and virtual cut points until every
/// component is a block.
///
/// Labeled cut points are found once on the input (one separation graph per
/// label); a sub-component inherits them by restriction. Components produced
/// by a virtual split have no labeled cut point, so only the virtual search
/// runs there.
template <Scalar T>
DecompositionTree<T> decompose(const FiniteMetric<T>& m, const LeafHook<T>& hook = {}) {
  const std::size_t n0 = m.size();
  if (n0 < 2) detail::throw_metric(MetricError::Kind::TooFewPoints, {std::to_string(n0)});

  // Universe of points: original labels, then adjoined virtual points. Rows
  // of virtual points are only filled for the component they were found in.
  std::vector<std::string> labels(m.labels().begin(), m.labels().end());
  std::vector<std::vector<T>> dist(n0, std::vector<T>(n0));
  for (std::size_t i = 0; i < n0; ++i) {
    for (std::size_t j = 0; j < n0; ++j) dist[i][j] = m(i, j);
  }
  auto sub_metric = [&](const std::vector<std::size_t>& members) {
    std::vector<std::string> ls;
    std::vector<T> flat;
    flat.reserve(members.size() * members.size());
    for (auto i : members) {
      ls.push_back(labels[i]);
      for (auto j : members) flat.push_back(dist[i][j]);
    }
    return FiniteMetric<T>::trusted(std::move(ls), std::move(flat));
  };

  std::vector<std::vector<int>> cut_comp(n0);
  if (n0 >= 3) {
    std::vector<int> comp;
    for (std::size_t c = 0; c < n0; ++c) {
      if (detail::separation_components(m, c, comp) >= 2) cut_comp[c] = comp;
    }
  }

  DecompositionTree<T> out;
  std::map<std::size_t, std::size_t> cut_index;  // universe index -> cut_points slot

  struct Work {
    std::vector<std::size_t> members;  // ascending universe indices
    bool labeled_cuts_possible;
  };
  std::vector<Work> stack;
  {
    Work all{std::vector<std::size_t>(n0), true};
    std::iota(all.members.begin(), all.members.end(), 0);
    stack.push_back(std::move(all));
  }

  auto push_parts = [&](std::vector<std::vector<std::size_t>> parts, std::size_t at, bool labeled) {
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
      it->push_back(at);
      std::sort(it->begin(), it->end());
      stack.push_back(Work{std::move(*it), labeled});
    }
  };

  std::size_t next_virtual = 1;
  while (!stack.empty()) {
    Work w = std::move(stack.back());
    stack.pop_back();
    const auto& S = w.members;

    if (S.size() == 2) {
      out.leaves.push_back(sub_metric(S));
      continue;
    }

    if (w.labeled_cuts_possible) {
      bool split = false;
      for (auto c : S) {
        if (c >= n0 || cut_comp[c].empty()) continue;
        std::map<int, std::vector<std::size_t>> groups;
        for (auto x : S) {
          if (x != c) groups[cut_comp[c][x]].push_back(x);
        }
        if (groups.size() < 2) continue;
        std::vector<std::vector<std::size_t>> parts;
        CutPoint<T> cp;
        cp.kind = CutPoint<T>::Kind::Labeled;
        cp.label = labels[c];
        for (auto& [_, g] : groups) {
          std::vector<std::string> names;
          for (auto x : g) names.push_back(labels[x]);
          cp.partition.push_back(std::move(names));
          parts.push_back(std::move(g));
        }
        if (!cut_index.count(c)) {
          cut_index[c] = out.cut_points.size();
          out.cut_points.push_back(std::move(cp));
        }
        push_parts(std::move(parts), c, true);
        split = true;
        break;
      }
      if (split) continue;
    }

    auto sub = sub_metric(S);
    if (S.size() >= 4 && hook && hook(sub)) {
      out.leaves.push_back(std::move(sub));
      continue;
    }

    auto cand = detail::search_steiner_points(sub);
    if (!cand) {
      out.leaves.push_back(std::move(sub));
      continue;
    }

    const std::size_t p = labels.size();
    CutPoint<T> cp;
    cp.kind = CutPoint<T>::Kind::Virtual;
    cp.label = std::string(1, kSyntheticPrefix) + std::to_string(next_virtual++);
    labels.push_back(cp.label);
    for (auto& row : dist) row.emplace_back();
    dist.emplace_back(p + 1);
    for (std::size_t s = 0; s < S.size(); ++s) {
      dist[S[s]][p] = cand->f[s];
      dist[p][S[s]] = cand->f[s];
      cp.distances.emplace_back(labels[S[s]], cand->f[s]);
    }
    std::vector<std::vector<std::size_t>> parts(cand->components);
    for (std::size_t s = 0; s < S.size(); ++s) parts[static_cast<std::size_t>(cand->comp[s])].push_back(S[s]);
    for (const auto& part : parts) {
      std::vector<std::string> names;
      for (auto x : part) names.push_back(labels[x]);
      cp.partition.push_back(std::move(names));
    }
    cut_index[p] = out.cut_points.size();
    out.cut_points.push_back(std::move(cp));
    push_parts(std::move(parts), p, false);
  }

  out.incidence.assign(out.cut_points.size(), {});
  for (std::size_t l = 0; l < out.leaves.size(); ++l) {
    for (std::size_t c = 0; c < out.cut_points.size(); ++c) {
      if (out.leaves[l].contains(out.cut_points[c].label)) out.incidence[c].push_back(l);
    }
  }
  return out;
}

}  // namespace cactus
