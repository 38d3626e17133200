#pragma once

#include "cactus/scalar.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace cactus {

/// Labels starting with this prefix are reserved for points adjoined during
/// decomposition.
inline constexpr char kSyntheticPrefix = '~';

inline bool is_synthetic_label(std::string_view label) {
  return !label.empty() && label.front() == kSyntheticPrefix;
}

class MetricError : public std::runtime_error {
 public:
  enum class Kind {
    DimensionMismatch,
    TooFewPoints,
    EmptyLabel,
    DuplicateLabel,
    ReservedLabelPrefix,
    NonzeroDiagonal,
    NegativeEntry,
    ZeroOffDiagonal,
    Asymmetric,
    TriangleViolation,
    UnknownLabel,
    SubsetTooSmall,
  };

  MetricError(Kind kind, std::vector<std::string> witness, const std::string& what)
      : std::runtime_error(what), kind_(kind), witness_(std::move(witness)) {}

  Kind kind() const noexcept { return kind_; }
  const std::vector<std::string>& witness() const noexcept { return witness_; }

 private:
  Kind kind_;
  std::vector<std::string> witness_;
};

inline const char* to_string(MetricError::Kind k) {
  using K = MetricError::Kind;
  switch (k) {
    case K::DimensionMismatch: return "DimensionMismatch";
    case K::TooFewPoints: return "TooFewPoints";
    case K::EmptyLabel: return "EmptyLabel";
    case K::DuplicateLabel: return "DuplicateLabel";
    case K::ReservedLabelPrefix: return "ReservedLabelPrefix";
    case K::NonzeroDiagonal: return "NonzeroDiagonal";
    case K::NegativeEntry: return "NegativeEntry";
    case K::ZeroOffDiagonal: return "ZeroOffDiagonal";
    case K::Asymmetric: return "Asymmetric";
    case K::TriangleViolation: return "TriangleViolation";
    case K::UnknownLabel: return "UnknownLabel";
    case K::SubsetTooSmall: return "SubsetTooSmall";
  }
  return "Unknown";
}

namespace detail {
inline std::string join_witness(const std::vector<std::string>& w) {
  std::string s = "(";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ",";
    s += w[i];
  }
  return s + ")";
}

[[noreturn]] inline void throw_metric(MetricError::Kind k, std::vector<std::string> w) {
  std::string what = std::string(to_string(k)) + join_witness(w);
  throw MetricError(k, std::move(w), what);
}
}  // namespace detail

/// A labeled finite metric space. Immutable once built; the only public way
/// to obtain one from untrusted data is validate_metric().
template <Scalar T>
class FiniteMetric {
 public:
  using value_type = T;

  FiniteMetric() = default;

  /// Builds without checking the metric axioms. Callers guarantee them
  /// (shortest-path metrics, restrictions, decomposition output).
  static FiniteMetric trusted(std::vector<std::string> labels, std::vector<T> row_major) {
    FiniteMetric m;
    m.labels_ = std::move(labels);
    m.d_ = std::move(row_major);
    m.index_.reserve(m.labels_.size());
    for (std::size_t i = 0; i < m.labels_.size(); ++i) m.index_.emplace(m.labels_[i], i);
    return m;
  }

  std::size_t size() const noexcept { return labels_.size(); }
  std::span<const std::string> labels() const noexcept { return labels_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }

  const T& operator()(std::size_t i, std::size_t j) const { return d_[i * labels_.size() + j]; }
  const T& at(std::string_view x, std::string_view y) const { return (*this)(index_of(x), index_of(y)); }

  std::optional<std::size_t> find(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t index_of(std::string_view label) const {
    auto i = find(label);
    if (!i) detail::throw_metric(MetricError::Kind::UnknownLabel, {std::string(label)});
    return *i;
  }
  bool contains(std::string_view label) const { return find(label).has_value(); }

  const std::vector<T>& data() const noexcept { return d_; }

  /// Entrywise equality under the numeric policy, same label order.
  friend bool operator==(const FiniteMetric& a, const FiniteMetric& b) {
    if (a.labels_ != b.labels_) return false;
    for (std::size_t i = 0; i < a.d_.size(); ++i) {
      if (!num::eq(a.d_[i], b.d_[i])) return false;
    }
    return true;
  }

 private:
  std::vector<std::string> labels_;
  std::vector<T> d_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Checks labels and metric axioms; throws MetricError naming the first
/// violation and a witness. Synthetic labels are only accepted when
/// `allow_synthetic` is set.
template <Scalar T>
FiniteMetric<T> validate_metric(const std::vector<std::vector<T>>& matrix,
                                std::vector<std::string> labels,
                                bool allow_synthetic = false) {
  using K = MetricError::Kind;
  const std::size_t n = labels.size();
  if (matrix.size() != n) {
    detail::throw_metric(K::DimensionMismatch, {std::to_string(matrix.size()), std::to_string(n)});
  }
  for (const auto& row : matrix) {
    if (row.size() != n) detail::throw_metric(K::DimensionMismatch, {std::to_string(row.size()), std::to_string(n)});
  }
  if (n < 2) detail::throw_metric(K::TooFewPoints, {std::to_string(n)});

  std::unordered_set<std::string> seen;
  for (const auto& l : labels) {
    if (l.empty()) detail::throw_metric(K::EmptyLabel, {});
    if (!allow_synthetic && is_synthetic_label(l)) detail::throw_metric(K::ReservedLabelPrefix, {l});
    if (!seen.insert(l).second) detail::throw_metric(K::DuplicateLabel, {l});
  }

  const T zero{};
  for (std::size_t i = 0; i < n; ++i) {
    if (!num::is_zero(matrix[i][i])) detail::throw_metric(K::NonzeroDiagonal, {labels[i]});
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && num::lt(matrix[i][j], zero)) detail::throw_metric(K::NegativeEntry, {labels[i], labels[j]});
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && num::is_zero(matrix[i][j])) detail::throw_metric(K::ZeroOffDiagonal, {labels[i], labels[j]});
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!num::eq(matrix[i][j], matrix[j][i])) detail::throw_metric(K::Asymmetric, {labels[i], labels[j]});
    }
  }
  // d(x,z) <= d(x,y) + d(y,z); witness is (x, z, y).
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t z = x + 1; z < n; ++z) {
      const T& dxz = matrix[x][z];
      for (std::size_t y = 0; y < n; ++y) {
        if (y == x || y == z) continue;
        if (num::gt(dxz, matrix[x][y] + matrix[y][z])) {
          detail::throw_metric(K::TriangleViolation, {labels[x], labels[z], labels[y]});
        }
      }
    }
  }

  std::vector<T> flat;
  flat.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) flat.push_back(i == j ? zero : (i < j ? matrix[i][j] : matrix[j][i]));
  }
  return FiniteMetric<T>::trusted(std::move(labels), std::move(flat));
}

/// (d(x,z) + d(y,z) - d(x,y)) / 2: the distance from z to the Steiner point
/// of the triple.
template <Scalar T>
T gromov_product(const FiniteMetric<T>& m, std::size_t x, std::size_t y, std::size_t at) {
  return num::half(m(x, at) + m(y, at) - m(x, y));
}
template <Scalar T>
T gromov_product(const FiniteMetric<T>& m, std::string_view x, std::string_view y, std::string_view at) {
  return gromov_product(m, m.index_of(x), m.index_of(y), m.index_of(at));
}

/// True iff c lies on a geodesic from a to b: d(a,c) + d(c,b) = d(a,b).
template <Scalar T>
bool is_between(const FiniteMetric<T>& m, std::size_t a, std::size_t c, std::size_t b) {
  return num::eq(m(a, c) + m(c, b), m(a, b));
}
template <Scalar T>
bool is_between(const FiniteMetric<T>& m, std::string_view a, std::string_view c, std::string_view b) {
  return is_between(m, m.index_of(a), m.index_of(c), m.index_of(b));
}

/// Submetric on the given indices, in the given order.
template <Scalar T>
FiniteMetric<T> restrict_indices(const FiniteMetric<T>& m, std::span<const std::size_t> idx) {
  if (idx.size() < 2) detail::throw_metric(MetricError::Kind::SubsetTooSmall, {std::to_string(idx.size())});
  std::vector<std::string> labels;
  labels.reserve(idx.size());
  for (auto i : idx) labels.push_back(m.label(i));
  std::vector<T> flat;
  flat.reserve(idx.size() * idx.size());
  for (auto i : idx) {
    for (auto j : idx) flat.push_back(m(i, j));
  }
  return FiniteMetric<T>::trusted(std::move(labels), std::move(flat));
}

template <Scalar T>
FiniteMetric<T> restrict(const FiniteMetric<T>& m, std::span<const std::string> subset) {
  std::vector<std::size_t> idx;
  idx.reserve(subset.size());
  std::unordered_set<std::size_t> seen;
  for (const auto& l : subset) {
    auto i = m.index_of(l);
    if (seen.insert(i).second) idx.push_back(i);
  }
  return restrict_indices(m, std::span<const std::size_t>(idx));
}

/// Pair minimizing d; ties go to the smallest (i, j) in label order.
template <Scalar T>
std::pair<std::size_t, std::size_t> closest_pair_indices(const FiniteMetric<T>& m) {
  if (m.size() < 2) detail::throw_metric(MetricError::Kind::TooFewPoints, {std::to_string(m.size())});
  std::pair<std::size_t, std::size_t> best{0, 1};
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      if (num::lt(m(i, j), m(best.first, best.second))) best = {i, j};
    }
  }
  return best;
}

template <Scalar T>
std::pair<std::string, std::string> closest_pair(const FiniteMetric<T>& m) {
  auto [i, j] = closest_pair_indices(m);
  return {m.label(i), m.label(j)};
}

}  // namespace cactus
