#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "distort/error.hpp"

namespace distort {

using Index = std::size_t;

/// A finitely supported real sequence (x_i)_{i>=1}.
///
/// Entries are kept sorted by index with no stored zeros, so two vectors
/// are equal exactly when their supports and values agree. Instances are
/// immutable once built.
class FiniteVector {
 public:
  using Entry = std::pair<Index, double>;
  using const_iterator = std::vector<Entry>::const_iterator;

  FiniteVector() = default;

  /// Indices must be >= 1 and strictly increasing. Zero values are dropped.
  FiniteVector(std::initializer_list<Entry> entries)
      : FiniteVector(std::vector<Entry>(entries)) {}

  explicit FiniteVector(std::vector<Entry> entries) {
    Index prev = 0;
    entries_.reserve(entries.size());
    for (const auto& [idx, value] : entries) {
      if (idx == 0) throw Error(ErrorCode::InvalidArgument, "coordinate indices start at 1");
      if (idx <= prev) throw Error(ErrorCode::InvalidArgument, "indices must be strictly increasing");
      if (!std::isfinite(value)) throw Error(ErrorCode::InvalidArgument, "non-finite coordinate value");
      prev = idx;
      if (value != 0.0) entries_.emplace_back(idx, value);
    }
  }

  /// Coordinates values[0], values[1], ... placed at first, first+1, ...
  static FiniteVector from_dense(std::span<const double> values, Index first = 1) {
    std::vector<Entry> e;
    e.reserve(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) e.emplace_back(first + k, values[k]);
    return FiniteVector(std::move(e));
  }

  /// The unit vector e_i.
  static FiniteVector unit(Index i, double value = 1.0) { return FiniteVector({{i, value}}); }

  double operator[](Index i) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), i,
                               [](const Entry& e, Index k) { return e.first < k; });
    return (it != entries_.end() && it->first == i) ? it->second : 0.0;
  }

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const_iterator begin() const noexcept { return entries_.begin(); }
  const_iterator end() const noexcept { return entries_.end(); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }

  std::vector<Index> support() const {
    std::vector<Index> s;
    s.reserve(entries_.size());
    for (const auto& e : entries_) s.push_back(e.first);
    return s;
  }
  std::vector<double> values() const {
    std::vector<double> v;
    v.reserve(entries_.size());
    for (const auto& e : entries_) v.push_back(e.second);
    return v;
  }

  /// Smallest / largest support index. Undefined on the zero vector.
  Index min_index() const { return entries_.front().first; }
  Index max_index() const { return entries_.back().first; }

  friend bool operator==(const FiniteVector&, const FiniteVector&) = default;

 private:
  std::vector<Entry> entries_;
};

/// The integer interval [lo, hi].
struct Segment {
  Index lo = 1;
  Index hi = 1;

  Segment() = default;
  Segment(Index lo_, Index hi_) : lo(lo_), hi(hi_) {
    if (lo > hi) throw Error(ErrorCode::InvalidArgument, "segment needs lo <= hi");
  }
  bool contains(Index i) const noexcept { return lo <= i && i <= hi; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Builds a vector from possibly unsorted entries, summing duplicates.
inline FiniteVector collect(std::vector<FiniteVector::Entry> raw) {
  std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<FiniteVector::Entry> merged;
  for (const auto& e : raw) {
    if (!merged.empty() && merged.back().first == e.first)
      merged.back().second += e.second;
    else
      merged.push_back(e);
  }
  return FiniteVector(std::move(merged));
}

/// Applies `f` to every stored value (zeros produced by `f` are dropped).
template <class F>
FiniteVector map_values(const FiniteVector& x, F&& f) {
  std::vector<FiniteVector::Entry> out;
  out.reserve(x.size());
  for (const auto& [i, v] : x) out.emplace_back(i, f(v));
  return FiniteVector(std::move(out));
}

// -- restriction -------------------------------------------------------------

/// Bx = sum_{i in B} x_i e_i.
inline FiniteVector restrict(const FiniteVector& x, const std::set<Index>& keep) {
  std::vector<FiniteVector::Entry> out;
  for (const auto& e : x)
    if (keep.count(e.first)) out.push_back(e);
  return FiniteVector(std::move(out));
}

inline FiniteVector restrict(const FiniteVector& x, const Segment& seg) {
  std::vector<FiniteVector::Entry> out;
  for (const auto& e : x)
    if (seg.contains(e.first)) out.push_back(e);
  return FiniteVector(std::move(out));
}

inline FiniteVector restrict(const FiniteVector& x, const std::vector<Index>& keep) {
  return restrict(x, std::set<Index>(keep.begin(), keep.end()));
}

// -- lattice operations --------------------------------------------------------

/// Coordinatewise product x∘y; its support is supp x ∩ supp y.
inline FiniteVector pointwise_mul(const FiniteVector& x, const FiniteVector& y) {
  std::vector<FiniteVector::Entry> out;
  auto a = x.begin();
  auto b = y.begin();
  while (a != x.end() && b != y.end()) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      out.emplace_back(a->first, a->second * b->second);
      ++a;
      ++b;
    }
  }
  return FiniteVector(std::move(out));
}

struct AbsSign {
  FiniteVector magnitude;
  FiniteVector sign;
};

/// Splits x into |x| and sign(x); magnitude ∘ sign reproduces x exactly.
inline AbsSign abs_sign_split(const FiniteVector& x) {
  return {map_values(x, [](double v) { return std::abs(v); }),
          map_values(x, [](double v) { return v > 0 ? 1.0 : -1.0; })};
}

inline FiniteVector abs(const FiniteVector& x) {
  return map_values(x, [](double v) { return std::abs(v); });
}

inline FiniteVector scale(const FiniteVector& x, double a) {
  if (a == 0.0) return {};
  return map_values(x, [a](double v) { return a * v; });
}

/// a*x + b*y.
inline FiniteVector linear_combination(double a, const FiniteVector& x, double b, const FiniteVector& y) {
  std::vector<FiniteVector::Entry> out;
  auto p = x.begin();
  auto q = y.begin();
  while (p != x.end() || q != y.end()) {
    if (q == y.end() || (p != x.end() && p->first < q->first)) {
      out.emplace_back(p->first, a * p->second);
      ++p;
    } else if (p == x.end() || q->first < p->first) {
      out.emplace_back(q->first, b * q->second);
      ++q;
    } else {
      out.emplace_back(p->first, a * p->second + b * q->second);
      ++p;
      ++q;
    }
  }
  return FiniteVector(std::move(out));
}

inline FiniteVector operator+(const FiniteVector& x, const FiniteVector& y) {
  return linear_combination(1.0, x, 1.0, y);
}
inline FiniteVector operator-(const FiniteVector& x, const FiniteVector& y) {
  return linear_combination(1.0, x, -1.0, y);
}

/// The pairing <x*, x> = sum x*_i x_i.
inline double dot(const FiniteVector& x, const FiniteVector& y) {
  double s = 0.0;
  auto a = x.begin();
  auto b = y.begin();
  while (a != x.end() && b != y.end()) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      s += a->second * b->second;
      ++a;
      ++b;
    }
  }
  return s;
}

inline double l1_mass(const FiniteVector& x) {
  double s = 0.0;
  for (const auto& e : x) s += std::abs(e.second);
  return s;
}

inline double max_abs(const FiniteVector& x) {
  double m = 0.0;
  for (const auto& e : x) m = std::max(m, std::abs(e.second));
  return m;
}

inline bool is_nonnegative(const FiniteVector& x) {
  return std::all_of(x.begin(), x.end(), [](const auto& e) { return e.second > 0; });
}

/// Moves the k-th support coordinate of x to targets[k]; targets must be
/// strictly increasing and as long as the support.
inline FiniteVector spread(const FiniteVector& x, const std::vector<Index>& targets) {
  if (targets.size() != x.size())
    throw Error(ErrorCode::InvalidArgument, "spreading needs one target per support coordinate");
  std::vector<FiniteVector::Entry> out;
  out.reserve(x.size());
  std::size_t k = 0;
  for (const auto& e : x) out.emplace_back(targets[k++], e.second);
  return FiniteVector(std::move(out));
}

/// Translates every index by `offset`.
inline FiniteVector shift(const FiniteVector& x, Index offset) {
  std::vector<FiniteVector::Entry> out;
  out.reserve(x.size());
  for (const auto& [i, v] : x) out.emplace_back(i + offset, v);
  return FiniteVector(std::move(out));
}

// -- block sequences -------------------------------------------------------------

/// An ordered list of vectors with max supp(b_i) < min supp(b_{i+1}).
/// Zero blocks are allowed and impose no ordering constraint.
class BlockSequence {
 public:
  BlockSequence() = default;
  explicit BlockSequence(std::vector<FiniteVector> blocks) : blocks_(std::move(blocks)) {
    if (auto bad = first_violation(blocks_))
      throw Error(ErrorCode::NonSuccessive, "blocks " + std::to_string(*bad - 1) + " and " +
                                                std::to_string(*bad) + " interleave",
                  std::numeric_limits<double>::quiet_NaN(), *bad);
  }
  BlockSequence(std::initializer_list<FiniteVector> blocks)
      : BlockSequence(std::vector<FiniteVector>(blocks)) {}

  std::size_t size() const noexcept { return blocks_.size(); }
  bool empty() const noexcept { return blocks_.empty(); }
  const FiniteVector& operator[](std::size_t i) const { return blocks_[i]; }
  auto begin() const noexcept { return blocks_.begin(); }
  auto end() const noexcept { return blocks_.end(); }
  const std::vector<FiniteVector>& blocks() const noexcept { return blocks_; }

  /// Index of the first block that starts at or before the end of an earlier one.
  static std::optional<std::size_t> first_violation(const std::vector<FiniteVector>& blocks) {
    Index last = 0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      if (blocks[i].empty()) continue;
      if (blocks[i].min_index() <= last) return i;
      last = blocks[i].max_index();
    }
    return std::nullopt;
  }

 private:
  std::vector<FiniteVector> blocks_;
};

/// sum coeffs[i] * blocks[i]. Supports are disjoint, so this is a concatenation.
inline FiniteVector combine(const BlockSequence& blocks, std::span<const double> coeffs) {
  if (coeffs.size() != blocks.size())
    throw Error(ErrorCode::InvalidArgument, "one coefficient per block required");
  std::vector<FiniteVector::Entry> out;
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (const auto& [idx, v] : blocks[i]) out.emplace_back(idx, coeffs[i] * v);
  return FiniteVector(std::move(out));
}

inline FiniteVector combine(const std::vector<FiniteVector>& blocks, std::span<const double> coeffs) {
  return combine(BlockSequence(blocks), coeffs);
}

/// Plain sum of a block sequence.
inline FiniteVector sum(const BlockSequence& blocks) {
  std::vector<double> ones(blocks.size(), 1.0);
  return combine(blocks, ones);
}

}  // namespace distort
