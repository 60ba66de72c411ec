#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "distort/norms.hpp"

namespace distort {

/// phi(l) = log2(1 + l).
inline double phi(std::size_t l) {
  if (l < 1) throw Error(ErrorCode::InvalidArgument, "phi is defined for l >= 1");
  return std::log2(1.0 + static_cast<double>(l));
}

/// One node of an optimal analysis of x: either a leaf (the c0 term, attained
/// at `coordinate`) or a split of `segment` into `parts` successive
/// subsegments, valued at (1/phi(parts)) * sum of child values.
struct AnalysisNode {
  Segment segment;
  double value = 0.0;
  std::size_t parts = 1;
  Index coordinate = 0;
  std::vector<AnalysisNode> children;

  bool is_leaf() const noexcept { return parts == 1; }
};

namespace detail {

/// Interval dynamic program over the support of x.
///
/// Enlarging each E_i to fill the gaps between support points never lowers
/// ||E_i x|| (1-unconditionality), so the sup over successive sets reduces to
/// partitions of support-position intervals into successive subintervals.
/// norm_[a][b] is the norm of x restricted to support positions a..b.
class SchlumprechtTable {
 public:
  explicit SchlumprechtTable(const FiniteVector& x) : index_(x.support()) {
    for (const auto& e : x) mag_.push_back(std::abs(e.second));
    n_ = mag_.size();
    norm_.assign(n_ * n_, 0.0);
    leaf_.assign(n_ * n_, 0.0);
    for (std::size_t a = n_; a-- > 0;) fill_start(a, /*store=*/false);
  }

  std::size_t size() const noexcept { return n_; }
  double norm(std::size_t a, std::size_t b) const { return norm_[a * n_ + b]; }
  double leaf(std::size_t a, std::size_t b) const { return leaf_[a * n_ + b]; }
  double value() const { return n_ == 0 ? 0.0 : norm(0, n_ - 1); }

  AnalysisNode analysis() { return analyse(0, n_ - 1); }

 private:
  // best_[l * n_ + e]: best sum of norms over partitions of [a, e] into l parts.
  using PartTable = std::vector<double>;

  // Computes norm_[a][*] (store=false) or returns the part table for start a.
  PartTable fill_start(std::size_t a, bool store) {
    const std::size_t len = n_ - a;
    PartTable best((len + 1) * n_, -1.0);
    double running_max = 0.0;
    for (std::size_t e = a; e < n_; ++e) {
      running_max = std::max(running_max, mag_[e]);
      const std::size_t width = e - a + 1;
      double split = 0.0;
      for (std::size_t l = 2; l <= width; ++l) {
        double b = -1.0;
        for (std::size_t c = a + l - 2; c < e; ++c) {
          const double prev = best[(l - 1) * n_ + c];
          if (prev < 0) continue;
          b = std::max(b, prev + norm(c + 1, e));
        }
        best[l * n_ + e] = b;
        if (b >= 0) split = std::max(split, b / phi(l));
      }
      if (!store) {
        leaf_[a * n_ + e] = running_max;
        norm_[a * n_ + e] = std::max(running_max, split);
      }
      best[1 * n_ + e] = norm(a, e);
    }
    return best;
  }

  const PartTable& parts_from(std::size_t a) {
    auto it = cache_.find(a);
    if (it == cache_.end()) it = cache_.emplace(a, fill_start(a, true)).first;
    return it->second;
  }

  // Ties within 1e-12 (relative) resolve to the leaf, then the smallest l,
  // then the lexicographically earliest break points.
  AnalysisNode analyse(std::size_t a, std::size_t b) {
    AnalysisNode node;
    node.segment = Segment(index_[a], index_[b]);
    node.value = norm(a, b);
    const double tol = 1e-12 * std::max(node.value, 1e-300);
    if (leaf(a, b) >= node.value - tol) {
      for (std::size_t k = a; k <= b; ++k) {
        if (mag_[k] == leaf(a, b)) {
          node.coordinate = index_[k];
          break;
        }
      }
      return node;
    }
    const PartTable& best = parts_from(a);
    std::size_t parts = 0;
    for (std::size_t l = 2; l <= b - a + 1; ++l) {
      const double v = best[l * n_ + b];
      if (v >= 0 && v / phi(l) >= node.value - tol) {
        parts = l;
        break;
      }
    }
    node.parts = parts;
    const double sum_tol = tol * phi(parts);
    double remaining = best[parts * n_ + b];
    std::size_t start = a;
    for (std::size_t k = parts; k > 1; --k) {
      // Earliest end c for the next part such that the rest still reaches the target.
      std::size_t chosen = b;
      for (std::size_t c = start; c + (k - 1) <= b; ++c) {
        const PartTable& rest = parts_from(c + 1);
        const double tail = rest[(k - 1) * n_ + b];
        if (tail < 0) continue;
        if (norm(start, c) + tail >= remaining - sum_tol) {
          chosen = c;
          break;
        }
      }
      node.children.push_back(analyse(start, chosen));
      remaining -= norm(start, chosen);
      start = chosen + 1;
    }
    node.children.push_back(analyse(start, b));
    return node;
  }

  std::vector<Index> index_;
  std::vector<double> mag_;
  std::size_t n_ = 0;
  std::vector<double> norm_;
  std::vector<double> leaf_;
  std::map<std::size_t, PartTable> cache_;
};

inline void accumulate_functional(const AnalysisNode& node, const FiniteVector& x, double weight,
                                  std::vector<FiniteVector::Entry>& out) {
  if (node.is_leaf()) {
    out.emplace_back(node.coordinate, x[node.coordinate] > 0 ? weight : -weight);
    return;
  }
  const double w = weight / phi(node.parts);
  for (const auto& child : node.children) accumulate_functional(child, x, w, out);
}

}  // namespace detail

/// Exact value of the norm satisfying
///   ||x|| = max(||x||_c0, sup_{l>=2, E_1<...<E_l} (1/phi(l)) sum ||E_i x||)
/// on finitely supported x.
inline double schlumprecht_norm(const FiniteVector& x) {
  return detail::SchlumprechtTable(x).value();
}

/// An optimal analysis tree of x (x != 0).
inline AnalysisNode schlumprecht_analysis(const FiniteVector& x) {
  if (x.empty()) throw Error(ErrorCode::ZeroVector, "analysis of the zero vector");
  return detail::SchlumprechtTable(x).analysis();
}

/// The functional read off an optimal analysis: leaves give ±e_i*, splits
/// average their children with weight 1/phi(l). Such functionals lie in the
/// dual unit ball by the defining inequality of the norm.
inline FiniteVector schlumprecht_norming_functional(const FiniteVector& x) {
  if (x.empty()) throw Error(ErrorCode::ZeroVector, "norming functional of the zero vector");
  std::vector<FiniteVector::Entry> out;
  detail::accumulate_functional(schlumprecht_analysis(x), x, 1.0, out);
  return collect(std::move(out));
}

/// Exhaustive evaluation over all families of successive subsets of the
/// support (not necessarily covering, no interval reduction). Test oracle.
inline double schlumprecht_norm_brute(const FiniteVector& x) {
  constexpr std::size_t kMaxSupport = 12;
  if (x.size() > kMaxSupport)
    throw Error(ErrorCode::TooLarge, "brute force limited to support size 12",
                static_cast<double>(x.size()));
  if (x.empty()) return 0.0;
  const std::vector<double> mag = abs(x).values();
  const std::size_t k = mag.size();
  std::vector<double> memo(std::size_t{1} << k, -1.0);

  // value(mask): norm of x restricted to the positions in mask.
  auto value = [&](auto&& self, std::uint32_t mask) -> double {
    if (memo[mask] >= 0) return memo[mask];
    std::vector<std::size_t> pos;
    double best = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      if (mask >> i & 1u) {
        pos.push_back(i);
        best = std::max(best, mag[i]);
      }
    // Each position is skipped, appended to the open set, or opens a new set.
    auto walk = [&](auto&& rec, std::size_t p, std::uint32_t open, std::size_t closed,
                    double closed_sum) -> void {
      if (p == pos.size()) {
        const std::size_t l = closed + (open ? 1 : 0);
        if (l < 2) return;
        const double total = closed_sum + (open ? self(self, open) : 0.0);
        best = std::max(best, total / phi(l));
        return;
      }
      const std::uint32_t bit = 1u << pos[p];
      rec(rec, p + 1, open, closed, closed_sum);
      if (open) {
        rec(rec, p + 1, open | bit, closed, closed_sum);
        rec(rec, p + 1, bit, closed + 1, closed_sum + self(self, open));
      } else {
        rec(rec, p + 1, bit, closed, closed_sum);
      }
    };
    walk(walk, 0, 0u, 0, 0.0);
    memo[mask] = best;
    return best;
  };
  return value(value, (std::uint32_t{1} << k) - 1);
}

class SchlumprechtNorm final : public NormOracle {
 public:
  double norm(const FiniteVector& x) const override { return schlumprecht_norm(x); }
  std::optional<FiniteVector> norming_functional(const FiniteVector& x) const override {
    return schlumprecht_norming_functional(x);
  }
  std::string tag() const override { return "schlumprecht"; }
};

}  // namespace distort
