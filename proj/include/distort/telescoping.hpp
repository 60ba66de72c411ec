#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <optional>
#include <string>
#include <vector>

#include "distort/constructions.hpp"
#include "distort/entropy.hpp"
#include "distort/entropy_max.hpp"
#include "distort/random.hpp"

namespace distort {

struct TelescopingLevel {
  std::size_t level = 0;
  std::size_t node = 0;  ///< position among the m^{level-1} nodes, lexicographic
  double deficit = 0.0;
  double threshold = 0.0;
};

struct TelescopingResult {
  std::size_t level = 0;
  std::vector<std::size_t> alpha;  ///< multi-index of the returned node, entries in 1..m
  double deficit = 0.0;            ///< sum E_*(b_l) - E_*(sum b_l), normalised blocks
  double threshold = 0.0;          ///< tau * m
  std::vector<FiniteVector> b;     ///< the m blocks, each on S(l1)+
  std::vector<TelescopingLevel> visited;
  bool fallback = false;  ///< true when no node qualified and the best one was returned
};

namespace detail {

class NodeEntropies {
 public:
  NodeEntropies(const std::vector<FiniteVector>& h, const DualEntropyEstimator& est) : h_(h), est_(est) {}

  FiniteVector node_sum(std::size_t start, std::size_t len) const {
    FiniteVector s;
    for (std::size_t i = start; i < start + len; ++i) s = s + h_[i];
    return s;
  }

  double value(std::size_t start, std::size_t len) {
    const auto key = std::make_pair(start, len);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const double v = est_(node_sum(start, len)).value;
    cache_.emplace(key, v);
    return v;
  }

 private:
  const std::vector<FiniteVector>& h_;
  const DualEntropyEstimator& est_;
  std::map<std::pair<std::size_t, std::size_t>, double> cache_;
};

inline std::size_t ipow(std::size_t m, std::size_t k) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < k; ++i) {
    if (r > (std::size_t{1} << 40) / std::max<std::size_t>(m, 1))
      throw Error(ErrorCode::TooLarge, "m^K exceeds the supported range");
    r *= m;
  }
  return r;
}

inline void check_normalised_blocks(const std::vector<FiniteVector>& h) {
  const BlockSequence seq(h);
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!is_nonnegative(h[i]))
      throw Error(ErrorCode::InvalidArgument, "blocks must be nonnegative", std::numeric_limits<double>::quiet_NaN(), i);
    const double m = l1_mass(h[i]);
    if (std::abs(m - 1.0) > 1e-10) throw Error(ErrorCode::NotNormalized, "blocks must lie on S(l1)", m, i);
  }
}

}  // namespace detail

/// Breadth-first search over the m-ary tree of depth K on m^K successive
/// blocks of S(l1)+ for a node whose m children satisfy
/// sum E_*(d_l) - E_*(sum d_l) <= tau m^{K-s+1}. With `allow_fallback` the
/// node with the smallest deficit/threshold ratio is returned instead of
/// throwing NotFound.
inline TelescopingResult telescoping_search(const std::vector<FiniteVector>& h, std::size_t m, std::size_t K,
                                            double tau, const DualEntropyEstimator& est,
                                            bool allow_fallback = false) {
  if (m == 0 || K == 0) throw Error(ErrorCode::InvalidArgument, "m and K must be positive");
  const std::size_t total = detail::ipow(m, K);
  if (h.size() != total)
    throw Error(ErrorCode::InvalidArgument, "need exactly m^K blocks", static_cast<double>(h.size()));
  detail::check_normalised_blocks(h);
  const double lphi = std::log(phi(total));
  if (!(lphi < tau * static_cast<double>(K)))
    throw Error(ErrorCode::HypothesisViolated, "log phi(m^K) >= tau K", lphi);

  detail::NodeEntropies E(h, est);
  TelescopingResult res;
  std::optional<TelescopingLevel> best;
  double best_ratio = std::numeric_limits<double>::infinity();
  bool hit = false;
  for (std::size_t s = 1; s <= K && !hit; ++s) {
    const std::size_t nodes = detail::ipow(m, s - 1);
    const std::size_t node_len = total / nodes;
    const std::size_t child_len = node_len / m;
    const double threshold = tau * static_cast<double>(node_len);
    for (std::size_t a = 0; a < nodes && !hit; ++a) {
      const std::size_t start = a * node_len;
      double deficit = -E.value(start, node_len);
      for (std::size_t l = 0; l < m; ++l) deficit += E.value(start + l * child_len, child_len);
      const TelescopingLevel lv{s, a, deficit, threshold};
      res.visited.push_back(lv);
      const double ratio = deficit / threshold;
      if (ratio < best_ratio) {
        best_ratio = ratio;
        best = lv;
      }
      if (deficit <= threshold) {
        best = lv;
        hit = true;
      }
    }
  }
  if (!hit) {
    if (!allow_fallback)
      throw Error(ErrorCode::NotFound, "no node meets the telescoping threshold", best_ratio);
    res.fallback = true;
  }
  res.level = best->level;
  {
    std::size_t a = best->node;
    res.alpha.assign(res.level - 1, 1);
    for (std::size_t i = res.level - 1; i-- > 0;) {
      res.alpha[i] = a % m + 1;
      a /= m;
    }
  }
  const std::size_t node_len = total / detail::ipow(m, res.level - 1);
  const std::size_t child_len = node_len / m;
  const double scale_back = 1.0 / static_cast<double>(child_len);
  res.deficit = best->deficit * scale_back;
  res.threshold = tau * static_cast<double>(m);
  for (std::size_t l = 0; l < m; ++l)
    res.b.push_back(scale(E.node_sum(best->node * node_len + l * child_len, child_len), scale_back));
  return res;
}

struct EnergyBoundCheck {
  double lhs = 0.0;      ///< E_*(sum h_i)
  double witness = 0.0;  ///< E(sum h_i, (1/phi(n)) sum F_*(h_i))
  double rhs = 0.0;      ///< sum E_*(h_i) - n log phi(n)
  bool holds = false;
};

/// E_*(sum h_i) >= sum E_*(h_i) - n log phi(n), with the averaged witness
/// evaluated explicitly.
inline EnergyBoundCheck energy_bound_check(const std::vector<FiniteVector>& h, const DualEntropyEstimator& est) {
  detail::check_normalised_blocks(h);
  const std::size_t n = h.size();
  const double lphi = std::log(phi(n));
  EnergyBoundCheck c;
  FiniteVector total, y;
  for (const auto& hi : h) {
    const auto d = est(hi);
    c.rhs += d.value;
    total = total + hi;
    y = y + d.functional;
  }
  c.rhs -= static_cast<double>(n) * lphi;
  y = scale(y, 1.0 / phi(n));
  c.witness = entropy(total, y).value();
  c.lhs = est(total).value;
  const double tol = 1e-6 * static_cast<double>(n);
  c.holds = c.lhs >= c.witness - tol && c.witness >= c.rhs - tol;
  return c;
}

// --- block factorisation of l1^m+ averages -----------------------------------

struct AverageFactorConfig {
  std::size_t m = 2;
  double eps = 0.5;
  std::optional<std::size_t> K;  ///< relaxed depth; exact mode derives it
  std::optional<double> tau;     ///< relaxed tau; exact mode uses 0.99 psi(eps)/m
  std::size_t max_exact_blocks = 4096;
};

struct AverageFactorReport {
  Provenance provenance;
  std::size_t K = 0;
  double tau = 0.0;
  TelescopingResult search;
  std::vector<double> entropy_gaps;  ///< E(b_j, w_j*) - E(b_j, x_j*)
  double psi = 0.0;
  bool gap_precondition = true;
  std::vector<FiniteVector> w;  ///< w_j = F_S(b_j)
  FiniteVector u;               ///< sum w_j / ||sum w_j||
  FiniteVector u_star;          ///< x* restricted to the union of the H_j
  FiniteVector y;               ///< (1/m) sum b_j
  double dist = 0.0;            ///< ||u* o u - y||_1
  double bound = 0.0;
  bool bound_holds = false;
  double average_constant = 0.0;  ///< m / ||sum w_j||
};

/// Exact-mode parameters: tau = 0.99 psi(eps) / m and the least K with
/// tau K > log phi(m^K).
inline std::pair<std::size_t, double> average_factor_exact_parameters(std::size_t m, double eps) {
  const double tau = 0.99 * psi(eps) / static_cast<double>(m);
  for (std::size_t K = 1; K < 100000; ++K) {
    const double l = static_cast<double>(K) * std::log2(static_cast<double>(m));
    const double lphi = std::log(l > 50 ? l : std::log2(1.0 + std::exp2(l)));
    if (tau * static_cast<double>(K) > lphi) return {K, tau};
  }
  throw Error(ErrorCode::TooLarge, "no admissible depth K", tau);
}

/// Telescoping search followed by the block factorisation of y = (1/m) sum b_j.
/// Relaxed runs record the entropy-gap precondition instead of enforcing it.
inline AverageFactorReport factor_average(const std::vector<FiniteVector>& h, const AverageFactorConfig& cfg,
                                    const DualEntropyEstimator& est) {
  if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) throw Error(ErrorCode::OutOfRange, "eps must lie in (0, 1)", cfg.eps);
  AverageFactorReport r;
  r.psi = psi(cfg.eps);
  if (cfg.K || cfg.tau) {
    if (!cfg.K || !cfg.tau) throw Error(ErrorCode::ConfigError, "relaxed mode needs both K and tau");
    r.K = *cfg.K;
    r.tau = *cfg.tau;
    r.provenance.mode = "relaxed";
    r.provenance.params = {{"K", r.K}, {"tau", r.tau}};
  } else {
    std::tie(r.K, r.tau) = average_factor_exact_parameters(cfg.m, cfg.eps);
    const double need = static_cast<double>(r.K) * std::log2(static_cast<double>(cfg.m));
    if (need > std::log2(static_cast<double>(cfg.max_exact_blocks)))
      throw Error(ErrorCode::TooLarge, "exact mode needs m^K blocks; use relaxed K and tau", need);
  }
  const std::size_t total = detail::ipow(cfg.m, r.K);
  if (h.size() < total)
    throw Error(ErrorCode::PreconditionFailed, "fewer than m^K blocks", static_cast<double>(h.size()));
  const std::vector<FiniteVector> used(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(total));
  r.search = telescoping_search(used, cfg.m, r.K, r.tau, est, r.provenance.relaxed());

  const auto& b = r.search.b;
  FiniteVector bsum;
  for (const auto& bj : b) bsum = bsum + bj;
  const FiniteVector x_star = est(bsum).functional;
  const auto& X = est.primal();
  std::set<Index> H;
  FiniteVector wsum;
  for (const auto& bj : b) {
    const FiniteVector xj = restrict(x_star, bj.support());
    const auto f = entropy_max(bj, X, est.options());
    const FiniteVector wj_star = abs(f.x_star);
    const FiniteVector wj = abs(f.x);
    const auto Ex = entropy(bj, xj);
    const double gap = Ex.is_neg_infinity() ? std::numeric_limits<double>::infinity()
                                            : entropy(bj, wj_star).value() - Ex.value();
    r.entropy_gaps.push_back(gap);
    if (!(gap < r.psi)) r.gap_precondition = false;
    for (const auto& [i, bi] : bj) {
      (void)bi;
      if (std::abs(xj[i] / wj_star[i] - 1.0) < cfg.eps) H.insert(i);
    }
    r.w.push_back(wj);
    wsum = wsum + wj;
  }
  if (!r.gap_precondition && !r.provenance.relaxed())
    throw Error(ErrorCode::PreconditionFailed, "entropy gap not below psi(eps)",
                *std::max_element(r.entropy_gaps.begin(), r.entropy_gaps.end()));
  const double nw = X.norm(wsum);
  r.average_constant = static_cast<double>(cfg.m) / nw;
  r.u = scale(wsum, 1.0 / nw);
  r.u_star = restrict(x_star, H);
  r.y = scale(bsum, 1.0 / static_cast<double>(cfg.m));
  r.dist = lp_norm(pointwise_mul(r.u_star, r.u) - r.y, 1.0);
  r.bound = cfg.eps < 0.5 ? 2.0 * cfg.eps + 2.0 * cfg.eps / (1.0 - 2.0 * cfg.eps) : 1.0;
  r.bound_holds = r.dist < r.bound;
  if (!r.bound_holds && !r.provenance.relaxed())
    throw Error(ErrorCode::ConstantViolated, "factorisation distance above bound", r.dist);
  return r;
}

/// min over random nonnegative a of ||sum a_j w_j|| / sum a_j, to compare with 1 - 2 eps.
inline double l1m_lower_ratio(const std::vector<FiniteVector>& w, const NormOracle& X, std::size_t samples,
                              std::uint64_t seed) {
  Rng rng(seed);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < samples + w.size(); ++t) {
    std::vector<double> a(w.size(), 0.0);
    if (t < w.size())
      a[t] = 1.0;
    else
      a = random_simplex_point(rng, w.size()).values();
    double s = 0.0;
    for (double v : a) s += v;
    best = std::min(best, X.norm(combine(w, a)) / s);
  }
  return best;
}

inline json to_json(const AverageFactorReport& r) {
  json gaps = json::array();
  for (double g : r.entropy_gaps) gaps.push_back(std::isfinite(g) ? json(g) : json("inf"));
  return {{"provenance", r.provenance.to_json()},
          {"K", r.K},
          {"tau", r.tau},
          {"level", r.search.level},
          {"alpha", r.search.alpha},
          {"deficit", r.search.deficit},
          {"threshold", r.search.threshold},
          {"fallback", r.search.fallback},
          {"entropy_gaps", gaps},
          {"psi", r.psi},
          {"gap_precondition", r.gap_precondition},
          {"b", to_json(r.search.b)},
          {"w", to_json(r.w)},
          {"u", to_json(r.u)},
          {"u_star", to_json(r.u_star)},
          {"dist", r.dist},
          {"bound", r.bound},
          {"bound_holds", r.bound_holds},
          {"average_constant", r.average_constant}};
}

}  // namespace distort
