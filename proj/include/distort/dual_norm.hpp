#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "distort/norms.hpp"

namespace distort {

struct DualNormOptions {
  std::size_t budget = 2000;  ///< total ascent iterations, shared by all starts
  std::size_t random_starts = 16;
  std::uint64_t seed = 0;
};

struct DualNormEstimate {
  double lower = 0.0;       ///< <h, witness> <= ||h||_{X*}
  FiniteVector witness;     ///< on the primal unit sphere
  std::size_t iterations = 0;
};

/// Certified lower bound for the dual norm sup{<h, x> : ||x|| <= 1}.
///
/// By 1-unconditionality the sup is attained on the positive cone over
/// supp h, where r(x) = <|h|, x> / ||x|| is maximised by projected
/// supergradient ascent: the direction |h| - r(x) x* with x* norming x,
/// step halved on failure and doubled on success. Starts: |h| itself plus
/// `random_starts` seeded random positive vectors.
inline DualNormEstimate dual_norm_estimate(const FiniteVector& h, const NormOracle& oracle,
                                           const DualNormOptions& opt = {}) {
  if (h.empty()) throw Error(ErrorCode::ZeroVector, "dual norm of the zero functional");
  const std::vector<Index> support = h.support();
  const std::size_t n = support.size();
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = std::abs(h[support[i]]);

  auto make = [&](const std::vector<double>& v) {
    std::vector<FiniteVector::Entry> e;
    for (std::size_t i = 0; i < n; ++i) e.emplace_back(support[i], v[i]);
    return FiniteVector(std::move(e));
  };
  auto ratio = [&](const std::vector<double>& v, double& norm_out) {
    norm_out = oracle.norm(make(v));
    if (norm_out <= 0) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * v[i];
    return s / norm_out;
  };

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  const std::size_t starts = opt.random_starts + 1;
  const std::size_t per_start = std::max<std::size_t>(1, opt.budget / starts);

  DualNormEstimate out;
  out.lower = -1.0;
  std::vector<double> best_x;
  for (std::size_t s = 0; s < starts; ++s) {
    std::vector<double> x(n);
    if (s == 0)
      x = a;
    else
      for (auto& v : x) v = unif(rng);
    double nx = 0;
    double r = ratio(x, nx);
    for (auto& v : x) v /= nx;
    double step = 1.0;
    for (std::size_t it = 0; it < per_start && step > 1e-14; ++it) {
      ++out.iterations;
      auto g = oracle.norming_functional(make(x));
      if (!g) break;
      std::vector<double> cand(n);
      bool moved = false;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - r * std::abs((*g)[support[i]]);
        cand[i] = std::max(0.0, x[i] + step * d);
        moved = moved || cand[i] != x[i];
      }
      if (!moved) break;
      double nc = 0;
      const double rc = ratio(cand, nc);
      if (nc > 0 && rc > r) {
        for (std::size_t i = 0; i < n; ++i) x[i] = cand[i] / nc;
        r = rc;
        step = std::min(step * 2.0, 1e6);
      } else {
        step *= 0.5;
      }
    }
    if (r > out.lower) {
      out.lower = r;
      best_x = x;
    }
  }
  // Witness carries the signs of h so that <h, witness> = lower.
  std::vector<FiniteVector::Entry> w;
  for (std::size_t i = 0; i < n; ++i) w.emplace_back(support[i], h[support[i]] > 0 ? best_x[i] : -best_x[i]);
  out.witness = FiniteVector(std::move(w));
  const double nw = oracle.norm(out.witness);
  out.witness = scale(out.witness, 1.0 / nw);
  out.lower = dot(h, out.witness);
  return out;
}

}  // namespace distort
