#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "distort/norms.hpp"

namespace distort {

using Rng = std::mt19937_64;

/// Nonnegative point of S(l1) supported on {first, ..., first + n - 1}.
inline FiniteVector random_simplex_point(Rng& rng, std::size_t n, Index first = 1) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> v(n);
  double s = 0.0;
  for (auto& t : v) s += (t = ex(rng) + 1e-3);
  for (auto& t : v) t /= s;
  return FiniteVector::from_dense(v, first);
}

/// Dense vector with standard normal entries on {first, ..., first + n - 1}.
inline FiniteVector random_gaussian(Rng& rng, std::size_t n, Index first = 1) {
  std::normal_distribution<double> N01;
  std::vector<double> v(n);
  for (auto& t : v) t = N01(rng);
  return FiniteVector::from_dense(v, first);
}

/// Random point of S(X) on n coordinates; `positive` restricts to the cone.
inline FiniteVector random_sphere_point(Rng& rng, std::size_t n, const NormOracle& X, bool positive = false) {
  FiniteVector g = random_gaussian(rng, n);
  if (positive) g = abs(g);
  return scale(g, 1.0 / X.norm(g));
}

/// A second sphere point at a log-uniformly distributed distance scale from x.
inline FiniteVector random_nearby(Rng& rng, const FiniteVector& x, const NormOracle& X, bool positive = false) {
  std::uniform_real_distribution<double> u(std::log(1e-4), 0.0);
  const double s = std::exp(u(rng));
  FiniteVector z = random_gaussian(rng, x.size() == 0 ? 1 : x.max_index());
  if (positive) z = abs(z);
  FiniteVector y = x + scale(z, s / X.norm(z));
  if (positive) y = abs(y);
  return scale(y, 1.0 / X.norm(y));
}

}  // namespace distort
