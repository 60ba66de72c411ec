#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "distort/entropy_max.hpp"
#include "distort/io.hpp"
#include "distort/oracles.hpp"
#include "distort/random.hpp"

namespace distort {

using SphereMap = std::function<FiniteVector(const FiniteVector&)>;
using NormFn = std::function<double(const FiniteVector&)>;

inline NormFn norm_of(OraclePtr X) {
  return [X = std::move(X)](const FiniteVector& x) { return X->norm(x); };
}

struct NearMaximizerWitness {
  std::vector<Index> A;
  double kept_mass = 0.0;
  double band_lo = 0.0, band_hi = 0.0;  ///< ratio band (1 - eps, 1 + eps)
  double entropy_gap = 0.0;             ///< E_X(h) - E(h, v)
};

/// Given v in Ba(X)+ with E(h, v) >= E_X(h) - psi(eps), the coordinates where
/// v stays within a factor (1 +- eps) of u = F_X(h) carry more than 1 - eps
/// of the mass of h.
inline NearMaximizerWitness near_maximizer_witness(const FiniteVector& h, const FiniteVector& v, double eps,
                                                   const NormOracle& X, const EntropyOptions& opt = {}) {
  if (!is_nonnegative(h) || !is_nonnegative(v))
    throw Error(ErrorCode::InvalidArgument, "h and v must be nonnegative");
  const double nv = X.norm(v);
  if (nv > 1.0 + 1e-10) throw Error(ErrorCode::PreconditionFailed, "v is outside Ba(X)", nv);
  const auto u = entropy_max(h, X, opt);
  const auto Ev = entropy(h, v);
  const double gap = Ev.is_neg_infinity() ? std::numeric_limits<double>::infinity() : u.entropy - Ev.value();
  if (!(gap <= psi(eps))) throw Error(ErrorCode::PreconditionFailed, "entropy gap exceeds psi(eps)", gap);

  NearMaximizerWitness w{{}, 0.0, 1.0 - eps, 1.0 + eps, gap};
  for (const auto& [i, hi] : h) {
    if (std::abs(v[i] / u.x[i] - 1.0) < eps) {
      w.A.push_back(i);
      w.kept_mass += hi;
    }
  }
  if (!(w.kept_mass > 1.0 - eps))
    throw Error(ErrorCode::ConstantViolated, "kept mass not above 1 - eps", w.kept_mass);
  return w;
}

struct MidpointCheck {
  double lhs = 0.0, rhs = 0.0;
  bool holds = false;
};

/// ||(F_X(h1) + F_X(h2)) / 2|| >= 1 - sqrt(||h1 - h2||_1).
inline MidpointCheck midpoint_lower_bound_check(const FiniteVector& h1, const FiniteVector& h2, const NormOracle& X,
                                                const EntropyOptions& opt = {}) {
  const double d = lp_norm(h1 - h2, 1.0);
  if (d > 1.0 + 1e-12) throw Error(ErrorCode::PreconditionFailed, "||h1 - h2||_1 must be at most 1", d);
  const auto x1 = entropy_max(h1, X, opt).x;
  const auto x2 = entropy_max(h2, X, opt).x;
  MidpointCheck c;
  c.lhs = X.norm(scale(x1 + x2, 0.5));
  c.rhs = 1.0 - std::sqrt(d);
  c.holds = c.lhs >= c.rhs - 1e-6;
  return c;
}

/// G_p(x) = sign(x) |x|^p, mapping S(X^(p)) onto S(X).
inline FiniteVector g_p_map(const FiniteVector& x, double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw Error(ErrorCode::InvalidExponent, "G_p needs 1 < p < inf", p);
  return map_values(x, [p](double v) { return std::copysign(std::pow(std::abs(v), p), v); });
}

struct SandwichCheck {
  double delta = 0.0;  ///< ||x - y||_(p)
  double lower = 0.0, value = 0.0, upper = 0.0;
  bool holds = false;
};

/// 2^{1-p} d^p <= ||G_p x - G_p y||_X <= d^p + d^{p/2} + 2(1 - (1 - sqrt d)^p)
/// for x, y on S(X^(p)) with d = ||x - y||_(p) <= 1.
inline SandwichCheck gp_sandwich_check(const FiniteVector& x, const FiniteVector& y, double p, OraclePtr X,
                                       double tol = 1e-8) {
  SandwichCheck c;
  c.delta = convexified_norm(x - y, p, X);
  if (c.delta > 1.0) throw Error(ErrorCode::PreconditionFailed, "sandwich bounds need ||x - y||_(p) <= 1", c.delta);
  c.value = X->norm(g_p_map(x, p) - g_p_map(y, p));
  c.lower = std::pow(2.0, 1.0 - p) * std::pow(c.delta, p);
  c.upper = std::pow(c.delta, p) + std::pow(c.delta, p / 2) + 2.0 * (1.0 - std::pow(1.0 - std::sqrt(c.delta), p));
  c.holds = c.lower <= c.value + tol && c.value <= c.upper + tol;
  return c;
}

/// bar F(x) = ||x|| F(x / ||x||), bar F(0) = 0.
inline FiniteVector ball_extend(const SphereMap& F, const NormFn& in_norm, const FiniteVector& x) {
  if (x.empty()) return {};
  const double nx = in_norm(x);
  if (nx > 1.0 + 1e-10) throw Error(ErrorCode::PreconditionFailed, "ball_extend needs ||x|| <= 1", nx);
  return scale(F(scale(x, 1.0 / nx)), nx);
}

/// Monotone empirical modulus of continuity: f(t) is the largest output
/// distance among recorded pairs with input distance at most t.
class EmpiricalModulus {
 public:
  void record(double in, double out) {
    pairs_.emplace_back(in, out);
    sorted_ = false;
  }
  std::size_t size() const noexcept { return pairs_.size(); }

  double operator()(double t) {
    if (!sorted_) {
      std::sort(pairs_.begin(), pairs_.end());
      prefix_.resize(pairs_.size());
      double m = 0.0;
      for (std::size_t k = 0; k < pairs_.size(); ++k) prefix_[k] = m = std::max(m, pairs_[k].second);
      sorted_ = true;
    }
    const auto it = std::upper_bound(pairs_.begin(), pairs_.end(), std::make_pair(t, std::numeric_limits<double>::infinity()));
    return it == pairs_.begin() ? 0.0 : prefix_[static_cast<std::size_t>(it - pairs_.begin()) - 1];
  }

 private:
  std::vector<std::pair<double, double>> pairs_;
  std::vector<double> prefix_;
  bool sorted_ = true;
};

struct ModulusProfile {
  std::vector<double> bin_upper;   ///< right edge of each input-distance bin
  std::vector<double> max_output;  ///< largest output distance seen in the bin
  std::vector<std::size_t> counts;
};

/// Samples pairs on S(X) at log-uniform distance scales and bins them by
/// input distance over [0, 2].
inline ModulusProfile modulus_profile(const SphereMap& F, const NormOracle& domain, const NormFn& out_norm,
                                      std::size_t samples, std::size_t dim, std::uint64_t seed, std::size_t bins = 20,
                                      bool positive = false) {
  Rng rng(seed);
  ModulusProfile p;
  for (std::size_t b = 0; b < bins; ++b) p.bin_upper.push_back(2.0 * static_cast<double>(b + 1) / static_cast<double>(bins));
  p.max_output.assign(bins, 0.0);
  p.counts.assign(bins, 0);
  for (std::size_t s = 0; s < samples; ++s) {
    const auto x = random_sphere_point(rng, dim, domain, positive);
    const auto y = random_nearby(rng, x, domain, positive);
    const double din = domain.norm(x - y);
    const double dout = out_norm(F(x) - F(y));
    const auto b = std::min(bins - 1, static_cast<std::size_t>(din / 2.0 * static_cast<double>(bins)));
    p.max_output[b] = std::max(p.max_output[b], dout);
    ++p.counts[b];
  }
  return p;
}

inline json to_json(const ModulusProfile& p) {
  json j = json::array();
  for (std::size_t b = 0; b < p.bin_upper.size(); ++b)
    j.push_back({{"input_upper", p.bin_upper[b]}, {"max_output", p.max_output[b]}, {"count", p.counts[b]}});
  return j;
}

// ---------------------------------------------------------------------------
// Randomised sweeps. Each returns a JSON report; a violation serialises the
// offending pair so it can be replayed.

struct SweepConfig {
  std::string check;  ///< entropy-gap | sandwich | extension-modulus
  std::size_t trials = 1000;
  std::size_t dim = 8;
  std::uint64_t seed = 0;
  std::vector<std::string> spaces;  ///< entropy-gap oracles
  std::vector<double> exponents;    ///< sandwich exponents
  std::string base = "schlumprecht";
  EntropyOptions entropy;
};

namespace detail {

inline json sweep_header(const SweepConfig& c) {
  json j;
  j["check"] = c.check;
  j["trials"] = c.trials;
  j["dim"] = c.dim;
  j["seed"] = c.seed;
  return j;
}

inline json entropy_gap_sweep(const SweepConfig& c) {
  json report = sweep_header(c);
  report["tolerance"] = 1e-6;
  json rows = json::array();
  const auto spaces = c.spaces.empty() ? std::vector<std::string>{"lp:2", "lp:3", "conv:2:schlumprecht"} : c.spaces;
  std::size_t total_violations = 0;
  for (std::size_t s = 0; s < spaces.size(); ++s) {
    const auto X = make_oracle(spaces[s]);
    Rng rng(c.seed + 7919 * s);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> sub(1, c.dim);
    std::size_t violations = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    json witnesses = json::array();
    for (std::size_t t = 0; t < c.trials; ++t) {
      const auto h1 = random_simplex_point(rng, c.dim);
      const auto g = random_simplex_point(rng, sub(rng));
      const double w = 0.5 * U(rng);
      FiniteVector h2 = linear_combination(1.0 - w, h1, w, g);
      h2 = scale(h2, 1.0 / l1_mass(h2));
      const auto r = midpoint_lower_bound_check(h1, h2, *X, c.entropy);
      min_margin = std::min(min_margin, r.lhs - r.rhs);
      if (!r.holds) {
        ++violations;
        witnesses.push_back({{"h1", to_json(h1)}, {"h2", to_json(h2)}, {"lhs", r.lhs}, {"rhs", r.rhs}});
      }
    }
    total_violations += violations;
    rows.push_back({{"space", spaces[s]}, {"violations", violations}, {"min_margin", min_margin},
                    {"counterexamples", witnesses}});
  }
  report["results"] = rows;
  report["violations"] = total_violations;
  return report;
}

inline json sandwich_sweep(const SweepConfig& c) {
  json report = sweep_header(c);
  report["base"] = c.base;
  report["tolerance"] = 1e-8;
  const auto X = make_oracle(c.base);
  const auto exps = c.exponents.empty() ? std::vector<double>{1.5, 2.0, 3.0} : c.exponents;
  json rows = json::array();
  std::size_t total_violations = 0;
  for (std::size_t e = 0; e < exps.size(); ++e) {
    const double p = exps[e];
    const ConvexifiedNorm Xp(p, X);
    Rng rng(c.seed + 104729 * e);
    std::size_t violations = 0, resampled = 0;
    double min_lower_margin = std::numeric_limits<double>::infinity();
    double min_upper_margin = std::numeric_limits<double>::infinity();
    json witnesses = json::array();
    for (std::size_t t = 0; t < c.trials; ++t) {
      const auto x = random_sphere_point(rng, c.dim, Xp);
      FiniteVector y = random_nearby(rng, x, Xp);
      while (Xp.norm(x - y) > 1.0) {
        ++resampled;
        y = random_nearby(rng, x, Xp);
      }
      const auto r = gp_sandwich_check(x, y, p, X);
      min_lower_margin = std::min(min_lower_margin, r.value - r.lower);
      min_upper_margin = std::min(min_upper_margin, r.upper - r.value);
      if (!r.holds) {
        ++violations;
        witnesses.push_back({{"x", to_json(x)}, {"y", to_json(y)}, {"delta", r.delta}, {"value", r.value}});
      }
    }
    total_violations += violations;
    rows.push_back({{"p", p}, {"violations", violations}, {"resampled", resampled},
                    {"min_lower_margin", min_lower_margin}, {"min_upper_margin", min_upper_margin},
                    {"counterexamples", witnesses}});
  }
  report["results"] = rows;
  report["violations"] = total_violations;
  return report;
}

// F is the Mazur map S(l1) -> S(l2); f is measured from the sphere pairs the
// sweep itself produces plus an equal number of extra sphere samples.
inline json modulus_sweep(const SweepConfig& c) {
  json report = sweep_header(c);
  report["map"] = "mazur l1 -> l2";
  const LpNorm l1(1.0), l2(2.0);
  const SphereMap F = [](const FiniteVector& x) { return mazur_map(x, 2.0); };
  const NormFn n1 = [&](const FiniteVector& x) { return l1.norm(x); };
  Rng rng(c.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);

  struct Trial {
    FiniteVector x1, x2;
    double delta, lam1, lam2, out;
  };
  std::vector<Trial> trials;
  EmpiricalModulus f;
  double max_norm_error = 0.0;
  for (std::size_t t = 0; t < c.trials; ++t) {
    const auto s1 = random_sphere_point(rng, c.dim, l1);
    const auto s2 = random_nearby(rng, s1, l1);
    const double r1 = U(rng), r2 = std::clamp(r1 + 0.1 * (U(rng) - 0.5), 1e-6, 1.0);
    const auto x1 = scale(s1, r1), x2 = scale(s2, r2);
    const auto y1 = ball_extend(F, n1, x1), y2 = ball_extend(F, n1, x2);
    max_norm_error = std::max({max_norm_error, std::abs(l2.norm(y1) - l1.norm(x1)), std::abs(l2.norm(y2) - l1.norm(x2))});
    const double lam1 = l1.norm(x1), lam2 = l1.norm(x2);
    const auto u1 = scale(x1, 1.0 / lam1), u2 = scale(x2, 1.0 / lam2);
    f.record(l1.norm(u1 - u2), l2.norm(F(u1) - F(u2)));
    trials.push_back({x1, x2, l1.norm(x1 - x2), lam1, lam2, l2.norm(y1 - y2)});
  }
  for (std::size_t t = 0; t < c.trials; ++t) {
    const auto s1 = random_sphere_point(rng, c.dim, l1);
    const auto s2 = random_nearby(rng, s1, l1);
    f.record(l1.norm(s1 - s2), l2.norm(F(s1) - F(s2)));
  }
  std::size_t violations = 0, small_radius_branch = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  json witnesses = json::array();
  for (const auto& tr : trials) {
    const double d = tr.delta;
    const double bound = std::max(d + f(2.0 * std::sqrt(d)), d + 2.0 * std::pow(d, 0.25));
    if (std::min(tr.lam1, tr.lam2) < std::pow(d, 0.25)) ++small_radius_branch;
    min_margin = std::min(min_margin, bound - tr.out);
    if (tr.out > bound + 1e-12) {
      ++violations;
      witnesses.push_back({{"x1", to_json(tr.x1)}, {"x2", to_json(tr.x2)}, {"out", tr.out}, {"bound", bound}});
    }
  }
  report["modulus_samples"] = f.size();
  report["max_norm_error"] = max_norm_error;
  report["small_radius_branch"] = small_radius_branch;
  report["min_margin"] = min_margin;
  report["violations"] = violations;
  report["counterexamples"] = witnesses;
  return report;
}

}  // namespace detail

inline json run_sweep(const SweepConfig& c) {
  if (c.trials == 0 || c.dim == 0) throw Error(ErrorCode::ConfigError, "sweep needs trials > 0 and dim > 0");
  if (c.check == "entropy-gap") return detail::entropy_gap_sweep(c);
  if (c.check == "sandwich") return detail::sandwich_sweep(c);
  if (c.check == "extension-modulus") return detail::modulus_sweep(c);
  throw Error(ErrorCode::ConfigError, "unknown sweep check '" + c.check + "'");
}

}  // namespace distort
