#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "distort/constructions.hpp"
#include "distort/io.hpp"
#include "distort/norms.hpp"
#include "distort/random.hpp"

namespace distort {

/// sup over prefixes of |a_1 + ... + a_l|.
inline double summing_norm(std::span<const double> a) {
  double s = 0.0, best = 0.0;
  for (double v : a) best = std::max(best, std::abs(s += v));
  return best;
}

/// Dual norm of sum b_i w_i* for the summing basis: sum |b_i - b_{i+1}|, b_{n+1} = 0.
inline double summing_dual_norm(std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) s += std::abs(b[i] - (i + 1 < b.size() ? b[i + 1] : 0.0));
  return s;
}

// --- sampled equivalent norms ------------------------------------------------

inline constexpr double kNoMeasure = std::numeric_limits<double>::quiet_NaN();

struct DistortionNormSpec {
  double p = 2.0;
  double floor = 0.5;
  std::vector<FiniteVector> samples;  ///< each on S(l_q)
  Provenance provenance;

  double q() const { return conjugate_exponent(p); }

  void validate() const {
    if (!(p > 1.0) || !std::isfinite(p)) throw Error(ErrorCode::InvalidExponent, "spec needs 1 < p < inf", p);
    if (!(floor > 0.0 && floor < 1.0)) throw Error(ErrorCode::OutOfRange, "floor must lie in (0, 1)", floor);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double n = lp_norm(samples[i], q());
      if (std::abs(n - 1.0) > 1e-8) throw Error(ErrorCode::NotNormalized, "sample not on S(l_q)", n, i);
    }
  }
};

inline json to_json(const DistortionNormSpec& s) {
  return {{"p", s.p}, {"floor", s.floor}, {"samples", to_json(s.samples)}, {"provenance", s.provenance.to_json()}};
}

inline DistortionNormSpec distortion_spec_from_json(const json& j) {
  DistortionNormSpec s;
  s.p = j.at("p").get<double>();
  s.floor = j.at("floor").get<double>();
  if (j.contains("samples")) s.samples = vectors_from_json(j["samples"]);
  if (j.contains("provenance")) s.provenance = Provenance::from_json(j["provenance"]);
  s.validate();
  return s;
}

/// max(max_v |<x, v>|, floor ||x||_p).
inline double distortion_norm(const FiniteVector& x, const DistortionNormSpec& spec) {
  double best = spec.floor * lp_norm(x, spec.p);
  for (const auto& v : spec.samples) best = std::max(best, std::abs(dot(x, v)));
  return best;
}

/// Upper bound on the dual norm of z for distortion_norm: the gauge of the
/// absolutely convex hull of samples and floor Ba(l_q), evaluated on
/// decompositions z = c v + r with at most one sample.
inline double distortion_dual_upper(const FiniteVector& z, const DistortionNormSpec& spec) {
  const double q = spec.q();
  const double plain = lp_norm(z, q) / spec.floor;
  double best = plain;
  for (const auto& v : spec.samples) {
    auto cost = [&](double c) { return std::abs(c) + lp_norm(linear_combination(1.0, z, -c, v), q) / spec.floor; };
    double lo = -plain, hi = plain;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + plain); ++it) {
      const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
      if (cost(m1) <= cost(m2))
        hi = m2;
      else
        lo = m1;
    }
    best = std::min({best, cost(0.5 * (lo + hi)), cost(dot(z, v))});
  }
  return best;
}

// --- biorthogonality chains --------------------------------------------------

struct ChainLink {
  std::string name;
  double lhs = 0.0, rhs = 0.0;
  bool holds = false;
};

struct ChainReport {
  double p = 2.0;
  double lambda = 1.0;
  double pairing_kl = 0.0;  ///< sum |x_k* x_l|
  double pairing_lk = 0.0;  ///< sum |x_l* x_k|
  std::vector<double> chain;  ///< successive quantities, each bounded by the next
  std::vector<ChainLink> links;
  bool holds = false;
  std::optional<double> final_bound;  ///< lambda eps^{2/r}, reported only
};

/// Evaluates <|v_k|, |v_l|> for v_k = bk_to_sphere(h_k, p), v_l = bk_to_sphere(h_l, q)
/// and every intermediate of its Cauchy-Schwarz / Holder bound.
inline ChainReport biorthogonality_chain(const BkElement& k, const BkElement& l, double p, double eps1,
                                         std::optional<double> eps = std::nullopt) {
  if (!(p > 1.0) || !std::isfinite(p)) throw Error(ErrorCode::InvalidExponent, "chain needs 1 < p < inf", p);
  if (!(eps1 > 0.0 && eps1 < 1.0)) throw Error(ErrorCode::OutOfRange, "eps_1 must lie in (0, 1)", eps1);
  if (std::min(k.mass, l.mass) < 1.0 - eps1)
    throw Error(ErrorCode::PreconditionFailed, "mass below 1 - eps_1", std::min(k.mass, l.mass));
  const double q = conjugate_exponent(p);
  ChainReport r;
  r.p = p;
  r.lambda = 1.0 / (1.0 - eps1);
  const FiniteVector vk = bk_to_sphere(k.h, p), vl = bk_to_sphere(l.h, q);
  const FiniteVector a = abs(pointwise_mul(k.x_star, k.x)), b = abs(pointwise_mul(l.x_star, l.x));
  r.pairing_kl = l1_mass(pointwise_mul(k.x_star, l.x));
  r.pairing_lk = l1_mass(pointwise_mul(l.x_star, k.x));

  // the side with exponent r >= 2 carries the Holder split
  const bool big_p = p >= 2.0;
  const double rr = big_p ? p : q;
  const FiniteVector& tail = big_p ? b : a;
  double mixed = 0.0, root = 0.0;
  for (const auto& [i, ai] : a) {
    const double bi = b[i];
    mixed += std::pow(ai, 1.0 / p) * std::pow(bi, 1.0 / q);
    root += std::sqrt(ai * bi);
  }
  const double tail_factor = std::pow(l1_mass(tail), (rr - 2.0) / rr);
  r.chain = {
      dot(vk, vl),
      r.lambda * mixed,
      r.lambda * std::pow(root, 2.0 / rr) * tail_factor,
      r.lambda * std::pow(r.pairing_kl * r.pairing_lk, 1.0 / rr) * tail_factor,
  };
  const char* names[] = {"mass normalisation", big_p ? "Holder p/2, p/(p-2)" : "Holder q/2, q/(q-2)",
                                "Cauchy-Schwarz"};
  r.holds = true;
  for (std::size_t i = 0; i + 1 < r.chain.size(); ++i) {
    const double lhs = r.chain[i], rhs = r.chain[i + 1];
    const bool ok = lhs <= rhs + 1e-10 * std::max(1.0, std::abs(rhs));
    r.links.push_back({names[i], lhs, rhs, ok});
    r.holds = r.holds && ok;
  }
  if (eps) r.final_bound = r.lambda * std::pow(*eps, 2.0 / rr);
  return r;
}

inline json to_json(const ChainReport& r) {
  json links = json::array();
  for (const auto& l : r.links) links.push_back({{"name", l.name}, {"lhs", l.lhs}, {"rhs", l.rhs}, {"holds", l.holds}});
  json j = {{"p", r.p},           {"lambda", r.lambda}, {"pairing_kl", r.pairing_kl}, {"pairing_lk", r.pairing_lk},
            {"chain", r.chain},   {"links", links},     {"holds", r.holds}};
  j["final_bound"] = r.final_bound ? json(*r.final_bound) : json(nullptr);
  return j;
}

// --- sampled D_k / C_k families ----------------------------------------------

struct SpecFamilyConfig {
  RelaxedBkConfig bk;
  double p = 2.0;
  std::size_t count = 8;
  std::size_t dim = 64;           ///< samples start uniformly in [1, dim]
  std::optional<double> floor;    ///< defaults to eps_k

  json to_json() const {
    return {{"bk", bk.to_json()}, {"p", p},        {"count", count},
            {"dim", dim},         {"floor", floor ? json(*floor) : json(nullptr)}};
  }
};

/// Relaxed-mode spec whose samples are D_k points v = |h|^{1/q} on S(l_q),
/// built from relaxed B_k elements; the elements are kept for chain checks.
struct SpecFamily {
  DistortionNormSpec spec;
  std::vector<BkElement> elements;
};

inline SpecFamily make_spec_family(const SpecFamilyConfig& cfg) {
  Rng rng(cfg.bk.seed);
  std::uniform_int_distribution<Index> start(1, std::max<Index>(1, cfg.dim));
  SpecFamily f;
  f.spec.p = cfg.p;
  f.spec.floor = cfg.floor ? *cfg.floor : cfg.bk.epsilon();
  f.spec.provenance.mode = "relaxed";
  f.spec.provenance.params = cfg.to_json();
  const double q = conjugate_exponent(cfg.p);
  for (std::size_t i = 0; i < cfg.count; ++i) {
    auto s = relaxed_bk_sample(rng, cfg.bk, start(rng));
    f.spec.samples.push_back(bk_to_sphere(s.element.h, q));
    f.elements.push_back(std::move(s.element));
  }
  f.spec.validate();
  return f;
}

// --- the Gamma norm -----------------------------------------------------------

enum class TargetBasis { Summing, L1, C0 };

inline TargetBasis target_from_string(const std::string& s) {
  if (s == "summing") return TargetBasis::Summing;
  if (s == "l1") return TargetBasis::L1;
  if (s == "c0") return TargetBasis::C0;
  throw Error(ErrorCode::ConfigError, "unknown target basis '" + s + "'");
}

inline const char* to_string(TargetBasis t) {
  switch (t) {
    case TargetBasis::Summing: return "summing";
    case TargetBasis::L1: return "l1";
    case TargetBasis::C0: return "c0";
  }
  return "?";
}

/// ||sum b_i w_i*|| for the biorthogonal functionals of the target basis.
inline double target_dual_norm(TargetBasis t, std::span<const double> b) {
  switch (t) {
    case TargetBasis::Summing: return summing_dual_norm(b);
    case TargetBasis::L1: {
      double m = 0.0;
      for (double v : b) m = std::max(m, std::abs(v));
      return m;
    }
    case TargetBasis::C0: {
      double s = 0.0;
      for (double v : b) s += std::abs(v);
      return s;
    }
  }
  return 0.0;
}

struct GammaFunctional {
  std::vector<double> b;        ///< n target coefficients
  std::vector<std::size_t> k;   ///< n^2 strictly increasing level labels, 1-based
  std::vector<FiniteVector> parts;  ///< n^2 successive functionals z*_{k_j}
  std::vector<double> certificates; ///< dual-norm upper bounds, filled by validation
};

struct GammaFunctionalSpec {
  TargetBasis target = TargetBasis::Summing;
  std::size_t n = 1;
  std::vector<DistortionNormSpec> levels;
  std::vector<GammaFunctional> functionals;

  double p() const { return levels.empty() ? 2.0 : levels.front().p; }

  /// Checks every chain certificate and records the dual bounds.
  void validate() {
    if (n == 0 || levels.empty()) throw Error(ErrorCode::ConfigError, "Gamma spec needs n >= 1 and a level");
    for (const auto& lv : levels) {
      lv.validate();
      if (lv.p != levels.front().p) throw Error(ErrorCode::ConfigError, "levels must share p");
    }
    for (std::size_t f = 0; f < functionals.size(); ++f) {
      auto& g = functionals[f];
      if (g.b.size() != n || g.k.size() != n * n || g.parts.size() != n * n)
        throw Error(ErrorCode::InvalidCertificate, "functional has wrong shape", kNoMeasure, f);
      const double bd = target_dual_norm(target, g.b);
      if (bd > 1.0 + 1e-12) throw Error(ErrorCode::InvalidCertificate, "target dual norm above 1", bd, f);
      if (BlockSequence::first_violation(g.parts))
        throw Error(ErrorCode::InvalidCertificate, "parts are not successive", kNoMeasure, f);
      g.certificates.assign(n * n, 0.0);
      for (std::size_t j = 0; j < n * n; ++j) {
        if (g.k[j] == 0 || g.k[j] > levels.size() || (j > 0 && g.k[j] <= g.k[j - 1]))
          throw Error(ErrorCode::InvalidCertificate, "level labels must increase within range", kNoMeasure, f);
        const std::size_t level = j == 0 ? 1 : g.k[j - 1];
        const double c = distortion_dual_upper(g.parts[j], levels[level - 1]);
        g.certificates[j] = c;
        if (c > 3.0 + 1e-9) throw Error(ErrorCode::InvalidCertificate, "part outside 3 Ba(X_k*)", c, f);
      }
    }
  }
};

inline json to_json(const GammaFunctionalSpec& s) {
  json levels = json::array(), fs = json::array();
  for (const auto& l : s.levels) levels.push_back(to_json(l));
  for (const auto& g : s.functionals) fs.push_back({{"b", g.b}, {"k", g.k}, {"parts", to_json(g.parts)}});
  return {{"target", to_string(s.target)}, {"n", s.n}, {"levels", levels}, {"functionals", fs}};
}

inline GammaFunctionalSpec gamma_spec_from_json(const json& j) {
  GammaFunctionalSpec s;
  s.target = target_from_string(j.value("target", std::string("summing")));
  s.n = j.at("n").get<std::size_t>();
  for (const auto& l : j.at("levels")) s.levels.push_back(distortion_spec_from_json(l));
  for (const auto& f : j.at("functionals"))
    s.functionals.push_back({f.at("b").get<std::vector<double>>(), f.at("k").get<std::vector<std::size_t>>(),
                             vectors_from_json(f.at("parts")), {}});
  s.validate();
  return s;
}

inline double gamma_functional_value(const GammaFunctional& g, std::size_t n, const FiniteVector& x) {
  double v = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double inner = 0.0;
    for (std::size_t j = i * n; j < (i + 1) * n; ++j) inner += dot(g.parts[j], x);
    v += g.b[i] * inner;
  }
  return v;
}

struct GammaValue {
  double value = 0.0;
  double lower = 0.0;  ///< 3 ||x||_{level 1}
  double upper = 0.0;  ///< 6 n^2 ||x||_p
  bool band_holds = false;
};

/// max(max_z* |z*(x)|, 3 ||x||_{level 1}) over a validated spec.
inline GammaValue gamma_norm(const FiniteVector& x, const GammaFunctionalSpec& spec) {
  GammaValue r;
  r.lower = 3.0 * distortion_norm(x, spec.levels.front());
  r.upper = 6.0 * static_cast<double>(spec.n * spec.n) * lp_norm(x, spec.p());
  r.value = r.lower;
  for (const auto& g : spec.functionals) r.value = std::max(r.value, std::abs(gamma_functional_value(g, spec.n, x)));
  const double tol = 1e-10 * std::max(1.0, r.upper);
  r.band_holds = r.lower <= r.value + tol && r.value <= r.upper + tol;
  if (!r.band_holds) throw Error(ErrorCode::ConstantViolated, "Gamma norm outside its band", r.value);
  return r;
}

struct GammaSampleConfig {
  std::size_t n = 2;
  std::size_t count = 16;
  std::size_t dim = 64;
  TargetBasis target = TargetBasis::Summing;
  std::uint64_t seed = 0;
};

/// Random functionals with certified chains over the given levels: parts on
/// successive segments of [1, dim], each scaled to a certified bound of 3.
inline GammaFunctionalSpec sample_gamma_spec(std::vector<DistortionNormSpec> levels, const GammaSampleConfig& cfg) {
  const std::size_t parts = cfg.n * cfg.n;
  if (levels.size() < parts) throw Error(ErrorCode::ConfigError, "need at least n^2 levels", static_cast<double>(levels.size()));
  if (cfg.dim < parts) throw Error(ErrorCode::ConfigError, "dim must be at least n^2", static_cast<double>(cfg.dim));
  GammaFunctionalSpec s{cfg.target, cfg.n, std::move(levels), {}};
  Rng rng(cfg.seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (std::size_t f = 0; f < cfg.count; ++f) {
    GammaFunctional g;
    for (std::size_t i = 0; i < cfg.n; ++i) g.b.push_back(U(rng));
    const double bd = target_dual_norm(cfg.target, g.b);
    for (auto& v : g.b) v /= std::max(bd, 1e-300);
    // increasing labels: a random subset of 1..L of size n^2
    std::vector<std::size_t> labels(s.levels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = i + 1;
    std::shuffle(labels.begin(), labels.end(), rng);
    g.k.assign(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(parts));
    std::sort(g.k.begin(), g.k.end());
    const std::size_t seg = cfg.dim / parts;
    for (std::size_t j = 0; j < parts; ++j) {
      const FiniteVector z = random_gaussian(rng, seg, static_cast<Index>(1 + j * seg));
      const std::size_t level = j == 0 ? 1 : g.k[j - 1];
      g.parts.push_back(scale(z, 3.0 / distortion_dual_upper(z, s.levels[level - 1])));
    }
    s.functionals.push_back(std::move(g));
  }
  s.validate();
  return s;
}

// --- distortion-ratio experiments ---------------------------------------------

struct ExperimentConfig {
  std::size_t subspaces = 16;
  std::size_t sphere_samples = 64;
  std::size_t dim = 32;
  std::size_t blocks = 2;     ///< dimension of each block subspace
  bool through_samples = false;  ///< first basis vector is the l_p-dual of a spec sample
  std::uint64_t seed = 0;
  bool timing = false;

  json to_json() const {
    return {{"subspaces", subspaces}, {"sphere_samples", sphere_samples}, {"dim", dim},
            {"blocks", blocks},       {"through_samples", through_samples}, {"seed", seed}};
  }
};

struct SubspaceResult {
  std::vector<FiniteVector> basis;
  double min = 0.0, max = 0.0, ratio = 1.0;
  std::vector<double> argmin, argmax;  ///< coefficients of the witnesses
};

struct ExperimentReport {
  ExperimentConfig config;
  DistortionNormSpec spec;
  std::vector<SubspaceResult> results;
  double ratio_min = 1.0, ratio_median = 1.0, ratio_max = 1.0;
  std::optional<double> seconds;
};

namespace detail {

/// Positive block on a random segment starting after `after`, normalised in l_p.
inline FiniteVector random_block(Rng& rng, Index after, std::size_t max_len, double p) {
  std::uniform_int_distribution<std::size_t> len(1, std::max<std::size_t>(1, max_len));
  std::uniform_real_distribution<double> val(0.05, 1.0);
  const std::size_t L = len(rng);
  std::vector<double> v(L);
  for (auto& t : v) t = val(rng);
  const FiniteVector b = FiniteVector::from_dense(v, after + 1);
  return scale(b, 1.0 / lp_norm(b, p));
}

inline FiniteVector lp_dual_point(const FiniteVector& v, double q) {
  const FiniteVector x = map_values(v, [q](double t) { return std::copysign(std::pow(std::abs(t), q - 1.0), t); });
  return scale(x, 1.0 / lp_norm(x, conjugate_exponent(q)));
}

}  // namespace detail

inline ExperimentReport distortion_experiment(const DistortionNormSpec& spec, const ExperimentConfig& cfg) {
  spec.validate();
  if (cfg.subspaces == 0 || cfg.sphere_samples == 0 || cfg.blocks == 0 || cfg.dim < cfg.blocks)
    throw Error(ErrorCode::ConfigError, "experiment needs positive counts and dim >= blocks");
  if (cfg.through_samples && spec.samples.empty())
    throw Error(ErrorCode::ConfigError, "through_samples needs a spec with samples");
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport rep{cfg, spec, {}, 1.0, 1.0, 1.0, std::nullopt};
  Rng rng(cfg.seed);
  std::normal_distribution<double> N01;
  const double p = spec.p;
  for (std::size_t s = 0; s < cfg.subspaces; ++s) {
    SubspaceResult r;
    Index last = 0;
    if (cfg.through_samples) {
      std::uniform_int_distribution<std::size_t> pick(0, spec.samples.size() - 1);
      r.basis.push_back(detail::lp_dual_point(spec.samples[pick(rng)], spec.q()));
      last = r.basis.back().max_index();
    }
    while (r.basis.size() < cfg.blocks) {
      const std::size_t room = cfg.dim > last ? (cfg.dim - last) / (cfg.blocks - r.basis.size()) : 1;
      r.basis.push_back(detail::random_block(rng, last, room, p));
      last = r.basis.back().max_index();
    }
    r.min = std::numeric_limits<double>::infinity();
    r.max = 0.0;
    auto visit = [&](const std::vector<double>& a) {
      const FiniteVector y = combine(r.basis, a);
      const double ny = lp_norm(y, p);
      const double v = distortion_norm(y, spec) / ny;
      std::vector<double> an(a);
      for (auto& t : an) t /= ny;
      if (v < r.min) r.min = v, r.argmin = an;
      if (v > r.max) r.max = v, r.argmax = an;
    };
    for (std::size_t i = 0; i < cfg.blocks; ++i) {
      std::vector<double> e(cfg.blocks, 0.0);
      e[i] = 1.0;
      visit(e);
    }
    for (std::size_t t = 0; t < cfg.sphere_samples; ++t) {
      std::vector<double> a(cfg.blocks);
      for (auto& v : a) v = N01(rng);
      visit(a);
    }
    r.ratio = r.max / r.min;
    rep.results.push_back(std::move(r));
  }
  std::vector<double> ratios;
  for (const auto& r : rep.results) ratios.push_back(r.ratio);
  std::sort(ratios.begin(), ratios.end());
  rep.ratio_min = ratios.front();
  rep.ratio_max = ratios.back();
  rep.ratio_median = ratios[ratios.size() / 2];
  if (cfg.timing)
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

inline json to_json(const ExperimentReport& r) {
  json subs = json::array();
  for (const auto& s : r.results)
    subs.push_back({{"basis", to_json(s.basis)},
                    {"min", s.min},
                    {"max", s.max},
                    {"ratio", s.ratio},
                    {"argmin", s.argmin},
                    {"argmax", s.argmax}});
  json j = {{"config", r.config.to_json()},
            {"spec", {{"p", r.spec.p}, {"floor", r.spec.floor}, {"sample_count", r.spec.samples.size()}}},
            {"provenance", r.spec.provenance.to_json()},
            {"summary", {{"ratio_min", r.ratio_min}, {"ratio_median", r.ratio_median}, {"ratio_max", r.ratio_max}}},
            {"subspaces", subs}};
  if (r.seconds) j["wall_clock_seconds"] = *r.seconds;
  return j;
}

inline std::string to_csv(const ExperimentReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "subspace,min,max,ratio\n";
  for (std::size_t i = 0; i < r.results.size(); ++i)
    os << i << ',' << r.results[i].min << ',' << r.results[i].max << ',' << r.results[i].ratio << '\n';
  return os.str();
}

}  // namespace distort
