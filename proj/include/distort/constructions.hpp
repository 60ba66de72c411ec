#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "distort/io.hpp"
#include "distort/random.hpp"
#include "distort/schlumprecht.hpp"

namespace distort {

/// Exact or relaxed configuration stamp. Relaxed parameters are echoed into
/// every report that consumes a relaxed object.
struct Provenance {
  std::string mode = "exact";
  json params = json::object();

  bool relaxed() const { return mode == "relaxed"; }
  json to_json() const { return {{"mode", mode}, {"params", params}}; }
  static Provenance from_json(const json& j) {
    Provenance p;
    if (j.is_null()) return p;
    p.mode = j.value("mode", std::string("exact"));
    if (j.contains("params")) p.params = j["params"];
    return p;
  }
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

// --- l1^n+ averages --------------------------------------------------------

struct L1PlusAverageCertificate {
  std::size_t n = 0;
  double C = 0.0;
  BlockSequence blocks;  ///< the n pieces, already scaled
  FiniteVector vector;   ///< their sum, ||vector||_S = 1
  double max_piece_norm = 0.0;
};

/// Groups the first n * floor(|base| / n) blocks of `base` into n successive
/// equal chunks, normalises the total in S and certifies ||piece|| <= C / n.
inline L1PlusAverageCertificate make_l1_plus_average(const BlockSequence& base, std::size_t n, double C) {
  if (n == 0 || base.size() < n)
    throw Error(ErrorCode::InvalidArgument, "need at least n blocks", static_cast<double>(base.size()));
  if (!(C > 0.0)) throw Error(ErrorCode::InvalidArgument, "C must be positive", C);
  const std::size_t chunk = base.size() / n;
  std::vector<FiniteVector> pieces;
  for (std::size_t i = 0; i < n; ++i) {
    FiniteVector s;
    for (std::size_t k = i * chunk; k < (i + 1) * chunk; ++k) s = s + base[k];
    pieces.push_back(std::move(s));
  }
  FiniteVector total;
  for (const auto& p : pieces) total = total + p;
  const double nt = schlumprecht_norm(total);
  if (nt == 0.0) throw Error(ErrorCode::ZeroVector, "blocks sum to zero");
  L1PlusAverageCertificate cert{n, C, BlockSequence{}, scale(total, 1.0 / nt), 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    pieces[i] = scale(pieces[i], 1.0 / nt);
    const double np = schlumprecht_norm(pieces[i]);
    cert.max_piece_norm = std::max(cert.max_piece_norm, np);
    if (np > C / static_cast<double>(n) + 1e-10)
      throw Error(ErrorCode::ConstantViolated, "piece " + std::to_string(i) + " exceeds C/n", np, i);
  }
  cert.blocks = BlockSequence(std::move(pieces));
  return cert;
}

// --- RIS certificates -------------------------------------------------------

/// log2 of M_phi(x) = phi^{-1}(c x^2) = 2^{c x^2} - 1, stable for huge arguments.
inline double log2_m_phi(double x, double c = 36.0) {
  const double y = c * x * x;
  return y + std::log1p(-std::exp2(-y)) / std::log(2.0);
}

struct RelaxedRisParams {
  std::string m_phi = "phi_inverse";  ///< "phi_inverse" (2^{c x^2} - 1) or "identity"
  double m_phi_coefficient = 36.0;
  double growth_scale = 1.0;  ///< condition becomes growth_scale (eps/2) phi(n_k)^{1/2} >= |supp x_{k-1}|

  json to_json() const {
    return {{"m_phi", m_phi}, {"m_phi_coefficient", m_phi_coefficient}, {"growth_scale", growth_scale}};
  }
  static RelaxedRisParams from_json(const json& j) {
    RelaxedRisParams r;
    r.m_phi = j.value("m_phi", r.m_phi);
    r.m_phi_coefficient = j.value("m_phi_coefficient", r.m_phi_coefficient);
    r.growth_scale = j.value("growth_scale", r.growth_scale);
    if (r.m_phi != "phi_inverse" && r.m_phi != "identity")
      throw Error(ErrorCode::ConfigError, "m_phi must be phi_inverse or identity");
    return r;
  }
};

struct RisCondition {
  std::string name;
  double required = 0.0;  ///< in log2 scale for lengths
  double measured = 0.0;
  bool pass = false;
};

struct RisCertificate {
  std::size_t N = 0;
  double eps = 0.0;
  double C = 0.0;
  std::vector<double> log2_lengths;  ///< log2 n_k
  std::vector<std::size_t> support_sizes;
  double log2_n1_required = 0.0;
  std::vector<RisCondition> conditions;
  Provenance provenance;
  bool pass = false;
};

/// Both RIS conditions from parameters alone; lengths are given in log2 so
/// that lengths beyond any native integer can be examined.
inline RisCertificate check_ris_parameters(std::size_t N, double eps, const std::vector<double>& log2_lengths,
                                           const std::vector<std::size_t>& support_sizes,
                                           const std::optional<RelaxedRisParams>& relaxed = std::nullopt) {
  if (N == 0 || log2_lengths.size() != N || support_sizes.size() != N)
    throw Error(ErrorCode::InvalidArgument, "RIS parameters must have length N");
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::OutOfRange, "RIS needs C = 1 + eps < 2", eps);
  RisCertificate cert;
  cert.N = N;
  cert.eps = eps;
  cert.C = 1.0 + eps;
  cert.log2_lengths = log2_lengths;
  cert.support_sizes = support_sizes;
  if (relaxed) {
    cert.provenance.mode = "relaxed";
    cert.provenance.params = relaxed->to_json();
  }
  const double x = static_cast<double>(N) / eps;
  double log2_m = 0.0;
  if (relaxed && relaxed->m_phi == "identity")
    log2_m = std::log2(x);
  else
    log2_m = log2_m_phi(x, relaxed ? relaxed->m_phi_coefficient : 36.0);
  // n_1 >= 2 C M_phi(N/eps) / (2 eps ln 2)
  cert.log2_n1_required = 1.0 + std::log2(cert.C) + log2_m - std::log2(2.0 * eps * std::log(2.0));
  cert.conditions.push_back({"n1", cert.log2_n1_required, log2_lengths[0], log2_lengths[0] >= cert.log2_n1_required});
  const double g = relaxed ? relaxed->growth_scale : 1.0;
  for (std::size_t k = 1; k < N; ++k) {
    // g (eps/2) phi(n_k)^{1/2} >= s  <=>  log2(1 + n_k) >= (2 s / (g eps))^2
    const double s = static_cast<double>(support_sizes[k - 1]);
    const double need_phi = std::pow(2.0 * s / (g * eps), 2.0);
    const double l2 = log2_lengths[k];
    const double have_phi = l2 > 50 ? l2 : std::log2(1.0 + std::exp2(l2));
    cert.conditions.push_back({"growth_" + std::to_string(k + 1), need_phi, have_phi, have_phi >= need_phi});
  }
  cert.pass = true;
  for (const auto& c : cert.conditions) cert.pass = cert.pass && c.pass;
  return cert;
}

inline RisCertificate check_ris(const std::vector<L1PlusAverageCertificate>& seq, std::size_t N, double eps,
                                const std::optional<RelaxedRisParams>& relaxed = std::nullopt) {
  if (seq.size() != N) throw Error(ErrorCode::InvalidArgument, "sequence length differs from N");
  std::vector<FiniteVector> vs;
  std::vector<double> log2n;
  std::vector<std::size_t> supp;
  for (const auto& c : seq) {
    if (std::abs(c.C - (1.0 + eps)) > 1e-12)
      throw Error(ErrorCode::InvalidArgument, "each average must carry constant 1 + eps", c.C);
    vs.push_back(c.vector);
    log2n.push_back(std::log2(static_cast<double>(c.n)));
    supp.push_back(c.vector.size());
  }
  BlockSequence check(std::move(vs));  // throws NonSuccessive
  return check_ris_parameters(N, eps, log2n, supp, relaxed);
}

inline json to_json(const RisCertificate& c) {
  json conds = json::array();
  for (const auto& k : c.conditions)
    conds.push_back({{"name", k.name}, {"required", k.required}, {"measured", k.measured}, {"pass", k.pass}});
  return {{"N", c.N},
          {"epsilon", c.eps},
          {"C", c.C},
          {"log2_lengths", c.log2_lengths},
          {"support_sizes", c.support_sizes},
          {"log2_n1_required", c.log2_n1_required},
          {"conditions", conds},
          {"pass", c.pass},
          {"provenance", c.provenance.to_json()}};
}

// --- averaged block functionals and B_k elements ----------------------------

/// (1/phi(p_k)) sum of p_k successive dual-ball functionals.
inline FiniteVector make_ak_functional(const std::vector<FiniteVector>& parts, std::size_t p_k) {
  if (parts.size() != p_k || p_k == 0)
    throw Error(ErrorCode::InvalidArgument, "need exactly p_k parts", static_cast<double>(parts.size()));
  const BlockSequence blocks(parts);
  return scale(sum(blocks), 1.0 / phi(p_k));
}

struct BkElement {
  FiniteVector h;       ///< x* o x / mass, on S(l1)
  FiniteVector x;       ///< x_k
  FiniteVector x_star;  ///< x_k*
  double mass = 0.0;    ///< ||x* o x||_1
};

inline BkElement make_bk_element(const FiniteVector& x, const FiniteVector& x_star, double eps_k) {
  const FiniteVector prod = pointwise_mul(x_star, x);
  const double mass = l1_mass(prod);
  if (mass < 1.0 - eps_k) throw Error(ErrorCode::MassTooSmall, "||x* o x||_1 below 1 - eps_k", mass);
  return {scale(prod, 1.0 / mass), x, x_star, mass};
}

/// Positive representative of {v in S(l_p) : |v|^p = |h|}.
inline FiniteVector bk_to_sphere(const FiniteVector& h, double p) {
  if (!(p > 1.0)) throw Error(ErrorCode::InvalidExponent, "bk_to_sphere needs p > 1", p);
  return map_values(h, [p](double v) { return std::pow(std::abs(v), 1.0 / p); });
}

inline json to_json(const BkElement& b) {
  return {{"h", to_json(b.h)}, {"x", to_json(b.x)}, {"x_star", to_json(b.x_star)}, {"mass", b.mass}};
}

inline BkElement bk_from_json(const json& j) {
  BkElement b;
  b.h = vector_from_json(j.at("h"));
  b.x = vector_from_json(j.at("x"));
  b.x_star = vector_from_json(j.at("x_star"));
  b.mass = j.at("mass").get<double>();
  return b;
}

// --- relaxed-mode B_k generator ---------------------------------------------

/// Desk-scale stand-in for the RIS construction: a vector of p_k pieces, each
/// an l1^{n}+ average of `inner`-coordinate flat blocks, paired with
/// (1/phi(p_k)) sum of the norming functionals of the pieces. Only the
/// constant C of each average is certified; the RIS growth thresholds are
/// relaxed and reported.
struct RelaxedBkConfig {
  std::size_t k = 1;
  std::size_t p_k = 2;
  std::size_t n = 2;       ///< l1^n+ length of each piece
  std::size_t inner = 8;   ///< coordinates per flat block
  double C = 1.5;          ///< constant of each l1^n+ average
  double jitter = 0.2;     ///< relative spread of block entries
  std::size_t gap = 3;     ///< maximal random gap between coordinates
  std::optional<double> eps_k;  ///< defaults to 2^{-k}
  std::uint64_t seed = 0;

  double epsilon() const { return eps_k ? *eps_k : std::exp2(-static_cast<double>(k)); }
  json to_json() const {
    return {{"k", k}, {"p_k", p_k}, {"n", n}, {"inner", inner}, {"C", C}, {"jitter", jitter},
            {"gap", gap}, {"eps_k", epsilon()}, {"seed", seed}};
  }
};

struct RelaxedBkSample {
  BkElement element;
  std::vector<L1PlusAverageCertificate> pieces;
  RisCertificate ris;
};

inline RelaxedBkSample relaxed_bk_sample(Rng& rng, const RelaxedBkConfig& cfg, Index start = 1) {
  std::uniform_real_distribution<double> jit(1.0 - cfg.jitter, 1.0 + cfg.jitter);
  std::uniform_int_distribution<std::size_t> gap(1, std::max<std::size_t>(1, cfg.gap));
  Index next = start;
  RelaxedBkSample out;
  std::vector<FiniteVector> pieces, functionals;
  for (std::size_t i = 0; i < cfg.p_k; ++i) {
    std::vector<FiniteVector> base;
    for (std::size_t b = 0; b < cfg.n; ++b) {
      std::vector<FiniteVector::Entry> e;
      for (std::size_t t = 0; t < cfg.inner; ++t) {
        e.emplace_back(next, jit(rng));
        next += gap(rng);
      }
      base.emplace_back(std::move(e));
    }
    auto cert = make_l1_plus_average(BlockSequence(std::move(base)), cfg.n, cfg.C);
    pieces.push_back(cert.vector);
    functionals.push_back(schlumprecht_norming_functional(cert.vector));
    out.pieces.push_back(std::move(cert));
  }
  FiniteVector total;
  for (const auto& p : pieces) total = total + p;
  const FiniteVector x = scale(total, 1.0 / schlumprecht_norm(total));
  const FiniteVector x_star = make_ak_functional(functionals, cfg.p_k);
  out.element = make_bk_element(x, x_star, cfg.epsilon());
  RelaxedRisParams rp;
  rp.m_phi = "identity";
  rp.growth_scale = 1e9;
  std::vector<double> log2n(cfg.p_k, std::log2(static_cast<double>(cfg.n)));
  std::vector<std::size_t> supp;
  for (const auto& p : pieces) supp.push_back(p.size());
  out.ris = check_ris_parameters(cfg.p_k, cfg.C - 1.0, log2n, supp, rp);
  return out;
}

}  // namespace distort
