#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "distort/entropy.hpp"
#include "distort/norms.hpp"

namespace distort {

enum class EntropyMethod { Auto, ClosedForm, Multiplicative, DualColumnGeneration };

inline const char* to_string(EntropyMethod m) {
  switch (m) {
    case EntropyMethod::Auto: return "auto";
    case EntropyMethod::ClosedForm: return "closed-form";
    case EntropyMethod::Multiplicative: return "multiplicative";
    case EntropyMethod::DualColumnGeneration: return "dual-column-generation";
  }
  return "?";
}

struct EntropyOptions {
  double tolerance = 1e-7;  ///< bound on ||x* o x - |h|||_1
  std::size_t budget = 5000;
  EntropyMethod method = EntropyMethod::Auto;
};

/// x = F_X(h) together with the functional x* realising h = x* o x.
struct EntropyMaximizer {
  FiniteVector x;
  FiniteVector x_star;
  double entropy = 0.0;       ///< E_X(h) = E(h, x)
  double dual_entropy = 0.0;  ///< E(h, x*); equals E_{X*}(h) at the optimum
  double residual = 0.0;      ///< ||x* o x - |h|||_1
  std::size_t iterations = 0;
  EntropyMethod method = EntropyMethod::Auto;
};

namespace detail {

// Dense working representation over the support of h.
struct Positions {
  std::vector<Index> index;
  std::vector<double> a;  // |h_i|

  explicit Positions(const FiniteVector& h) : index(h.support()) {
    for (const auto& e : h) a.push_back(std::abs(e.second));
  }
  std::size_t size() const noexcept { return a.size(); }

  FiniteVector make(const std::vector<double>& v) const {
    std::vector<FiniteVector::Entry> e;
    e.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) e.emplace_back(index[i], v[i]);
    return FiniteVector(std::move(e));
  }
  // |f| read at the support positions.
  std::vector<double> read_abs(const FiniteVector& f) const {
    std::vector<double> out(size(), 0.0);
    auto it = f.begin();
    for (std::size_t i = 0; i < size(); ++i) {
      while (it != f.end() && it->first < index[i]) ++it;
      if (it != f.end() && it->first == index[i]) out[i] = std::abs(it->second);
    }
    return out;
  }
  double entropy(const std::vector<double>& v) const {
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i) s += a[i] * std::log(v[i]);
    return s;
  }
};

struct RawMaximizer {
  std::vector<double> x, x_star;
  std::size_t iterations = 0;
};

inline double residual_of(const Positions& P, const std::vector<double>& x, const std::vector<double>& xs) {
  double r = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) r += std::abs(xs[i] * x[i] - P.a[i]);
  return r;
}

inline RawMaximizer closed_form_lp(const Positions& P, double p) {
  RawMaximizer out;
  const std::size_t n = P.size();
  out.x.resize(n);
  out.x_star.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (p == 1.0) {
      out.x[i] = P.a[i];
      out.x_star[i] = 1.0;
    } else if (std::isinf(p)) {
      out.x[i] = 1.0;
      out.x_star[i] = P.a[i];
    } else {
      out.x[i] = std::pow(P.a[i], 1.0 / p);
      out.x_star[i] = std::pow(P.a[i], (p - 1.0) / p);
    }
  }
  return out;
}

// Primal ascent u_i <- u_i (a_i / (u_i f_i))^gamma on the positive sphere,
// f the norming functional at u. The first-order change of E along this step
// is gamma * (KL(a||w) + KL(w||a)) with w = u o f, so small steps always ascend.
inline RawMaximizer multiplicative(const Positions& P, const NormOracle& X, const EntropyOptions& opt) {
  const std::size_t n = P.size();
  auto normalise = [&](std::vector<double>& v) {
    const double nv = X.norm(P.make(v));
    for (auto& t : v) t /= nv;
  };
  auto functional = [&](const std::vector<double>& v) {
    auto f = X.norming_functional(P.make(v));
    if (!f) throw Error(ErrorCode::Unavailable, "oracle '" + X.tag() + "' has no norming functional");
    return P.read_abs(*f);
  };

  RawMaximizer out;
  std::vector<double> u = P.a;
  normalise(u);
  std::vector<double> f = functional(u);
  double E = P.entropy(u);
  double gamma = 0.5;
  std::vector<double> cand(n);
  for (; out.iterations < opt.budget; ++out.iterations) {
    if (residual_of(P, u, f) <= 0.1 * opt.tolerance) break;
    bool accepted = false;
    while (gamma > 1e-16) {
      for (std::size_t i = 0; i < n; ++i) {
        const double ratio = f[i] > 0 ? P.a[i] / (u[i] * f[i]) : 1e6;
        cand[i] = u[i] * std::pow(std::clamp(ratio, 1e-6, 1e6), gamma);
      }
      normalise(cand);
      const double Ec = P.entropy(cand);
      if (Ec > E) {
        u.swap(cand);
        E = Ec;
        gamma = std::min(1.0, 2.0 * gamma);
        accepted = true;
        break;
      }
      gamma *= 0.5;
    }
    if (!accepted) break;
    f = functional(u);
  }
  out.x = std::move(u);
  out.x_star = std::move(f);
  return out;
}

// Restricted master problem: maximise sum a_i log (V lambda)_i over the
// simplex. Optimality: G_j = sum_i a_i V_ij / y_i equals mass(a) on the
// support of lambda and is at most mass(a) elsewhere. Newton steps on the
// active face, with a pairwise transfer (best column gains from the worst
// active one, exact line search) whenever Newton fails to ascend.
inline void solve_master(const Positions& P, const std::vector<std::vector<double>>& V, std::vector<double>& lambda) {
  const std::size_t n = P.size();
  const std::size_t k = V.size();
  double mass = 0.0;
  for (double t : P.a) mass += t;
  auto y_of = [&](const std::vector<double>& lam) {
    std::vector<double> y(n, 0.0);
    for (std::size_t j = 0; j < k; ++j)
      if (lam[j] != 0.0)
        for (std::size_t i = 0; i < n; ++i) y[i] += lam[j] * V[j][i];
    return y;
  };
  auto phi_of = [&](const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (y[i] <= 0) return -std::numeric_limits<double>::infinity();
      s += P.a[i] * std::log(y[i]);
    }
    return s;
  };
  // Largest feasible step along d and the coordinate it zeroes.
  auto step_limit = [&](const std::vector<double>& d, std::size_t& blocking) {
    double tmax = std::numeric_limits<double>::infinity();
    blocking = k;
    for (std::size_t j = 0; j < k; ++j)
      if (d[j] < 0 && -lambda[j] / d[j] < tmax) {
        tmax = -lambda[j] / d[j];
        blocking = j;
      }
    return tmax;
  };
  // Exact maximiser over [0, tmax] of the concave line function.
  auto line_search = [&](const std::vector<double>& y, const std::vector<double>& d, double tmax) {
    std::vector<double> vd(n, 0.0);
    for (std::size_t j = 0; j < k; ++j)
      if (d[j] != 0.0)
        for (std::size_t i = 0; i < n; ++i) vd[i] += d[j] * V[j][i];
    auto deriv = [&](double t) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double yi = y[i] + t * vd[i];
        if (yi <= 0) return -std::numeric_limits<double>::infinity();
        s += P.a[i] * vd[i] / yi;
      }
      return s;
    };
    if (deriv(tmax) >= 0) return tmax;
    double lo = 0.0, hi = tmax;
    for (int it = 0; it < 200 && hi - lo > 1e-17 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (deriv(mid) > 0 ? lo : hi) = mid;
    }
    return lo;
  };
  auto stepped = [&](const std::vector<double>& d, double t, double tmax, std::size_t blocking) {
    std::vector<double> out(k);
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += out[j] = std::max(0.0, lambda[j] + t * d[j]);
    if (t >= tmax && blocking < k) {
      s -= out[blocking];
      out[blocking] = 0.0;
    }
    for (double& v : out) v /= s;
    return out;
  };

  const double tol = 1e-12 * mass;
  for (int it = 0; it < 2000; ++it) {
    const auto y = y_of(lambda);
    const double Phi = phi_of(y);
    std::vector<double> G(k, 0.0);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < n; ++i) G[j] += P.a[i] * V[j][i] / y[i];

    std::vector<std::size_t> F;
    std::size_t best = k, worst = k;
    for (std::size_t j = 0; j < k; ++j) {
      if (lambda[j] > 0) {
        F.push_back(j);
        if (worst == k || G[j] < G[worst]) worst = j;
      }
      if (best == k || G[j] > G[best]) best = j;
    }
    if (G[best] - G[worst] <= tol) return;
    if (lambda[best] == 0.0) F.push_back(best);

    // Newton on the active face: K d + nu 1 = G, sum d = 0.
    const auto m = static_cast<Eigen::Index>(F.size());
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m + 1, m + 1);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
    for (Eigen::Index r = 0; r < m; ++r) {
      for (Eigen::Index c = r; c < m; ++c) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += P.a[i] * V[F[r]][i] * V[F[c]][i] / (y[i] * y[i]);
        K(r, c) = K(c, r) = s;
      }
      K(r, m) = K(m, r) = 1.0;
      rhs(r) = G[F[r]];
    }
    const Eigen::VectorXd sol = K.completeOrthogonalDecomposition().solve(rhs);
    std::vector<double> d(k, 0.0);
    double slope = 0.0;
    for (Eigen::Index r = 0; r < m; ++r) {
      d[F[r]] = sol(r);
      slope += G[F[r]] * sol(r);
    }
    if (slope > 0 && std::isfinite(slope)) {
      std::size_t blocking = k;
      const double tmax = step_limit(d, blocking);
      auto trial = stepped(d, std::min(1.0, tmax), tmax, blocking);
      if (phi_of(y_of(trial)) > Phi) {
        lambda = std::move(trial);
        continue;
      }
    }
    std::fill(d.begin(), d.end(), 0.0);
    d[best] = 1.0;
    d[worst] = -1.0;
    const double tmax = lambda[worst];
    const double t = line_search(y, d, tmax);
    if (!(t > 0)) return;
    auto trial = stepped(d, t, tmax, worst);
    // Dropping a negligible column may lose a rounding error in Phi; allow it.
    if (!(phi_of(y_of(trial)) >= Phi - 1e-15 * std::abs(Phi))) return;
    lambda = std::move(trial);
  }
}

// Dual route for polyhedral unit balls: maximise sum a_i log y_i over the
// positive part of Ba(X*) by column generation. The pricing step is the
// norming functional of a/y; ||a/y||_X = mass(a) certifies optimality, and
// then x = (a/y)/||a/y|| is F_X(a) while y is the dual maximiser.
inline RawMaximizer dual_column_generation(const Positions& P, const NormOracle& X, const EntropyOptions& opt) {
  const std::size_t n = P.size();
  double mass = 0.0;
  for (double t : P.a) mass += t;
  auto column = [&](const std::vector<double>& v) {
    auto f = X.norming_functional(P.make(v));
    if (!f) throw Error(ErrorCode::Unavailable, "oracle '" + X.tag() + "' has no norming functional");
    return P.read_abs(*f);
  };
  std::vector<std::vector<double>> V;
  auto add = [&](std::vector<double> c) {
    for (const auto& old : V) {
      double diff = 0.0;
      for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(old[i] - c[i]));
      if (diff <= 1e-15) return false;
    }
    V.push_back(std::move(c));
    return true;
  };
  add(column(P.a));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> e(n, 0.0);
    e[i] = 1.0;
    add(column(e));
  }
  std::vector<double> lambda(V.size(), 1.0 / static_cast<double>(V.size()));

  RawMaximizer out;
  std::vector<double> g(n), y(n);
  double ng = 0.0;
  for (;;) {
    solve_master(P, V, lambda);
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t j = 0; j < V.size(); ++j)
      for (std::size_t i = 0; i < n; ++i) y[i] += lambda[j] * V[j][i];
    for (std::size_t i = 0; i < n; ++i) g[i] = P.a[i] / y[i];
    ng = X.norm(P.make(g));
    ++out.iterations;
    if (ng - mass <= 1e-3 * opt.tolerance * mass || out.iterations >= opt.budget) break;
    if (!add(column(g))) break;
    lambda.push_back(0.0);
  }
  out.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.x[i] = g[i] / ng;
  out.x_star = y;
  return out;
}

inline RawMaximizer maximise(const Positions& P, const NormOracle& X, const EntropyOptions& opt,
                             EntropyMethod& used) {
  if (const auto* conv = dynamic_cast<const ConvexifiedNorm*>(&X)) {
    // F_{X^(p)}(h) = F_X(h)^{1/p}, and z* o z = h lifts to x*_i = z*_i x_i^{p-1}.
    const double p = conv->exponent();
    RawMaximizer base = maximise(P, conv->base(), opt, used);
    for (std::size_t i = 0; i < P.size(); ++i) {
      base.x[i] = std::pow(base.x[i], 1.0 / p);
      base.x_star[i] = base.x_star[i] * std::pow(base.x[i], p - 1.0);
    }
    return base;
  }
  const auto* lp = dynamic_cast<const LpNorm*>(&X);
  switch (opt.method) {
    case EntropyMethod::ClosedForm:
      if (!lp) throw Error(ErrorCode::Unavailable, "no closed form for '" + X.tag() + "'");
      used = EntropyMethod::ClosedForm;
      return closed_form_lp(P, lp->exponent());
    case EntropyMethod::Multiplicative:
      used = EntropyMethod::Multiplicative;
      return multiplicative(P, X, opt);
    case EntropyMethod::DualColumnGeneration:
      used = EntropyMethod::DualColumnGeneration;
      return dual_column_generation(P, X, opt);
    case EntropyMethod::Auto:
      break;
  }
  if (lp) {
    used = EntropyMethod::ClosedForm;
    return closed_form_lp(P, lp->exponent());
  }
  if (X.smooth()) {
    used = EntropyMethod::Multiplicative;
    return multiplicative(P, X, opt);
  }
  used = EntropyMethod::DualColumnGeneration;
  return dual_column_generation(P, X, opt);
}

inline void check_normalised(const FiniteVector& h) {
  if (h.empty()) throw Error(ErrorCode::ZeroVector, "entropy maximisation at h = 0");
  const double m = l1_mass(h);
  if (std::abs(m - 1.0) > 1e-10) throw Error(ErrorCode::NotNormalized, "h must lie on S(l1)", m);
}

}  // namespace detail

/// F_X(h): the unique maximiser of E(h, .) over S(X) with supp x = supp h and
/// sign x = sign h, returned with its factorising functional.
inline EntropyMaximizer entropy_max(const FiniteVector& h, const NormOracle& X, const EntropyOptions& opt = {}) {
  detail::check_normalised(h);
  const detail::Positions P(h);
  EntropyMaximizer out;
  detail::RawMaximizer raw = detail::maximise(P, X, opt, out.method);
  out.iterations = raw.iterations;
  out.residual = detail::residual_of(P, raw.x, raw.x_star);
  out.entropy = P.entropy(raw.x);
  out.dual_entropy = P.entropy(raw.x_star);
  if (!(out.residual <= opt.tolerance))
    throw Error(ErrorCode::NonConvergence, "entropy maximisation residual above tolerance", out.residual);
  std::vector<double> sx = raw.x, ss = raw.x_star;
  for (std::size_t i = 0; i < P.size(); ++i)
    if (h[P.index[i]] < 0) {
      sx[i] = -sx[i];
      ss[i] = -ss[i];
    }
  out.x = P.make(sx);
  out.x_star = P.make(ss);
  return out;
}

/// E_{X*}(h) = sup{E(h, y) : y in Ba(X*)} for any nonzero h, by positive
/// homogeneity E_*(a h) = a E_*(h). `functional` is the maximiser F_*(h).
struct DualEntropy {
  double value = 0.0;
  FiniteVector functional;
  double residual = 0.0;
  std::size_t iterations = 0;
};

/// Shared estimator configuration for dual entropies. Every comparison of E_*
/// values inside one computation should go through a single instance.
class DualEntropyEstimator {
 public:
  DualEntropyEstimator(OraclePtr primal, EntropyOptions opt = {}) : X_(std::move(primal)), opt_(opt) {}

  const NormOracle& primal() const noexcept { return *X_; }
  const EntropyOptions& options() const noexcept { return opt_; }

  DualEntropy operator()(const FiniteVector& h) const {
    if (h.empty()) throw Error(ErrorCode::ZeroVector, "dual entropy of h = 0");
    const double m = l1_mass(h);
    const auto r = entropy_max(scale(abs(h), 1.0 / m), *X_, opt_);
    DualEntropy out;
    out.value = m * r.dual_entropy;
    out.functional = abs(r.x_star);
    out.residual = m * r.residual;
    out.iterations = r.iterations;
    return out;
  }

 private:
  OraclePtr X_;
  EntropyOptions opt_;
};

/// The Mazur map S(l1) -> S(lp): x_i = sign(h_i) |h_i|^{1/p}.
inline FiniteVector mazur_map(const FiniteVector& h, double p) {
  if (!(p > 1.0)) throw Error(ErrorCode::InvalidExponent, "mazur_map needs p > 1", p);
  const double m = l1_mass(h);
  if (h.empty() || std::abs(m - 1.0) > 1e-10) throw Error(ErrorCode::NotNormalized, "h must lie on S(l1)", m);
  return map_values(h, [p](double v) { return std::copysign(std::pow(std::abs(v), 1.0 / p), v); });
}

/// F_X^{-1}(x) = |x*| o x for x on S(X), x* the support functional at x.
inline FiniteVector support_functional_inverse(const FiniteVector& x, const NormOracle& X) {
  if (x.empty()) throw Error(ErrorCode::ZeroVector, "inverse map at x = 0");
  const double nx = X.norm(x);
  if (std::abs(nx - 1.0) > 1e-8) throw Error(ErrorCode::NotNormalized, "x must lie on S(X)", nx);
  auto f = X.norming_functional(x);
  if (!f) throw Error(ErrorCode::Unavailable, "oracle '" + X.tag() + "' has no norming functional");
  return pointwise_mul(abs(*f), x);
}

/// h = x* o x with ||x|| = 1 and x* on the dual sphere.
struct FactorizationPair {
  FiniteVector x;
  FiniteVector x_star;
  double residual = 0.0;
};

inline FactorizationPair factorize(const FiniteVector& h, const NormOracle& X, const EntropyOptions& opt = {}) {
  if (!is_nonnegative(h)) throw Error(ErrorCode::InvalidArgument, "factorize expects h >= 0");
  auto r = entropy_max(h, X, opt);
  return {std::move(r.x), std::move(r.x_star), r.residual};
}

}  // namespace distort
