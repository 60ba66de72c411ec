#pragma once

#include <charconv>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>

#include "distort/finite_vector.hpp"

namespace distort {

/// A norm on finitely supported sequences for which the unit vector basis
/// is normalized and 1-unconditional.
class NormOracle {
 public:
  virtual ~NormOracle() = default;

  virtual double norm(const FiniteVector& x) const = 0;

  /// A functional x* with dual norm 1 and x*(x) = norm(x). Returns nullopt
  /// when the space has no extractor; throws ZeroVector for x = 0.
  virtual std::optional<FiniteVector> norming_functional(const FiniteVector& x) const = 0;

  virtual std::string tag() const = 0;

  /// Differentiable away from the origin (unique norming functionals).
  virtual bool smooth() const { return false; }
};

using OraclePtr = std::shared_ptr<const NormOracle>;

/// Shortest round-trip decimal form of a real, "inf" for infinity.
inline std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

inline double lp_norm(const FiniteVector& x, double p) {
  if (!(p >= 1.0)) throw Error(ErrorCode::InvalidExponent, "lp norm needs p >= 1, got " + format_real(p), p);
  if (x.empty()) return 0.0;
  const double m = max_abs(x);
  if (std::isinf(p)) return m;
  if (p == 1.0) return l1_mass(x);
  double s = 0.0;
  for (const auto& e : x) s += std::pow(std::abs(e.second) / m, p);
  return m * std::pow(s, 1.0 / p);
}

/// Hölder conjugate exponent.
inline double conjugate_exponent(double p) {
  if (p == 1.0) return kInfinity;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

class LpNorm final : public NormOracle {
 public:
  explicit LpNorm(double p) : p_(p) {
    if (!(p >= 1.0)) throw Error(ErrorCode::InvalidExponent, "lp norm needs p >= 1", p);
  }

  double exponent() const noexcept { return p_; }

  double norm(const FiniteVector& x) const override { return lp_norm(x, p_); }

  std::optional<FiniteVector> norming_functional(const FiniteVector& x) const override {
    if (x.empty()) throw Error(ErrorCode::ZeroVector, "norming functional of the zero vector");
    auto sgn = [](double v) { return v > 0 ? 1.0 : -1.0; };
    if (p_ == 1.0) return map_values(x, sgn);
    if (std::isinf(p_)) {
      const double m = max_abs(x);
      for (const auto& [i, v] : x)
        if (std::abs(v) == m) return FiniteVector::unit(i, sgn(v));
    }
    const double n = norm(x);
    const double p = p_;
    return map_values(x, [&](double v) { return sgn(v) * std::pow(std::abs(v) / n, p - 1.0); });
  }

  std::string tag() const override { return "lp:" + format_real(p_); }
  bool smooth() const override { return p_ > 1.0 && std::isfinite(p_); }

 private:
  double p_;
};

/// The p-convexification X^(p): ||x||_(p) = || sum |x_i|^p e_i ||_X^(1/p).
class ConvexifiedNorm final : public NormOracle {
 public:
  ConvexifiedNorm(double p, OraclePtr base) : p_(p), base_(std::move(base)) {
    if (!(p > 1.0) || !std::isfinite(p))
      throw Error(ErrorCode::InvalidExponent, "convexification needs 1 < p < inf", p);
    if (!base_) throw Error(ErrorCode::InvalidArgument, "convexification needs a base space");
  }

  double exponent() const noexcept { return p_; }
  const NormOracle& base() const noexcept { return *base_; }
  const OraclePtr& base_ptr() const noexcept { return base_; }

  FiniteVector powered(const FiniteVector& x) const {
    const double p = p_;
    return map_values(x, [p](double v) { return std::pow(std::abs(v), p); });
  }

  double norm(const FiniteVector& x) const override {
    if (x.empty()) return 0.0;
    // Scale first so |x_i|^p stays representable.
    const double m = max_abs(x);
    return m * std::pow(base_->norm(powered(scale(x, 1.0 / m))), 1.0 / p_);
  }

  /// With f norming |x|^p in X: x*_i = sign(x_i) f_i |x_i|^(p-1) / ||x||^(p-1).
  /// Hölder against the measure f keeps x* inside the dual ball.
  std::optional<FiniteVector> norming_functional(const FiniteVector& x) const override {
    if (x.empty()) throw Error(ErrorCode::ZeroVector, "norming functional of the zero vector");
    const double n = norm(x);
    const FiniteVector u = scale(x, 1.0 / n);
    auto f = base_->norming_functional(powered(u));
    if (!f) return std::nullopt;
    const double p = p_;
    std::vector<FiniteVector::Entry> out;
    for (const auto& [i, v] : u) {
      const double fi = std::abs((*f)[i]);
      out.emplace_back(i, (v > 0 ? 1.0 : -1.0) * fi * std::pow(std::abs(v), p - 1.0));
    }
    return FiniteVector(std::move(out));
  }

  std::string tag() const override { return "conv:" + format_real(p_) + ":" + base_->tag(); }
  bool smooth() const override { return base_->smooth(); }

 private:
  double p_;
  OraclePtr base_;
};

inline double convexified_norm(const FiniteVector& x, double p, OraclePtr oracle) {
  return ConvexifiedNorm(p, std::move(oracle)).norm(x);
}

}  // namespace distort
