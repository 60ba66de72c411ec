#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <optional>

#include "distort/finite_vector.hpp"

namespace distort {

/// A value in [-inf, inf) where -inf is an explicit state rather than a
/// floating-point infinity. Reading the number of a -inf value throws.
class EntropyValue {
 public:
  static EntropyValue neg_infinity() { return EntropyValue(); }
  explicit EntropyValue(double v) : value_(v) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "entropy values must be finite or NEG_INFINITY");
  }

  bool is_neg_infinity() const noexcept { return !value_.has_value(); }
  bool is_finite() const noexcept { return value_.has_value(); }

  double value() const {
    if (!value_) throw Error(ErrorCode::PreconditionFailed, "arithmetic on NEG_INFINITY entropy");
    return *value_;
  }

  friend bool operator==(const EntropyValue&, const EntropyValue&) = default;
  friend std::partial_ordering operator<=>(const EntropyValue& a, const EntropyValue& b) {
    if (a.is_neg_infinity() || b.is_neg_infinity())
      return a.is_neg_infinity() == b.is_neg_infinity()
                 ? std::partial_ordering::equivalent
                 : (a.is_neg_infinity() ? std::partial_ordering::less : std::partial_ordering::greater);
    return *a.value_ <=> *b.value_;
  }

 private:
  EntropyValue() = default;
  std::optional<double> value_;
};

/// E(h, x) = sum_i |h_i| log|x_i| (natural log, 0 log 0 = 0).
/// NEG_INFINITY exactly when supp h is not contained in supp x.
inline EntropyValue entropy(const FiniteVector& h, const FiniteVector& x) {
  double s = 0.0;
  auto xi = x.begin();
  for (const auto& [i, hv] : h) {
    while (xi != x.end() && xi->first < i) ++xi;
    if (xi == x.end() || xi->first != i) return EntropyValue::neg_infinity();
    s += std::abs(hv) * std::log(std::abs(xi->second));
  }
  return EntropyValue(s);
}

namespace detail {
inline double mazur_gap(double a) { return std::log(0.5 * (a + 1.0 / a)); }
}  // namespace detail

/// Largest eta with log((sqrt a + 1/sqrt a)/2) > eta whenever |a - 1| > eps.
/// g(t) = log((t + 1/t)/2) is strictly monotone on each side of 1, so the
/// binding values are at a = 1 - eps and a = 1 + eps.
inline double eta(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::OutOfRange, "eta needs 0 < eps < 1", eps);
  return std::min(detail::mazur_gap(std::sqrt(1.0 - eps)), detail::mazur_gap(std::sqrt(1.0 + eps)));
}

inline double psi(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::OutOfRange, "psi needs 0 < eps < 1", eps);
  return eps * eta(eps);
}

}  // namespace distort
