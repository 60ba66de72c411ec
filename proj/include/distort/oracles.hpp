#pragma once

#include <memory>
#include <string>

#include "distort/norms.hpp"
#include "distort/schlumprecht.hpp"

namespace distort {

namespace detail {
inline double parse_exponent(const std::string& s) {
  if (s == "inf" || s == "infinity") return kInfinity;
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw Error(ErrorCode::ConfigError, "bad exponent '" + s + "'");
  return v;
}
}  // namespace detail

/// Parses a space tag: "lp:<p>" (p may be "inf"), "schlumprecht",
/// or "conv:<p>:<space>" for the p-convexification of another tag.
inline OraclePtr make_oracle(const std::string& tag) {
  if (tag == "schlumprecht" || tag == "S") return std::make_shared<SchlumprechtNorm>();
  if (tag.rfind("lp:", 0) == 0) return std::make_shared<LpNorm>(detail::parse_exponent(tag.substr(3)));
  if (tag.rfind("conv:", 0) == 0) {
    const auto rest = tag.substr(5);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) throw Error(ErrorCode::ConfigError, "conv tag needs conv:<p>:<space>");
    return std::make_shared<ConvexifiedNorm>(detail::parse_exponent(rest.substr(0, colon)),
                                             make_oracle(rest.substr(colon + 1)));
  }
  throw Error(ErrorCode::ConfigError, "unknown space tag '" + tag + "'");
}

}  // namespace distort
