#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "distort/finite_vector.hpp"
#include "distort/schlumprecht.hpp"

namespace distort {

using json = nlohmann::ordered_json;

/// A vector encodes as [[index, value], ...] with strictly increasing indices.
inline json to_json(const FiniteVector& x) {
  json arr = json::array();
  for (const auto& [i, v] : x) arr.push_back(json::array({i, v}));
  return arr;
}

inline FiniteVector vector_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::ConfigError, "vector must be an array of [index, value] pairs");
  std::vector<FiniteVector::Entry> e;
  for (const auto& pair : j) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() || !pair[1].is_number())
      throw Error(ErrorCode::ConfigError, "vector entries must be [index, value] pairs");
    const auto idx = pair[0].get<long long>();
    if (idx < 1) throw Error(ErrorCode::ConfigError, "vector indices start at 1");
    e.emplace_back(static_cast<Index>(idx), pair[1].get<double>());
  }
  return FiniteVector(std::move(e));
}

inline json to_json(const BlockSequence& blocks) {
  json arr = json::array();
  for (const auto& b : blocks) arr.push_back(to_json(b));
  return arr;
}

inline json to_json(const std::vector<FiniteVector>& vs) {
  json arr = json::array();
  for (const auto& b : vs) arr.push_back(to_json(b));
  return arr;
}

inline std::vector<FiniteVector> vectors_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::ConfigError, "expected an array of vectors");
  std::vector<FiniteVector> out;
  for (const auto& v : j) out.push_back(vector_from_json(v));
  return out;
}

inline BlockSequence blocks_from_json(const json& j) { return BlockSequence(vectors_from_json(j)); }

inline json to_json(const AnalysisNode& node) {
  json j;
  j["lo"] = node.segment.lo;
  j["hi"] = node.segment.hi;
  j["value"] = node.value;
  if (node.is_leaf()) {
    j["kind"] = "leaf";
    j["coordinate"] = node.coordinate;
  } else {
    j["kind"] = "split";
    j["parts"] = node.parts;
    j["weight"] = 1.0 / phi(node.parts);
    json kids = json::array();
    for (const auto& c : node.children) kids.push_back(to_json(c));
    j["children"] = std::move(kids);
  }
  return j;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, "invalid JSON in '" + path + "': " + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace distort
