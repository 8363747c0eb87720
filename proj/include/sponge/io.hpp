#pragma once

#include <sponge/error.hpp>
#include <sponge/rational.hpp>
#include <sponge/system.hpp>

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

namespace sponge {

using Json = nlohmann::ordered_json;

/// Parsed sponge specification file, before validation.
struct SpongeSpec {
  RawSponge raw;
  std::optional<std::vector<Rational>> weights;
};

namespace detail {

inline Rational json_rational(const Json& v, const std::string& where) {
  std::string text;
  if (v.is_string())
    text = v.get<std::string>();
  else if (v.is_number_integer() || v.is_number_unsigned())
    text = v.dump();
  else if (v.is_number_float())
    // Shortest round-trip decimal of the JSON number, read exactly.
    text = v.dump();
  else
    throw ParseError(where + ": expected a number or numeric string");
  auto q = parse_rational(text);
  if (!q) throw ParseError(where + ": malformed number \"" + text + "\"");
  return *q;
}

inline std::vector<Rational> json_rational_list(const Json& v, const std::string& where) {
  if (!v.is_array()) throw ParseError(where + ": expected an array");
  std::vector<Rational> out;
  for (std::size_t k = 0; k < v.size(); ++k) out.push_back(json_rational(v[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

}  // namespace detail

inline SpongeSpec parse_spec(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("top level must be an object");
  if (!j.contains("dimension") || !j["dimension"].is_number_integer())
    throw ParseError("\"dimension\" must be an integer");
  if (!j.contains("maps") || !j["maps"].is_array()) throw ParseError("\"maps\" must be an array");
  SpongeSpec spec;
  spec.raw.dimension = j["dimension"].get<int>();
  for (std::size_t i = 0; i < j["maps"].size(); ++i) {
    const auto& m = j["maps"][i];
    std::string where = "maps[" + std::to_string(i) + "]";
    if (!m.is_object() || !m.contains("ratios") || !m.contains("translation"))
      throw ParseError(where + ": needs \"ratios\" and \"translation\"");
    spec.raw.maps.push_back(AffineMap{detail::json_rational_list(m["ratios"], where + ".ratios"),
                                      detail::json_rational_list(m["translation"], where + ".translation")});
  }
  if (j.contains("weights") && !j["weights"].is_null()) spec.weights = detail::json_rational_list(j["weights"], "weights");
  return spec;
}

inline Json spec_to_json(const SpongeSpec& spec) {
  Json j;
  j["dimension"] = spec.raw.dimension;
  j["maps"] = Json::array();
  for (const auto& m : spec.raw.maps) {
    Json jm;
    jm["ratios"] = Json::array();
    for (const auto& q : m.ratios) jm["ratios"].push_back(to_string(q));
    jm["translation"] = Json::array();
    for (const auto& q : m.translation) jm["translation"].push_back(to_string(q));
    j["maps"].push_back(std::move(jm));
  }
  if (spec.weights) {
    j["weights"] = Json::array();
    for (const auto& q : *spec.weights) j["weights"].push_back(to_string(q));
  }
  return j;
}

inline std::string serialize_spec(const SpongeSpec& spec) { return spec_to_json(spec).dump(2); }

/// A real rounded to 12 significant digits; non-finite values become null.
inline Json real_json(double x) {
  if (!std::isfinite(x)) return nullptr;
  if (x == 0) x = 0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::stod(buf);
}

inline std::string real_text(double x) {
  if (!std::isfinite(x)) return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
  if (x == 0) x = 0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace sponge
