#pragma once

#include "error.hpp"

#include <cstdint>
#include <string>
#include <string_view>

#include <fmt/format.h>
#include <json.hpp>

namespace hostscope::jsonl {

inline nlohmann::json parse_object(std::string_view line) {
  auto j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) fail(errc::parse, "line is not a JSON object");
  return j;
}

inline const nlohmann::json& field(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(errc::parse, fmt::format("missing key '{}'", key));
  return *it;
}

inline std::string string_field(const nlohmann::json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_string()) fail(errc::parse, fmt::format("key '{}' must be a string", key));
  return v.get<std::string>();
}

inline std::int64_t int_field(const nlohmann::json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_number_integer()) fail(errc::parse, fmt::format("key '{}' must be an integer", key));
  return v.get<std::int64_t>();
}

} // namespace hostscope::jsonl
