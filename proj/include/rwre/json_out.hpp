#pragma once

// Compact JSON emission with every real printed to 17 significant digits.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace rwre {

std::string format_real(double x);  // "%.17g"; non-finite values become null

class JsonObject {
 public:
  JsonObject& real(std::string_view key, double value);
  JsonObject& real(std::string_view key, std::optional<double> value);
  JsonObject& integer(std::string_view key, std::int64_t value);
  JsonObject& boolean(std::string_view key, bool value);
  JsonObject& string(std::string_view key, std::string_view value);
  JsonObject& null(std::string_view key);
  // Inserts already-serialized JSON.
  JsonObject& raw(std::string_view key, std::string_view json);

  std::string str() const { return body_ + "}"; }

 private:
  void key(std::string_view k);
  std::string body_ = "{";
  bool first_ = true;
};

std::string json_quote(std::string_view s);

}  // namespace rwre
