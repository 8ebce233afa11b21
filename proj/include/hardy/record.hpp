#pragma once

// Flat JSON result records. Numbers print at 17 significant digits, keys keep
// insertion order, so equal inputs give byte-identical output.

#include <cmath>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <fmt/format.h>

namespace hardy {

inline std::string json_number(double x) {
  if (std::isnan(x)) return "\"nan\"";
  if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
  return fmt::format("{:.17g}", x);
}

inline std::string json_string(std::string_view s) {
  std::string out = "\"";
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          out += fmt::format("\\u{:04x}", static_cast<unsigned>(static_cast<unsigned char>(ch)));
        } else {
          out += ch;
        }
    }
  }
  out += '"';
  return out;
}

class Record {
 public:
  Record& set(std::string key, double value) { return raw(std::move(key), json_number(value)); }
  Record& set(std::string key, int value) { return raw(std::move(key), std::to_string(value)); }
  Record& set(std::string key, bool value) { return raw(std::move(key), value ? "true" : "false"); }
  Record& set(std::string key, std::string_view value) { return raw(std::move(key), json_string(value)); }
  Record& set(std::string key, const char* value) { return set(std::move(key), std::string_view(value)); }
  Record& set(std::string key, const std::vector<double>& values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out += ", ";
      out += json_number(values[i]);
    }
    out += "]";
    return raw(std::move(key), std::move(out));
  }
  Record& set(std::string key, const Record& nested) { return raw(std::move(key), nested.dump(0)); }
  Record& null(std::string key) { return raw(std::move(key), "null"); }

  Record& raw(std::string key, std::string json) {
    for (auto& [k, v] : fields_) {
      if (k == key) {
        v = std::move(json);
        return *this;
      }
    }
    fields_.emplace_back(std::move(key), std::move(json));
    return *this;
  }

  /// indent 0 prints on one line.
  std::string dump(int indent = 2) const {
    if (fields_.empty()) return "{}";
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    const char* sep = indent > 0 ? ",\n" : ", ";
    std::string out = indent > 0 ? "{\n" : "{";
    for (std::size_t i = 0; i < fields_.size(); ++i) {
      if (i) out += sep;
      out += pad + json_string(fields_[i].first) + ": " + fields_[i].second;
    }
    out += indent > 0 ? "\n}" : "}";
    return out;
  }

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};

}  // namespace hardy
