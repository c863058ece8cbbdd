#pragma once

// Minimal JSON Schema (draft-07 subset) validator for the shipped report
// schema: type, enum, required, properties, additionalProperties: false,
// items, minItems, minimum, maximum, exclusiveMinimum and local $ref.

#include <json.hpp>

#include <string>
#include <vector>

namespace schema_check {

using nlohmann::json;

class Validator {
 public:
  explicit Validator(json schema) : root_(std::move(schema)) {}

  std::vector<std::string> validate(const json& doc) const {
    std::vector<std::string> errors;
    check(root_, doc, "$", errors);
    return errors;
  }

 private:
  const json& resolve(const json& s) const {
    if (!s.contains("$ref")) return s;
    const std::string ref = s.at("$ref");
    const std::string prefix = "#/definitions/";
    return root_.at("definitions").at(ref.substr(prefix.size()));
  }

  static bool type_matches(const std::string& type, const json& v) {
    if (type == "object") return v.is_object();
    if (type == "array") return v.is_array();
    if (type == "string") return v.is_string();
    if (type == "boolean") return v.is_boolean();
    if (type == "null") return v.is_null();
    if (type == "integer") return v.is_number_integer();
    if (type == "number") return v.is_number();
    return false;
  }

  void check(const json& schema_in, const json& v, const std::string& path,
             std::vector<std::string>& errors) const {
    const json& s = resolve(schema_in);
    if (s.contains("type")) {
      bool ok = false;
      if (s["type"].is_array()) {
        for (const auto& t : s["type"]) ok = ok || type_matches(t.get<std::string>(), v);
      } else {
        ok = type_matches(s["type"].get<std::string>(), v);
      }
      if (!ok) {
        errors.push_back(path + ": wrong type");
        return;
      }
    }
    if (s.contains("enum")) {
      bool found = false;
      for (const auto& e : s["enum"]) found = found || e == v;
      if (!found) errors.push_back(path + ": value not in enum");
    }
    if (v.is_number()) {
      const double x = v.get<double>();
      if (s.contains("minimum") && x < s["minimum"].get<double>()) {
        errors.push_back(path + ": below minimum");
      }
      if (s.contains("maximum") && x > s["maximum"].get<double>()) {
        errors.push_back(path + ": above maximum");
      }
      if (s.contains("exclusiveMinimum") && x <= s["exclusiveMinimum"].get<double>()) {
        errors.push_back(path + ": not above exclusiveMinimum");
      }
    }
    if (v.is_object()) {
      if (s.contains("required")) {
        for (const auto& k : s["required"]) {
          if (!v.contains(k.get<std::string>())) {
            errors.push_back(path + ": missing '" + k.get<std::string>() + "'");
          }
        }
      }
      const bool closed = s.contains("additionalProperties") && s["additionalProperties"] == false;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (s.contains("properties") && s["properties"].contains(it.key())) {
          check(s["properties"][it.key()], it.value(), path + "." + it.key(), errors);
        } else if (closed) {
          errors.push_back(path + ": unexpected key '" + it.key() + "'");
        }
      }
    }
    if (v.is_array()) {
      if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>()) {
        errors.push_back(path + ": too few items");
      }
      if (s.contains("items")) {
        for (std::size_t i = 0; i < v.size(); ++i) {
          check(s["items"], v[i], path + "[" + std::to_string(i) + "]", errors);
        }
      }
    }
  }

  json root_;
};

}  // namespace schema_check
