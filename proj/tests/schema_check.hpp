#pragma once

#include <json.hpp>

#include <fstream>
#include <string>
#include <vector>

namespace adr::test {

/// Checks the subset of JSON Schema used by the files in schemas/: type,
/// enum, required, properties, items, minimum, maximum and file-relative
/// $ref. Returns one message per violation.
class SchemaChecker {
 public:
  explicit SchemaChecker(std::string dir) : dir_(std::move(dir)) {}

  std::vector<std::string> check(const nlohmann::json& doc, const std::string& schema_file) const {
    std::vector<std::string> errors;
    walk(doc, load(schema_file), "$", errors);
    return errors;
  }

 private:
  nlohmann::json load(const std::string& file) const {
    std::ifstream in(dir_ + "/" + file);
    return nlohmann::json::parse(in);
  }

  static bool has_type(const nlohmann::json& v, const std::string& t) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "boolean") return v.is_boolean();
    if (t == "null") return v.is_null();
    if (t == "integer") return v.is_number_integer();
    if (t == "number") return v.is_number();
    return false;
  }

  void walk(const nlohmann::json& v, const nlohmann::json& s, const std::string& path,
            std::vector<std::string>& errors) const {
    if (s.contains("$ref")) {
      walk(v, load(s["$ref"].get<std::string>()), path, errors);
      return;
    }
    if (s.contains("type")) {
      bool ok = false;
      if (s["type"].is_array()) {
        for (const auto& t : s["type"]) ok = ok || has_type(v, t.get<std::string>());
      } else {
        ok = has_type(v, s["type"].get<std::string>());
      }
      if (!ok) {
        errors.push_back(path + ": wrong type");
        return;
      }
    }
    if (s.contains("enum")) {
      bool ok = false;
      for (const auto& e : s["enum"]) ok = ok || e == v;
      if (!ok) errors.push_back(path + ": value not in enum");
    }
    if (v.is_number()) {
      const double x = v.get<double>();
      if (s.contains("minimum") && x < s["minimum"].get<double>()) errors.push_back(path + ": below minimum");
      if (s.contains("maximum") && x > s["maximum"].get<double>()) errors.push_back(path + ": above maximum");
    }
    if (v.is_object()) {
      if (s.contains("required"))
        for (const auto& k : s["required"])
          if (!v.contains(k.get<std::string>())) errors.push_back(path + ": missing " + k.get<std::string>());
      if (s.contains("properties"))
        for (const auto& [k, sub] : s["properties"].items())
          if (v.contains(k)) walk(v[k], sub, path + "." + k, errors);
    }
    if (v.is_array() && s.contains("items"))
      for (std::size_t i = 0; i < v.size(); ++i)
        walk(v[i], s["items"], path + "[" + std::to_string(i) + "]", errors);
  }

  std::string dir_;
};

}  // namespace adr::test
