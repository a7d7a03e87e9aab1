#include "memograph/json_schema.hpp"

namespace memograph {

namespace {

using nlohmann::json;

bool has_type(const json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "integer") return v.is_number_integer();
  if (type == "number") return v.is_number();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  return false;
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void check(const json& v, const json& schema, const std::string& path,
           std::vector<SchemaViolation>& out) {
  if (!schema.is_object()) return;

  if (auto t = schema.find("type"); t != schema.end()) {
    bool ok = false;
    std::string expected;
    if (t->is_string()) {
      ok = has_type(v, t->get<std::string>());
      expected = t->get<std::string>();
    } else if (t->is_array()) {
      for (const auto& alt : *t) {
        if (alt.is_string() && has_type(v, alt.get<std::string>())) ok = true;
        expected += (expected.empty() ? "" : "|") + alt.get<std::string>();
      }
    }
    if (!ok) {
      out.push_back({path, "expected " + expected});
      return;
    }
  }

  if (auto e = schema.find("enum"); e != schema.end() && e->is_array()) {
    bool found = false;
    for (const auto& allowed : *e) found = found || allowed == v;
    if (!found) out.push_back({path, "value not in enum"});
  }

  if (v.is_string()) {
    if (auto m = schema.find("minLength"); m != schema.end() && m->is_number_unsigned()) {
      if (v.get<std::string>().size() < m->get<std::size_t>()) {
        out.push_back({path, "string shorter than minLength"});
      }
    }
  }

  if (v.is_number()) {
    if (auto m = schema.find("minimum"); m != schema.end() && m->is_number() &&
                                         v.get<double>() < m->get<double>()) {
      out.push_back({path, "below minimum"});
    }
    if (auto m = schema.find("maximum"); m != schema.end() && m->is_number() &&
                                         v.get<double>() > m->get<double>()) {
      out.push_back({path, "above maximum"});
    }
  }

  if (v.is_object()) {
    if (auto req = schema.find("required"); req != schema.end() && req->is_array()) {
      for (const auto& name : *req) {
        if (name.is_string() && !v.contains(name.get<std::string>())) {
          out.push_back({join(path, name.get<std::string>()), "missing required field"});
        }
      }
    }
    const auto props = schema.find("properties");
    const bool closed = schema.value("additionalProperties", true) == false;
    for (const auto& [key, child] : v.items()) {
      if (props != schema.end() && props->contains(key)) {
        check(child, (*props)[key], join(path, key), out);
      } else if (closed) {
        out.push_back({join(path, key), "unexpected field"});
      }
    }
  }

  if (v.is_array()) {
    if (auto m = schema.find("minItems"); m != schema.end() && m->is_number_unsigned()) {
      if (v.size() < m->get<std::size_t>()) out.push_back({path, "fewer than minItems"});
    }
    if (auto items = schema.find("items"); items != schema.end()) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        check(v[i], *items, path + "[" + std::to_string(i) + "]", out);
      }
    }
  }
}

}  // namespace

std::vector<SchemaViolation> check_schema(const json& doc, const json& schema) {
  std::vector<SchemaViolation> out;
  check(doc, schema, "", out);
  return out;
}

}  // namespace memograph
