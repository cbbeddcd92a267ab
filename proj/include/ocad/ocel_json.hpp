#pragma once

// OCEL 2.0 JSON import/export.

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ocad/error.hpp"
#include "ocad/ocel.hpp"
#include "ocad/util.hpp"

namespace ocad {

namespace detail {

using json = nlohmann::json;

inline const json& require(const json& j, const char* key,
                           std::string_view where) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw Error(ErrorKind::kMalformedDocument,
                std::string(where) + " lacks required key '" + key + "'");
  }
  return *it;
}

inline std::string require_string(const json& j, const char* key,
                                  std::string_view where) {
  const json& v = require(j, key, where);
  if (!v.is_string()) {
    throw Error(ErrorKind::kMalformedDocument,
                std::string(where) + " key '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

inline bool is_numeric_type(const std::string& t) {
  return t == "float" || t == "integer" || t == "int" || t == "double" ||
         t == "number";
}

// type name -> attribute names declared numeric.
inline std::map<std::string, std::set<std::string>> numeric_declarations(
    const json& doc, const char* key) {
  std::map<std::string, std::set<std::string>> out;
  auto it = doc.find(key);
  if (it == doc.end() || !it->is_array()) return out;
  for (const json& t : *it) {
    if (!t.is_object() || !t.contains("name") || !t["name"].is_string()) {
      continue;
    }
    auto& names = out[t["name"].get<std::string>()];
    if (!t.contains("attributes") || !t["attributes"].is_array()) continue;
    for (const json& a : t["attributes"]) {
      if (a.is_object() && a.contains("name") && a.contains("type") &&
          a["type"].is_string() && is_numeric_type(a["type"])) {
        names.insert(a["name"].get<std::string>());
      }
    }
  }
  return out;
}

inline AttributeValue to_attribute_value(const json& v, bool declared_numeric,
                                         std::string_view where) {
  if (v.is_number()) return AttributeValue(v.get<double>());
  if (v.is_boolean()) return AttributeValue(v.get<bool>() ? "true" : "false");
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (declared_numeric) {
      try {
        return AttributeValue(parse_double(s));
      } catch (const Error&) {
        // Declared numeric but not parseable: keep the text.
      }
    }
    return AttributeValue(s);
  }
  throw Error(ErrorKind::kMalformedDocument,
              std::string(where) + ": unsupported attribute value " + v.dump());
}

}  // namespace detail

// Qualifiers and object-to-object relationships are read and discarded.
// Object attributes carrying change times collapse to the latest value per
// name (ties resolved by document order).
inline OcelLog parse_ocel_json(std::string_view text) {
  using detail::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kMalformedDocument, e.what());
  }
  if (!doc.is_object()) {
    throw Error(ErrorKind::kMalformedDocument, "top level must be an object");
  }
  const auto numeric_object_atts = detail::numeric_declarations(doc, "objectTypes");
  const auto numeric_event_atts = detail::numeric_declarations(doc, "eventTypes");

  const json& jobjects = detail::require(doc, "objects", "document");
  const json& jevents = detail::require(doc, "events", "document");
  if (!jobjects.is_array() || !jevents.is_array()) {
    throw Error(ErrorKind::kMalformedDocument,
                "'objects' and 'events' must be arrays");
  }

  std::vector<Object> objects;
  objects.reserve(jobjects.size());
  for (const json& jo : jobjects) {
    if (!jo.is_object()) {
      throw Error(ErrorKind::kMalformedDocument, "object entry is not an object");
    }
    Object o;
    o.id = detail::require_string(jo, "id", "object");
    o.type = detail::require_string(jo, "type", "object '" + o.id + "'");
    auto declared = numeric_object_atts.find(o.type);
    std::map<AttributeName, double> latest_time;
    if (auto it = jo.find("attributes"); it != jo.end() && !it->is_null()) {
      if (!it->is_array()) {
        throw Error(ErrorKind::kMalformedDocument,
                    "object '" + o.id + "' attributes must be a list");
      }
      for (const json& ja : *it) {
        const std::string where = "attribute of object '" + o.id + "'";
        const std::string name = detail::require_string(ja, "name", where);
        double t = 0.0;
        if (auto jt = ja.find("time"); jt != ja.end() && jt->is_string()) {
          t = parse_iso8601(jt->get<std::string>());
        }
        const bool numeric = declared != numeric_object_atts.end() &&
                             declared->second.count(name) > 0;
        AttributeValue value = detail::to_attribute_value(
            detail::require(ja, "value", where), numeric, where);
        auto prev = latest_time.find(name);
        if (prev == latest_time.end() || t >= prev->second) {
          latest_time[name] = t;
          o.attributes[name] = std::move(value);
        }
      }
    }
    objects.push_back(std::move(o));
  }

  std::vector<Event> events;
  events.reserve(jevents.size());
  for (const json& je : jevents) {
    if (!je.is_object()) {
      throw Error(ErrorKind::kMalformedDocument, "event entry is not an object");
    }
    Event e;
    e.id = detail::require_string(je, "id", "event");
    const std::string where = "event '" + e.id + "'";
    e.activity = detail::require_string(je, "type", where);
    e.time = parse_iso8601(detail::require_string(je, "time", where));
    auto declared = numeric_event_atts.find(e.activity);
    if (auto it = je.find("attributes"); it != je.end() && !it->is_null()) {
      if (!it->is_array()) {
        throw Error(ErrorKind::kMalformedDocument,
                    where + " attributes must be a list");
      }
      for (const json& ja : *it) {
        const std::string name = detail::require_string(ja, "name", where);
        const bool numeric = declared != numeric_event_atts.end() &&
                             declared->second.count(name) > 0;
        e.attributes[name] = detail::to_attribute_value(
            detail::require(ja, "value", where), numeric, where);
      }
    }
    if (auto it = je.find("relationships"); it != je.end() && !it->is_null()) {
      if (!it->is_array()) {
        throw Error(ErrorKind::kMalformedDocument,
                    where + " relationships must be a list");
      }
      for (const json& jr : *it) {
        e.objects.push_back(detail::require_string(jr, "objectId", where));
      }
    }
    events.push_back(std::move(e));
  }
  return OcelLog(std::move(events), std::move(objects));
}

// Emits types, objects and events in log order; times as UTC ISO-8601 with
// millisecond precision. Deterministic for a given log.
inline std::string serialize_ocel_json(const OcelLog& log) {
  using ojson = nlohmann::ordered_json;

  auto declare = [](std::map<std::string, std::map<std::string, bool>>& decl,
                    const std::string& type, const AttributeMap& atts) {
    auto& slot = decl[type];
    for (const auto& [name, v] : atts) {
      auto [it, inserted] = slot.emplace(name, v.is_number());
      if (!inserted) it->second = it->second && v.is_number();
    }
  };
  std::map<std::string, std::map<std::string, bool>> object_decl;
  std::map<std::string, std::map<std::string, bool>> event_decl;
  for (const Object& o : log.objects()) declare(object_decl, o.type, o.attributes);
  for (const Event& e : log.events()) declare(event_decl, e.activity, e.attributes);

  auto types_json = [](const std::map<std::string, std::map<std::string, bool>>& decl) {
    ojson arr = ojson::array();
    for (const auto& [type, atts] : decl) {
      ojson jatts = ojson::array();
      for (const auto& [name, numeric] : atts) {
        jatts.push_back({{"name", name}, {"type", numeric ? "float" : "string"}});
      }
      arr.push_back({{"name", type}, {"attributes", std::move(jatts)}});
    }
    return arr;
  };

  const std::string epoch = format_iso8601(0.0);
  ojson doc;
  doc["objectTypes"] = types_json(object_decl);
  doc["eventTypes"] = types_json(event_decl);
  ojson jobjects = ojson::array();
  for (const Object& o : log.objects()) {
    ojson atts = ojson::array();
    for (const auto& [name, v] : o.attributes) {
      ojson ja;
      ja["name"] = name;
      ja["time"] = epoch;
      if (v.is_number()) {
        ja["value"] = v.number();
      } else {
        ja["value"] = v.text();
      }
      atts.push_back(std::move(ja));
    }
    jobjects.push_back({{"id", o.id}, {"type", o.type}, {"attributes", std::move(atts)}});
  }
  doc["objects"] = std::move(jobjects);
  ojson jevents = ojson::array();
  for (const Event& e : log.events()) {
    ojson atts = ojson::array();
    for (const auto& [name, v] : e.attributes) {
      ojson ja;
      ja["name"] = name;
      if (v.is_number()) {
        ja["value"] = v.number();
      } else {
        ja["value"] = v.text();
      }
      atts.push_back(std::move(ja));
    }
    ojson rels = ojson::array();
    for (const ObjectId& oid : e.objects) {
      rels.push_back({{"objectId", oid}, {"qualifier", ""}});
    }
    jevents.push_back({{"id", e.id},
                       {"type", e.activity},
                       {"time", format_iso8601(e.time)},
                       {"attributes", std::move(atts)},
                       {"relationships", std::move(rels)}});
  }
  doc["events"] = std::move(jevents);
  return doc.dump(1) + "\n";
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::kIo, "cannot read '" + path + "'");
  return ss.str();
}

inline OcelLog read_ocel_file(const std::string& path) {
  return parse_ocel_json(read_text_file(path));
}

}  // namespace ocad
