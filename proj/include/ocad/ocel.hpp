#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "ocad/error.hpp"

namespace ocad {

using EventId = std::string;
using ObjectId = std::string;
using ObjectType = std::string;
using Activity = std::string;
using AttributeName = std::string;

// Number | Text. Exactly one alternative is populated by construction.
class AttributeValue {
 public:
  AttributeValue() : value_(0.0) {}
  AttributeValue(double v) : value_(v) {}  // NOLINT(google-explicit-constructor)
  AttributeValue(std::string v) : value_(std::move(v)) {}  // NOLINT
  AttributeValue(const char* v) : value_(std::string(v)) {}  // NOLINT

  bool is_number() const { return std::holds_alternative<double>(value_); }
  bool is_text() const { return !is_number(); }
  double number() const { return std::get<double>(value_); }
  const std::string& text() const { return std::get<std::string>(value_); }

  friend bool operator==(const AttributeValue&, const AttributeValue&) = default;

 private:
  std::variant<double, std::string> value_;
};

using AttributeMap = std::map<AttributeName, AttributeValue>;

struct Event {
  EventId id;
  Activity activity;
  double time = 0.0;  // seconds since the Unix epoch
  std::vector<ObjectId> objects;  // omap; sorted, unique after log construction
  AttributeMap attributes;        // vmap

  friend bool operator==(const Event&, const Event&) = default;
};

struct Object {
  ObjectId id;
  ObjectType type;
  AttributeMap attributes;  // ovmap

  friend bool operator==(const Object&, const Object&) = default;
};

// Total order on events: timestamp first, then event identifier.
inline bool event_before(const Event& a, const Event& b) {
  if (a.time != b.time) return a.time < b.time;
  return a.id < b.id;
}

// Immutable object-centric event log. Construction validates references,
// sorts events under the total order and objects by identifier, and indexes
// the per-object lifecycles; every accessor afterwards is a const read.
class OcelLog {
 public:
  OcelLog() = default;

  OcelLog(std::vector<Event> events, std::vector<Object> objects)
      : events_(std::move(events)), objects_(std::move(objects)) {
    std::sort(objects_.begin(), objects_.end(),
              [](const Object& a, const Object& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < objects_.size(); ++i) {
      if (i > 0 && objects_[i].id == objects_[i - 1].id) {
        throw Error(ErrorKind::kDuplicateId,
                    "object id '" + objects_[i].id + "' appears twice");
      }
      object_index_.emplace(objects_[i].id, i);
    }

    std::sort(events_.begin(), events_.end(), event_before);
    event_objects_.resize(events_.size());
    lifecycles_.resize(objects_.size());
    for (std::size_t i = 0; i < events_.size(); ++i) {
      Event& e = events_[i];
      if (!event_index_.emplace(e.id, i).second) {
        throw Error(ErrorKind::kDuplicateId,
                    "event id '" + e.id + "' appears twice");
      }
      std::sort(e.objects.begin(), e.objects.end());
      e.objects.erase(std::unique(e.objects.begin(), e.objects.end()),
                      e.objects.end());
      auto& idx = event_objects_[i];
      idx.reserve(e.objects.size());
      for (const ObjectId& oid : e.objects) {
        auto it = object_index_.find(oid);
        if (it == object_index_.end()) {
          throw Error(ErrorKind::kDanglingReference,
                      "event '" + e.id + "' references unknown object '" +
                          oid + "'");
        }
        idx.push_back(it->second);
        lifecycles_[it->second].push_back(i);
      }
    }
  }

  std::span<const Event> events() const { return events_; }
  std::span<const Object> objects() const { return objects_; }

  std::optional<std::size_t> find_object(const ObjectId& id) const {
    auto it = object_index_.find(id);
    if (it == object_index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t object_index(const ObjectId& id) const {
    auto idx = find_object(id);
    if (!idx) throw Error(ErrorKind::kUnknownObject, "'" + id + "'");
    return *idx;
  }

  const Object& object(const ObjectId& id) const {
    return objects_[object_index(id)];
  }

  std::optional<std::size_t> find_event(const EventId& id) const {
    auto it = event_index_.find(id);
    if (it == event_index_.end()) return std::nullopt;
    return it->second;
  }

  // Positions into events(), ascending (hence in total order).
  const std::vector<std::size_t>& lifecycle_of(std::size_t object) const {
    return lifecycles_[object];
  }

  // Positions into objects() for the objects of an event, ascending.
  const std::vector<std::size_t>& objects_of_event(std::size_t event) const {
    return event_objects_[event];
  }

  std::vector<ObjectType> object_types() const {
    std::set<ObjectType> types;
    for (const Object& o : objects_) types.insert(o.type);
    return {types.begin(), types.end()};
  }

  std::vector<Activity> activities() const {
    std::set<Activity> acts;
    for (const Event& e : events_) acts.insert(e.activity);
    return {acts.begin(), acts.end()};
  }

  // Positions of the objects of one type, ascending by object id.
  std::vector<std::size_t> objects_of_type(const ObjectType& type) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < objects_.size(); ++i) {
      if (objects_[i].type == type) out.push_back(i);
    }
    return out;
  }

  friend bool operator==(const OcelLog& a, const OcelLog& b) {
    return a.events_ == b.events_ && a.objects_ == b.objects_;
  }

 private:
  std::vector<Event> events_;
  std::vector<Object> objects_;
  std::unordered_map<EventId, std::size_t> event_index_;
  std::unordered_map<ObjectId, std::size_t> object_index_;
  std::vector<std::vector<std::size_t>> event_objects_;
  std::vector<std::vector<std::size_t>> lifecycles_;
};

}  // namespace ocad
