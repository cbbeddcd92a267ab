#pragma once

// Per-object structures derived from an OcelLog: lifecycles, follows graphs,
// interaction sets and the attributes shared by every object of a type.

#include <algorithm>
#include <cstddef>
#include <iterator>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ocad/ocel.hpp"

namespace ocad {

using EventPair = std::pair<EventId, EventId>;

struct ObjectGraphs {
  std::set<EventPair> dfg;
  std::set<EventPair> efg;
};

// Objects of one target type related to a given object. "interact" excludes
// the object itself.
struct InteractionSets {
  std::set<ObjectId> interact;
  std::set<ObjectId> creation;
  std::set<ObjectId> continuation;
  std::set<ObjectId> cobirth;
  std::set<ObjectId> codeath;

  friend bool operator==(const InteractionSets&, const InteractionSets&) = default;
};

inline std::vector<EventId> lifecycle(const OcelLog& log, const ObjectId& o) {
  const auto& idx = log.lifecycle_of(log.object_index(o));
  std::vector<EventId> out;
  out.reserve(idx.size());
  for (std::size_t e : idx) out.push_back(log.events()[e].id);
  return out;
}

// Time span of an object's lifecycle; nullopt for an empty lifecycle.
struct LifecycleSpan {
  double start = 0.0;
  double end = 0.0;
};

inline std::optional<LifecycleSpan> lifecycle_span(const OcelLog& log,
                                                   std::size_t object) {
  const auto& idx = log.lifecycle_of(object);
  if (idx.empty()) return std::nullopt;
  return LifecycleSpan{log.events()[idx.front()].time,
                       log.events()[idx.back()].time};
}

inline ObjectGraphs object_graphs(const OcelLog& log, const ObjectId& o) {
  const auto& idx = log.lifecycle_of(log.object_index(o));
  const auto events = log.events();
  ObjectGraphs g;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i + 1 < idx.size()) {
      g.dfg.emplace(events[idx[i]].id, events[idx[i + 1]].id);
    }
    for (std::size_t j = i + 1; j < idx.size(); ++j) {
      g.efg.emplace(events[idx[i]].id, events[idx[j]].id);
    }
  }
  return g;
}

namespace detail {

// Positions of every object sharing at least one event with `object`,
// excluding the object itself; ascending.
inline std::vector<std::size_t> neighbors(const OcelLog& log,
                                          std::size_t object) {
  std::vector<std::size_t> out;
  for (std::size_t e : log.lifecycle_of(object)) {
    const auto& objs = log.objects_of_event(e);
    out.insert(out.end(), objs.begin(), objs.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  out.erase(std::remove(out.begin(), out.end(), object), out.end());
  return out;
}

}  // namespace detail

// Counts of the interaction sets, index based; the hot path for feature
// extraction.
struct InteractionCounts {
  std::size_t interact = 0;
  std::size_t creation = 0;
  std::size_t continuation = 0;
  std::size_t cobirth = 0;
  std::size_t codeath = 0;
};

inline InteractionCounts interaction_counts(
    const OcelLog& log, std::size_t object,
    const std::vector<std::size_t>& neighbors, const ObjectType& type) {
  InteractionCounts c;
  const auto self = lifecycle_span(log, object);
  for (std::size_t n : neighbors) {
    if (log.objects()[n].type != type) continue;
    ++c.interact;
    // Neighbors share an event with `object`, so both lifecycles are nonempty.
    const auto other = lifecycle_span(log, n);
    if (self->start < other->start) ++c.creation;
    if (self->end == other->start) ++c.continuation;
    if (self->start == other->start) ++c.cobirth;
    if (self->end == other->end) ++c.codeath;
  }
  return c;
}

inline InteractionSets interaction_sets(const OcelLog& log, const ObjectId& o,
                                        const ObjectType& type) {
  const std::size_t object = log.object_index(o);
  InteractionSets s;
  const auto self = lifecycle_span(log, object);
  for (std::size_t n : detail::neighbors(log, object)) {
    const Object& other_obj = log.objects()[n];
    if (other_obj.type != type) continue;
    s.interact.insert(other_obj.id);
    const auto other = lifecycle_span(log, n);
    if (self->start < other->start) s.creation.insert(other_obj.id);
    if (self->end == other->start) s.continuation.insert(other_obj.id);
    if (self->start == other->start) s.cobirth.insert(other_obj.id);
    if (self->end == other->end) s.codeath.insert(other_obj.id);
  }
  return s;
}

// Attribute names present on every object of `type`; empty when the type has
// no objects.
inline std::set<AttributeName> common_attributes(const OcelLog& log,
                                                 const ObjectType& type) {
  std::optional<std::set<AttributeName>> acc;
  for (const Object& o : log.objects()) {
    if (o.type != type) continue;
    std::set<AttributeName> names;
    for (const auto& [name, _] : o.attributes) names.insert(name);
    if (!acc) {
      acc = std::move(names);
      continue;
    }
    std::set<AttributeName> kept;
    std::set_intersection(acc->begin(), acc->end(), names.begin(), names.end(),
                          std::inserter(kept, kept.end()));
    acc = std::move(kept);
  }
  return acc.value_or(std::set<AttributeName>{});
}

}  // namespace ocad
