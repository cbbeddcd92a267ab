#pragma once

// Deterministic purchase-to-pay log generator with planted, labeled
// anomalies at the object level.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ocad/csv.hpp"
#include "ocad/error.hpp"
#include "ocad/ocel.hpp"
#include "ocad/util.hpp"

namespace ocad {

enum class AnomalyKind {
  // Invoice received before the order is created and approved; labels the order.
  kMaverickBuying,
  // Requisition changed after its approval, linked to the order; labels the order.
  kPostMortemPRChange,
  // Two invoice+payment chains on one order; labels the order.
  kDoubleInvoice,
  // Order closed, then reopened after a very long gap; labels the order.
  kReopenLongGap,
  // Order approval missing; labels the order's invoice, whose own lifecycle
  // is indistinguishable from a normal one.
  kBlockedInvoice,
};

inline constexpr AnomalyKind kAllAnomalyKinds[] = {
    AnomalyKind::kMaverickBuying, AnomalyKind::kPostMortemPRChange,
    AnomalyKind::kDoubleInvoice, AnomalyKind::kReopenLongGap,
    AnomalyKind::kBlockedInvoice};

inline std::string to_string(AnomalyKind k) {
  switch (k) {
    case AnomalyKind::kMaverickBuying: return "MaverickBuying";
    case AnomalyKind::kPostMortemPRChange: return "PostMortemPRChange";
    case AnomalyKind::kDoubleInvoice: return "DoubleInvoice";
    case AnomalyKind::kReopenLongGap: return "ReopenLongGap";
    case AnomalyKind::kBlockedInvoice: return "BlockedInvoice";
  }
  return "Unknown";
}

inline AnomalyKind parse_anomaly_kind(const std::string& s) {
  for (AnomalyKind k : kAllAnomalyKinds) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorKind::kInvalidConfig, "unknown anomaly kind '" + s + "'");
}

namespace p2p {
inline constexpr const char* kRequisition = "requisition";
inline constexpr const char* kOrder = "order";
inline constexpr const char* kInvoice = "invoice";
inline constexpr const char* kPayment = "payment";

inline constexpr const char* kCreateRequisition = "Create Requisition";
inline constexpr const char* kApproveRequisition = "Approve Requisition";
inline constexpr const char* kChangeRequisition = "Change Requisition";
inline constexpr const char* kCreateOrder = "Create Purchase Order";
inline constexpr const char* kSubmitOrder = "Submit Purchase Order for Approval";
inline constexpr const char* kApproveOrder = "Approve Purchase Order";
inline constexpr const char* kReceiveInvoice = "Receive Invoice";
inline constexpr const char* kPayInvoice = "Pay Invoice";
inline constexpr const char* kCloseOrder = "Close Purchase Order";
inline constexpr const char* kReopenOrder = "(Re)Open Purchase Order";
}  // namespace p2p

struct SynthConfig {
  std::size_t n_orders = 100;
  std::map<AnomalyKind, double> anomaly_rates;
  std::uint64_t seed = 0;
  double origin = 1672531200.0;  // 2023-01-01T00:00:00Z
  double mean_gap = 21600.0;     // seconds between steps of one order
  double mean_arrival = 3600.0;  // seconds between order creations
  // Reopen happens at least this many mean gaps after closing.
  double reopen_gap_factor = 100.0;
};

struct SynthGroundTruth {
  // Every object of the log; an empty set marks a normal object.
  std::map<ObjectId, std::set<AnomalyKind>> labels;

  std::set<ObjectId> labeled(AnomalyKind k) const {
    std::set<ObjectId> out;
    for (const auto& [id, kinds] : labels) {
      if (kinds.count(k)) out.insert(id);
    }
    return out;
  }

  std::set<ObjectId> anomalous() const {
    std::set<ObjectId> out;
    for (const auto& [id, kinds] : labels) {
      if (!kinds.empty()) out.insert(id);
    }
    return out;
  }
};

inline void validate(const SynthConfig& cfg) {
  if (cfg.n_orders < 1) throw Error(ErrorKind::kInvalidConfig, "n_orders must be >= 1");
  double total = 0.0;
  for (const auto& [kind, rate] : cfg.anomaly_rates) {
    if (!(rate >= 0.0 && rate <= 1.0)) {
      throw Error(ErrorKind::kInvalidConfig, to_string(kind) + " rate outside [0, 1]");
    }
    total += rate;
  }
  if (total > 1.0 + 1e-12) throw Error(ErrorKind::kInvalidConfig, "anomaly rates sum above 1");
  if (!(cfg.mean_gap > 0.0) || !(cfg.mean_arrival > 0.0) || !(cfg.reopen_gap_factor >= 1.0)) {
    throw Error(ErrorKind::kInvalidConfig, "gaps must be positive");
  }
}

namespace detail {

inline std::string padded(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%05zu", prefix, i);
  return buf;
}

class P2PBuilder {
 public:
  explicit P2PBuilder(Rng& rng) : rng_(rng) {}

  // Milliseconds, so every timestamp is an exact multiple of 1 ms.
  long long gap_ms(double mean_seconds) {
    return std::max(1LL, std::llround(rng_.exponential(mean_seconds) * 1000.0));
  }

  void emit(long long t_ms, const char* activity, std::vector<ObjectId> objects) {
    Event e;
    e.id = padded("e", ++event_counter_);
    e.activity = activity;
    e.time = static_cast<double>(t_ms) / 1000.0;
    e.objects = std::move(objects);
    events_.push_back(std::move(e));
  }

  void add_object(ObjectId id, const char* type, AttributeMap atts) {
    objects_.push_back(Object{std::move(id), type, std::move(atts)});
  }

  std::vector<Event> take_events() { return std::move(events_); }
  std::vector<Object> take_objects() { return std::move(objects_); }

 private:
  Rng& rng_;
  std::size_t event_counter_ = 0;
  std::vector<Event> events_;
  std::vector<Object> objects_;
};

}  // namespace detail

// Normal flow per order: Create Requisition, Approve Requisition, Create
// Purchase Order, Submit Purchase Order for Approval, Approve Purchase Order,
// Receive Invoice, Pay Invoice. Each planted kind is assigned to exactly
// round(rate * n_orders) distinct orders. Pure function of the config.
inline std::pair<OcelLog, SynthGroundTruth> generate_p2p(const SynthConfig& cfg) {
  namespace k = p2p;
  validate(cfg);
  Rng rng(cfg.seed);

  std::vector<std::size_t> slots(cfg.n_orders);
  for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = i;
  rng.shuffle(slots);
  std::vector<std::set<AnomalyKind>> planted(cfg.n_orders);
  std::size_t next = 0;
  for (AnomalyKind kind : kAllAnomalyKinds) {
    auto it = cfg.anomaly_rates.find(kind);
    if (it == cfg.anomaly_rates.end()) continue;
    const auto count = static_cast<std::size_t>(
        std::llround(it->second * static_cast<double>(cfg.n_orders)));
    for (std::size_t j = 0; j < count && next < slots.size(); ++j) {
      planted[slots[next++]].insert(kind);
    }
  }

  static const char* const kVendors[] = {"Acme", "Globex", "Initech", "Umbrella"};
  detail::P2PBuilder b(rng);
  SynthGroundTruth truth;
  long long t_order = std::llround(cfg.origin * 1000.0);
  for (std::size_t i = 0; i < cfg.n_orders; ++i) {
    const auto& kinds = planted[i];
    const ObjectId req = detail::padded("req_", i + 1);
    const ObjectId po = detail::padded("po_", i + 1);
    const ObjectId inv = detail::padded("inv_", i + 1);
    const ObjectId pay = detail::padded("pay_", i + 1);

    const double amount = std::round(std::exp(7.0 + 0.5 * rng.normal()) * 100.0) / 100.0;
    const std::string vendor = kVendors[rng.below(4)];
    b.add_object(req, k::kRequisition, {{"amount", amount}});
    b.add_object(po, k::kOrder, {{"amount", amount}, {"vendor", vendor}});
    b.add_object(inv, k::kInvoice, {{"amount", amount}});
    b.add_object(pay, k::kPayment, {{"amount", amount}});

    t_order += b.gap_ms(cfg.mean_arrival);
    long long t = t_order;
    auto step = [&](const char* activity, std::vector<ObjectId> objs) {
      t += b.gap_ms(cfg.mean_gap);
      b.emit(t, activity, std::move(objs));
    };

    const bool maverick = kinds.count(AnomalyKind::kMaverickBuying) > 0;
    if (maverick) step(k::kReceiveInvoice, {po, inv});
    step(k::kCreateRequisition, {req});
    step(k::kApproveRequisition, {req});
    step(k::kCreateOrder, {req, po});
    step(k::kSubmitOrder, {po});
    if (!kinds.count(AnomalyKind::kBlockedInvoice)) step(k::kApproveOrder, {po});
    if (kinds.count(AnomalyKind::kPostMortemPRChange)) step(k::kChangeRequisition, {req, po});
    if (!maverick) step(k::kReceiveInvoice, {po, inv});
    step(k::kPayInvoice, {po, inv, pay});
    if (kinds.count(AnomalyKind::kDoubleInvoice)) {
      const ObjectId inv2 = inv + "_2";
      const ObjectId pay2 = pay + "_2";
      b.add_object(inv2, k::kInvoice, {{"amount", amount}});
      b.add_object(pay2, k::kPayment, {{"amount", amount}});
      step(k::kReceiveInvoice, {po, inv2});
      step(k::kPayInvoice, {po, inv2, pay2});
      truth.labels[inv2];
      truth.labels[pay2];
    }
    if (kinds.count(AnomalyKind::kReopenLongGap)) {
      step(k::kCloseOrder, {po});
      t += std::llround(cfg.reopen_gap_factor * cfg.mean_gap * 1000.0);
      step(k::kReopenOrder, {po});
    }

    truth.labels[req];
    truth.labels[pay];
    auto& order_labels = truth.labels[po];
    auto& invoice_labels = truth.labels[inv];
    for (AnomalyKind kind : kinds) {
      (kind == AnomalyKind::kBlockedInvoice ? invoice_labels : order_labels).insert(kind);
    }
  }
  return {OcelLog(b.take_events(), b.take_objects()), std::move(truth)};
}

inline std::string ground_truth_to_csv(const SynthGroundTruth& truth) {
  std::string out = csv_row({"object_id", "anomaly_kinds"});
  for (const auto& [id, kinds] : truth.labels) {
    std::string joined;
    for (AnomalyKind k : kinds) {
      if (!joined.empty()) joined += ';';
      joined += to_string(k);
    }
    out += csv_row({id, joined});
  }
  return out;
}

}  // namespace ocad
