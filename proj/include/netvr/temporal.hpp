#pragma once

// Time cursor over discrete presence slots (time frames, attribute bins, or
// two compared frames) with linear fade transitions between slots.

#include "graph.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace netvr {

enum class CursorMode { TimeFrames, AttributeFilter, Comparison };

/// Presence masks per cursor slot. Edges are present only with both endpoints.
class PresenceTable {
 public:
  PresenceTable() = default;
  explicit PresenceTable(std::vector<FramePresence> slots) : slots_(std::move(slots)) {}

  std::uint32_t size() const { return static_cast<std::uint32_t>(slots_.size()); }
  const FramePresence& slot(std::uint32_t i) const { return slots_.at(i); }
  bool node(std::uint32_t slot, NodeIndex n) const { return slots_[slot].nodes[n] != 0; }
  bool edge(std::uint32_t slot, EdgeIndex e) const { return slots_[slot].edges[e] != 0; }

 private:
  std::vector<FramePresence> slots_;
};

inline PresenceTable time_frame_table(const DynamicGraph& g) {
  std::vector<FramePresence> slots;
  for (FrameIndex f = 0; f < g.frame_count(); ++f) slots.push_back(frame_presence(g, f));
  return PresenceTable(std::move(slots));
}

/// Two-slot table switching between frames `a` and `b`.
inline PresenceTable comparison_table(const DynamicGraph& g, FrameIndex a, FrameIndex b) {
  return PresenceTable({frame_presence(g, a), frame_presence(g, b)});
}

/// Numeric node attribute used for filtering: "value" or any numeric field
/// carried in the node's extra attributes.
inline std::optional<double> node_attribute(const NodeRecord& n, const std::string& name) {
  if (name == "value") return n.value;
  auto it = n.attributes.find(name);
  if (it == n.attributes.end() || !it->is_number()) return std::nullopt;
  return it->get<double>();
}

/// Splits the attribute's range into `bins` equal-width bins; slot b holds the
/// nodes whose attribute falls in bin b (the top edge belongs to the last
/// bin). Nodes without the attribute are absent everywhere.
inline PresenceTable attribute_bin_table(const DynamicGraph& g, const std::string& attribute, std::uint32_t bins = 10) {
  if (bins == 0) throw std::invalid_argument("attribute_bin_table: bins must be > 0");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::vector<std::optional<double>> vals;
  vals.reserve(g.node_count());
  for (const auto& n : g.nodes()) {
    vals.push_back(node_attribute(n, attribute));
    if (vals.back()) {
      lo = std::min(lo, *vals.back());
      hi = std::max(hi, *vals.back());
    }
  }
  std::vector<FramePresence> slots(bins);
  for (auto& s : slots) {
    s.nodes.assign(g.node_count(), 0);
    s.edges.assign(g.edge_count(), 0);
  }
  const double width = (hi - lo) / bins;
  for (NodeIndex n = 0; n < g.node_count(); ++n) {
    if (!vals[n]) continue;
    std::uint32_t b = width > 0.0 ? static_cast<std::uint32_t>((*vals[n] - lo) / width) : 0;
    slots[std::min(b, bins - 1)].nodes[n] = 1;
  }
  for (auto& s : slots)
    for (EdgeIndex e = 0; e < g.edge_count(); ++e) s.edges[e] = s.nodes[g.source(e)] && s.nodes[g.target(e)];
  return PresenceTable(std::move(slots));
}

// ---------------------------------------------------------------------------
// Cursor

struct Transition {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  double progress = 0.0;
  /// Visual state the fade starts from, as a convex mix of slots. A plain step
  /// starts from {from: 1}; retargeting mid-fade starts from the blend on screen.
  std::vector<std::pair<std::uint32_t, double>> origin;
};

struct ScrubParams {
  double deadzone = 0.3;
  double steps_per_second = 2.0;
};

struct TimeCursor {
  CursorMode mode = CursorMode::TimeFrames;
  std::uint32_t count = 1;  // slots in the active presence table
  std::uint32_t current = 0;
  std::optional<Transition> transition;
  double duration = 0.5;  // seconds per fade
  double cooldown = 0.0;  // seconds until the next step is allowed
  ScrubParams scrub;

  /// Slot the cursor is heading to (the current slot when idle).
  std::uint32_t target() const { return transition ? transition->to : current; }
};

inline TimeCursor make_cursor(std::uint32_t count, CursorMode mode = CursorMode::TimeFrames) {
  if (count == 0) throw std::invalid_argument("make_cursor: count must be > 0");
  TimeCursor c;
  c.mode = mode;
  c.count = count;
  return c;
}

/// Linear cross-fade between presence in the `from` and `to` slots.
inline double fade_opacity(double progress, bool present_from, bool present_to) {
  const double p = std::clamp(progress, 0.0, 1.0);
  return (1.0 - p) * (present_from ? 1.0 : 0.0) + p * (present_to ? 1.0 : 0.0);
}

/// Opacity of one element under the cursor; `present(slot)` reports whether
/// the element exists in a slot.
template <typename PresentFn>
double element_opacity(const TimeCursor& c, PresentFn&& present) {
  if (!c.transition) return present(c.current) ? 1.0 : 0.0;
  const auto& t = *c.transition;
  double start = 0.0;
  for (const auto& [slot, w] : t.origin) start += w * (present(slot) ? 1.0 : 0.0);
  return (1.0 - t.progress) * start + t.progress * (present(t.to) ? 1.0 : 0.0);
}

inline std::vector<std::pair<std::uint32_t, double>> visual_mix(const TimeCursor& c) {
  if (!c.transition) return {{c.current, 1.0}};
  const auto& t = *c.transition;
  std::vector<std::pair<std::uint32_t, double>> mix;
  auto add = [&](std::uint32_t slot, double w) {
    if (w <= 1e-12) return;
    for (auto& [s, ww] : mix)
      if (s == slot) {
        ww += w;
        return;
      }
    mix.emplace_back(slot, w);
  };
  for (const auto& [slot, w] : t.origin) add(slot, (1.0 - t.progress) * w);
  add(t.to, t.progress);
  return mix;
}

/// Starts a fade toward `slot`, retargeting from the on-screen blend when a
/// fade is already running.
inline TimeCursor begin_transition(TimeCursor c, std::uint32_t slot) {
  if (slot >= c.count) throw std::out_of_range("begin_transition: slot out of range");
  Transition t;
  t.from = c.target();
  t.to = slot;
  t.origin = visual_mix(c);
  c.transition = std::move(t);
  return c;
}

/// Modifier + horizontal D-pad beyond the deadzone steps one slot, at most
/// steps_per_second. Steps past either end are clamped (no-op).
inline TimeCursor scrub(TimeCursor c, double axis_x, bool modifier_held, double dt) {
  if (!modifier_held || std::abs(axis_x) <= c.scrub.deadzone) {
    c.cooldown = 0.0;
    return c;
  }
  c.cooldown -= dt;
  if (c.cooldown > 0.0) return c;
  const std::uint32_t base = c.target();
  const std::int64_t next = static_cast<std::int64_t>(base) + (axis_x > 0.0 ? 1 : -1);
  if (next < 0 || next >= static_cast<std::int64_t>(c.count)) return c;
  c = begin_transition(std::move(c), static_cast<std::uint32_t>(next));
  c.cooldown = 1.0 / c.scrub.steps_per_second;
  return c;
}

/// progress += dt / duration; at 1 the cursor lands on the target slot.
inline TimeCursor advance_transition(TimeCursor c, double dt) {
  if (!c.transition) return c;
  auto& t = *c.transition;
  t.progress = std::min(1.0, t.progress + dt / c.duration);
  if (t.progress >= 1.0) {
    c.current = t.to;
    c.transition.reset();
  }
  return c;
}

struct ElementOpacities {
  std::vector<double> nodes;
  std::vector<double> edges;
};

inline ElementOpacities element_opacities(const TimeCursor& c, const PresenceTable& table) {
  if (table.size() != c.count) throw std::invalid_argument("cursor/presence table slot count mismatch");
  ElementOpacities o;
  if (table.size() == 0) return o;
  const auto& first = table.slot(0);
  o.nodes.resize(first.nodes.size());
  o.edges.resize(first.edges.size());
  for (NodeIndex n = 0; n < o.nodes.size(); ++n)
    o.nodes[n] = element_opacity(c, [&](std::uint32_t s) { return table.node(s, n); });
  for (EdgeIndex e = 0; e < o.edges.size(); ++e)
    o.edges[e] = element_opacity(c, [&](std::uint32_t s) { return table.edge(s, e); });
  return o;
}

/// Payload for the time bar drawn above the pointer.
struct TimeBar {
  std::uint32_t frame_count = 1;
  std::uint32_t current = 0;
  double progress = 0.0;
  std::optional<std::uint32_t> target;
};

inline TimeBar time_bar(const TimeCursor& c) {
  TimeBar b;
  b.frame_count = c.count;
  b.current = c.current;
  if (c.transition) {
    b.progress = c.transition->progress;
    b.target = c.transition->to;
  }
  return b;
}

inline void to_json(nlohmann::json& j, const TimeBar& b) {
  j = {{"frame_count", b.frame_count}, {"current", b.current}, {"progress", b.progress}};
  j["target"] = b.target ? nlohmann::json(*b.target) : nlohmann::json(nullptr);
}

}  // namespace netvr
