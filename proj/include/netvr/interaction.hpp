#pragma once

// Input event contract for UI shells and the session that routes those events
// into picking, navigation and the time cursor. The shell supplies device
// state; every semantic decision is made here.

#include "geometry.hpp"
#include "graph.hpp"
#include "navigation.hpp"
#include "picking.hpp"
#include "scene.hpp"
#include "temporal.hpp"

#include <json.hpp>

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace netvr {

// Poses are expressed in the rig's local (tracked-space) frame.
struct DpadEvent {
  double time = 0.0;
  Vec2 axes = Vec2::Zero();
};
struct TriggerEvent {
  double time = 0.0;
  std::optional<Entity> entity;  // unset: use the entity currently under the ray
  bool on_indicator = false;     // pressed while pointing at the overview indicator arrow
};
struct ModifierEvent {
  double time = 0.0;
  bool held = false;
};
struct HeadPoseEvent {
  double time = 0.0;
  RigPose pose;
};
struct ControllerPoseEvent {
  double time = 0.0;
  RigPose pose;
};

using InputEvent = std::variant<DpadEvent, TriggerEvent, ModifierEvent, HeadPoseEvent, ControllerPoseEvent>;

namespace detail {

inline nlohmann::json vec_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }
inline nlohmann::json quat_json(const Quat& q) { return {q.x(), q.y(), q.z(), q.w()}; }

inline Vec3 json_vec(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument("expected [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}
inline Quat json_quat(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4) throw std::invalid_argument("expected [x, y, z, w]");
  Quat q(j[3].get<double>(), j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
  const double norm = q.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw std::invalid_argument("orientation must be a finite nonzero quaternion");
  // already-unit input passes through untouched so poses round-trip exactly
  return std::abs(norm - 1.0) <= 1e-12 ? q : q.normalized();
}
inline nlohmann::json pose_json(const RigPose& p) {
  return {{"position", vec_json(p.position)}, {"orientation", quat_json(p.orientation)}};
}
inline RigPose json_pose(const nlohmann::json& j) { return {json_vec(j.at("position")), json_quat(j.at("orientation"))}; }

}  // namespace detail

inline nlohmann::json entity_json(const Entity& e) {
  return {{"kind", e.kind == EntityKind::Node ? "node" : "edge"}, {"index", e.index}};
}

inline Entity json_entity(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind != "node" && kind != "edge") throw std::invalid_argument("entity kind must be node or edge");
  return {kind == "node" ? EntityKind::Node : EntityKind::Edge, j.at("index").get<std::uint32_t>()};
}

/// Wire form: {"type": "dpad"|"trigger"|"modifier"|"head_pose"|"controller_pose", "t": seconds, ...}.
inline nlohmann::json event_to_json(const InputEvent& ev) {
  return std::visit(
      [](const auto& e) -> nlohmann::json {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, DpadEvent>) {
          return {{"type", "dpad"}, {"t", e.time}, {"x", e.axes.x()}, {"y", e.axes.y()}};
        } else if constexpr (std::is_same_v<T, TriggerEvent>) {
          nlohmann::json j{{"type", "trigger"}, {"t", e.time}, {"on_indicator", e.on_indicator}};
          j["entity"] = e.entity ? entity_json(*e.entity) : nlohmann::json(nullptr);
          return j;
        } else if constexpr (std::is_same_v<T, ModifierEvent>) {
          return {{"type", "modifier"}, {"t", e.time}, {"held", e.held}};
        } else if constexpr (std::is_same_v<T, HeadPoseEvent>) {
          auto j = detail::pose_json(e.pose);
          j["type"] = "head_pose";
          j["t"] = e.time;
          return j;
        } else {
          auto j = detail::pose_json(e.pose);
          j["type"] = "controller_pose";
          j["t"] = e.time;
          return j;
        }
      },
      ev);
}

/// Throws std::invalid_argument (or nlohmann::json exceptions) on malformed input.
inline InputEvent event_from_json(const nlohmann::json& j) {
  const auto type = j.at("type").get<std::string>();
  const double t = j.at("t").get<double>();
  if (type == "dpad") {
    const Vec2 axes(j.at("x").get<double>(), j.at("y").get<double>());
    if (axes.cwiseAbs().maxCoeff() > 1.0) throw std::invalid_argument("dpad axes must lie in [-1, 1]");
    return DpadEvent{t, axes};
  }
  if (type == "trigger") {
    TriggerEvent e{t, std::nullopt, j.value("on_indicator", false)};
    if (auto it = j.find("entity"); it != j.end() && !it->is_null()) e.entity = json_entity(*it);
    return e;
  }
  if (type == "modifier") return ModifierEvent{t, j.at("held").get<bool>()};
  if (type == "head_pose") return HeadPoseEvent{t, detail::json_pose(j)};
  if (type == "controller_pose") return ControllerPoseEvent{t, detail::json_pose(j)};
  throw std::invalid_argument("unknown event type '" + type + "'");
}

/// Everything a shell draws for one frame.
struct FrameOutput {
  InstanceBuffers buffers;
  std::optional<LabelPayload> label;
  TimeBar time_bar;
  bool time_bar_visible = false;  // shown while the modifier is held or a fade runs
  std::optional<Ray> laser;       // world-space pointer ray
};

struct SessionOptions {
  SceneParams scene;
  PickParams pick;
  bool lowlight_pickable = true;
  EdgeFilter highlight_edges = EdgeFilter::Both;
};

/// One user's interactive session over a fixed layout snapshot.
class Session {
 public:
  Session(const DynamicGraph& g, std::vector<Vec3> positions, SessionOptions opts = {})
      : graph_(g),
        opts_(std::move(opts)),
        positions_(std::move(positions)),
        scene_(g, opts_.scene),
        index_(g, positions_, scene_.radii(), scene_.girths(), opts_.pick),
        bounding_(g.node_count() ? bounding_sphere(positions_, scene_.radii()) : Sphere{}),
        table_(time_frame_table(g)),
        cursor_(make_cursor(table_.size())),
        nav_(make_navigation(bounding_)) {
    highlight_ = hover_update(graph_, std::nullopt);
  }

  const NavigationState& navigation() const { return nav_; }
  const TimeCursor& cursor() const { return cursor_; }
  const HighlightState& highlight() const { return highlight_; }
  const Sphere& bounding() const { return bounding_; }
  const PickIndex& pick_index() const { return index_; }

  /// Switches the cursor's presence source (time frames, attribute bins or a
  /// two-frame comparison); the cursor restarts at slot 0.
  void set_presence(PresenceTable table, CursorMode mode) {
    if (table.size() == 0) throw std::invalid_argument("presence table must have at least one slot");
    table_ = std::move(table);
    cursor_ = make_cursor(table_.size(), mode);
  }

  void handle(const InputEvent& ev) {
    std::visit([this](const auto& e) { on(e); }, ev);
  }

  /// Advances continuous input (D-pad, flights, fades) and refreshes hover.
  void advance(double dt) {
    if (modifier_) {
      cursor_ = scrub(cursor_, dpad_.x(), true, dt);
    } else {
      cursor_ = scrub(cursor_, 0.0, false, dt);
      if (dpad_.squaredNorm() > 0.0) {
        if (nav_.perspective == Perspective::Overview) nav_ = apply_overview_rotation(nav_, dpad_, dt, bounding_);
        else nav_ = apply_free_flight(nav_, dpad_, head_world().orientation, dt);
      }
    }
    nav_ = update_auto_flight(nav_, dt);
    cursor_ = advance_transition(cursor_, dt);
    refresh_hover();
  }

  FrameOutput frame() const {
    FrameOutput f;
    f.buffers = scene_.synthesize(positions_, element_opacities(cursor_, table_), highlight_, nav_);
    f.label = label_payload(graph_, highlight_.hovered);
    f.time_bar = time_bar(cursor_);
    f.time_bar_visible = modifier_ || cursor_.transition.has_value();
    f.laser = laser();
    return f;
  }

  RigPose head_world() const {
    return {nav_.active.position + nav_.active.orientation * head_local_.position,
            nav_.active.orientation * head_local_.orientation};
  }

  std::optional<Ray> laser() const {
    if (!controller_local_) return std::nullopt;
    const Vec3 o = nav_.active.position + nav_.active.orientation * controller_local_->position;
    const Vec3 d = (nav_.active.orientation * controller_local_->orientation * Vec3(0, 0, -1)).normalized();
    return Ray(o, d);
  }

 private:
  void on(const DpadEvent& e) { dpad_ = e.axes.cwiseMax(-1.0).cwiseMin(1.0); }
  void on(const ModifierEvent& e) { modifier_ = e.held; }
  void on(const HeadPoseEvent& e) {
    head_local_ = e.pose;
    head_local_.orientation.normalize();
    nav_.eye_height = e.pose.position.y();
  }
  void on(const ControllerPoseEvent& e) {
    controller_local_ = e.pose;
    controller_local_->orientation.normalize();
    refresh_hover();
  }

  void on(const TriggerEvent& e) {
    if (e.on_indicator) {
      if (nav_.perspective == Perspective::Detail)
        nav_ = return_to_overview(nav_, bounding_, head_world().orientation, head_local_.position.y());
      return;
    }
    const auto target = e.entity ? e.entity : highlight_.hovered;
    if (!target) return;
    const GraphTransform xf = nav_.graph_transform(bounding_);
    if (nav_.perspective == Perspective::Overview) {
      if (target->kind != EntityKind::Node) return;
      const Vec3 p = xf.to_world(positions_.at(target->index));
      const double r = scene_.radii()[target->index];
      if (select_node(nav_, target->index, p, r)) nav_ = teleport_to_node(nav_, p, r);
      return;
    }
    if (target->kind == EntityKind::Node) {
      nav_ = start_auto_flight(nav_, xf.to_world(positions_.at(target->index)), scene_.radii()[target->index]);
    } else {
      const auto s = graph_.source(target->index), t = graph_.target(target->index);
      const Vec3 mid = 0.5 * (positions_[s] + positions_[t]);
      nav_ = start_auto_flight(nav_, xf.to_world(mid), scene_.girths()[target->index]);
    }
  }

  void refresh_hover() {
    const auto ray = laser();
    if (!ray) return;
    const GraphTransform xf = nav_.graph_transform(bounding_);
    const Ray local(xf.to_local(ray->origin), xf.direction_to_local(ray->direction).normalized());
    const auto& slot = table_.slot(cursor_.target());
    const Visibility visible{slot.nodes, slot.edges};
    const auto masks = pick_masks(graph_, visible, highlight_, opts_.lowlight_pickable);
    const auto hit = index_.pick(local, masks.filter());
    highlight_ = hover_update(graph_, hit, visible, opts_.highlight_edges);
  }

  const DynamicGraph& graph_;
  SessionOptions opts_;
  std::vector<Vec3> positions_;
  SceneSynthesizer scene_;
  PickIndex index_;
  Sphere bounding_;
  PresenceTable table_;
  TimeCursor cursor_;
  NavigationState nav_;
  HighlightState highlight_;
  Vec2 dpad_ = Vec2::Zero();
  bool modifier_ = false;
  RigPose head_local_{Vec3(0.0, 1.6, 0.0), Quat::Identity()};
  std::optional<RigPose> controller_local_;
};

}  // namespace netvr
