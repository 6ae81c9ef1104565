#pragma once

// Overview & detail navigation with two rigs. The active rig carries the live
// camera; the passive rig stores the other perspective's pose. A rig position
// is the floor-level origin of the user's tracked space: the head sits
// `eye_height` above it.

#include "geometry.hpp"
#include "graph.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>

namespace netvr {

enum class Perspective { Overview, Detail };

struct RigPose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();
};

inline bool bit_equal(const Quat& a, const Quat& b) { return a.coeffs() == b.coeffs(); }
inline bool bit_equal(const RigPose& a, const RigPose& b) {
  return a.position == b.position && bit_equal(a.orientation, b.orientation);
}

struct NavParams {
  double rotation_speed_deg = 45.0;  // overview D-pad rotation
  double free_speed = 3.0;           // scene units / s
  double auto_speed = 9.0;           // mean speed of automatic flights
  double standoff_factor = 1.5;      // stop this many node radii before a node centre
  double fov_vertical_deg = 60.0;
  double fit_margin = 1.2;
};

struct AutoFlight {
  Vec3 start = Vec3::Zero();
  Vec3 target = Vec3::Zero();  // already adjusted for the standoff
  double progress = 0.0;
  double speed = 0.0;
};

/// Two-step detail entry: the first trigger on a node selects it (the detail
/// camera prop moves there), a second trigger on the same node confirms.
struct Selection {
  NodeIndex node = 0;
  Vec3 entry_point = Vec3::Zero();  // head position the teleport will use
  bool confirmed = false;
};

class NavigationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct NavigationState {
  RigPose active;
  RigPose passive;
  Perspective perspective = Perspective::Overview;
  Quat graph_rotation = Quat::Identity();  // overview input rotates the graph, not the camera
  std::optional<AutoFlight> flight;
  std::optional<Selection> selection;
  bool has_detail_pose = false;
  double eye_height = 1.6;
  NavParams params;

  Vec3 head_position() const { return active.position + eye_height * world_up(); }
  GraphTransform graph_transform(const Sphere& bounding) const { return {bounding.center, graph_rotation}; }
};

namespace detail {

inline void require(const NavigationState& nav, Perspective p, const char* op) {
  if (nav.perspective != p)
    throw NavigationError(std::string(op) + " requires the " +
                          (p == Perspective::Overview ? "overview" : "detail") + " perspective");
}

inline Vec3 horizontal(const Vec3& v) { return Vec3(v.x(), 0.0, v.z()); }

}  // namespace detail

/// Camera distance at which a bounding sphere fits the vertical field of view:
/// radius / tan(fov / 2) * margin. Wide fields of view (beyond ~100 degrees at
/// the default margin) would put the camera inside the sphere, so the distance
/// never drops below margin * radius.
inline double overview_distance(double radius, const NavParams& p = {}) {
  const double fit = radius / std::tan(deg_to_rad(p.fov_vertical_deg) / 2.0) * p.fit_margin;
  return std::max(fit, radius * p.fit_margin);
}

/// Overview rig pose with the graph centre straight ahead along `heading`
/// (horizontal) at eye level.
inline RigPose overview_pose(const Sphere& bounding, const Vec3& heading, double eye_height, const NavParams& p) {
  const Vec3 h = detail::horizontal(heading).normalized();
  RigPose pose;
  pose.position = bounding.center - overview_distance(bounding.radius, p) * h;
  pose.position.y() = bounding.center.y() - eye_height;
  pose.orientation = yaw_facing(h);
  return pose;
}

/// Initial state: overview perspective looking along `heading`.
inline NavigationState make_navigation(const Sphere& bounding, const Vec3& heading = Vec3(0, 0, -1),
                                       double eye_height = 1.6, NavParams params = {}) {
  NavigationState nav;
  nav.params = params;
  nav.eye_height = eye_height;
  nav.active = overview_pose(bounding, heading, eye_height, params);
  nav.passive = nav.active;
  return nav;
}

/// Exchanges the two rigs. Applying it twice restores both poses exactly.
inline void swap_rigs(NavigationState& nav) { std::swap(nav.active, nav.passive); }

/// D-pad x yaws the graph about its local up axis, y pitches it about the
/// camera's right axis, both at rotation_speed; the camera is then re-fitted
/// to the bounding sphere along its current view axis.
inline NavigationState apply_overview_rotation(NavigationState nav, const Vec2& dpad, double dt,
                                               const Sphere& bounding) {
  detail::require(nav, Perspective::Overview, "apply_overview_rotation");
  const double omega = deg_to_rad(nav.params.rotation_speed_deg);
  const double yaw = dpad.x() * omega * dt;
  const double pitch = dpad.y() * omega * dt;
  if (yaw != 0.0) nav.graph_rotation = nav.graph_rotation * axis_angle(Vec3::UnitY(), yaw);
  if (pitch != 0.0) nav.graph_rotation = axis_angle(right_vector(nav.active.orientation), pitch) * nav.graph_rotation;
  if (yaw != 0.0 || pitch != 0.0) nav.graph_rotation.normalize();

  const Vec3 head = bounding.center - overview_distance(bounding.radius, nav.params) * view_vector(nav.active.orientation);
  nav.active.position = head - nav.eye_height * world_up();
  return nav;
}

/// Free flight relative to the head's view: y flies along the view vector,
/// x strafes along the head's right vector. Orientation is untouched.
inline NavigationState apply_free_flight(NavigationState nav, const Vec2& dpad, const Quat& head_orientation,
                                         double dt) {
  detail::require(nav, Perspective::Detail, "apply_free_flight");
  const double step = nav.params.free_speed * dt;
  const Vec3 delta = dpad.y() * step * view_vector(head_orientation) + dpad.x() * step * right_vector(head_orientation);
  if (delta.squaredNorm() > 0.0) nav.flight.reset();  // manual input takes over
  nav.active.position += delta;
  return nav;
}

/// Cubic ease-out: zero slope at t = 1.
inline double ease_out_cubic(double t) {
  const double u = 1.0 - t;
  return 1.0 - u * u * u;
}

/// Starts an automatic flight that brings the head to `standoff_factor *
/// target_radius` short of `target`. No-op when the head is already that close.
inline NavigationState start_auto_flight(NavigationState nav, const Vec3& target, double target_radius = 0.0) {
  detail::require(nav, Perspective::Detail, "start_auto_flight");
  if (!all_finite(target)) throw std::invalid_argument("start_auto_flight: target must be finite");
  const Vec3 head = nav.head_position();
  const Vec3 to = target - head;
  const double dist = to.norm();
  const double standoff = nav.params.standoff_factor * target_radius;
  if (dist <= standoff || dist == 0.0) return nav;
  AutoFlight f;
  f.start = nav.active.position;
  f.target = (target - standoff * (to / dist)) - nav.eye_height * world_up();
  f.speed = nav.params.auto_speed;
  nav.flight = f;
  return nav;
}

/// Advances an active flight so the mean speed over the whole flight is
/// auto_speed; position follows the ease-out curve and lands exactly on the
/// target, where the flight is cleared.
inline NavigationState update_auto_flight(NavigationState nav, double dt) {
  if (!nav.flight) return nav;
  auto& f = *nav.flight;
  const double length = (f.target - f.start).norm();
  f.progress = length > 0.0 ? std::min(1.0, f.progress + dt * f.speed / length) : 1.0;
  if (f.progress >= 1.0) {
    nav.active.position = f.target;
    nav.flight.reset();
  } else {
    nav.active.position = f.start + ease_out_cubic(f.progress) * (f.target - f.start);
  }
  return nav;
}

/// Trigger on a node in the overview. Returns true when this trigger confirms
/// an existing selection of the same node.
inline bool select_node(NavigationState& nav, NodeIndex node, const Vec3& node_world_position, double node_radius) {
  detail::require(nav, Perspective::Overview, "select_node");
  if (nav.selection && nav.selection->node == node) {
    nav.selection->confirmed = true;
    return true;
  }
  Selection s;
  s.node = node;
  s.entry_point = node_world_position - nav.params.standoff_factor * node_radius * view_vector(nav.active.orientation);
  nav.selection = s;
  return false;
}

/// Teleports into the detail perspective at the confirmed node. Rigs swap;
/// the new active rig keeps the pre-teleport orientation verbatim and only its
/// position changes, placing the head at the node's standoff point.
inline NavigationState teleport_to_node(NavigationState nav, const Vec3& node_world_position, double node_radius) {
  detail::require(nav, Perspective::Overview, "teleport_to_node");
  if (!nav.selection || !nav.selection->confirmed) throw NavigationError("teleport_to_node: no confirmed node selection");
  const RigPose before = nav.active;
  swap_rigs(nav);
  nav.active.orientation = before.orientation;
  const Vec3 head =
      node_world_position - nav.params.standoff_factor * node_radius * view_vector(before.orientation);
  nav.active.position = head - nav.eye_height * world_up();
  nav.perspective = Perspective::Detail;
  nav.selection.reset();
  nav.flight.reset();
  nav.has_detail_pose = true;
  return nav;
}

/// Returns to the overview: rigs swap and the new overview pose is recomputed
/// so the graph sits directly ahead along the head's horizontal heading, at
/// eye level. A vertical gaze falls back to the stored overview heading.
inline NavigationState return_to_overview(NavigationState nav, const Sphere& bounding, const Quat& head_orientation,
                                          double eye_height) {
  detail::require(nav, Perspective::Detail, "return_to_overview");
  Vec3 h = detail::horizontal(view_vector(head_orientation));
  if (h.norm() < 1e-9) h = detail::horizontal(view_vector(nav.passive.orientation));
  if (h.norm() < 1e-9) h = Vec3(0.0, 0.0, -1.0);
  swap_rigs(nav);
  nav.eye_height = eye_height;
  nav.active = overview_pose(bounding, h, eye_height, nav.params);
  nav.perspective = Perspective::Overview;
  nav.flight.reset();
  return nav;
}

/// Unit vector from the head toward the passive (overview) rig, in head-local
/// coordinates (-z ahead, +x right, +y up).
inline Vec3 indicator_direction(const NavigationState& nav, const RigPose& head) {
  detail::require(nav, Perspective::Detail, "indicator_direction");
  const Vec3 to = nav.passive.position - head.position;
  if (to.norm() == 0.0) throw std::invalid_argument("indicator_direction: head coincides with overview rig");
  return (head.orientation.conjugate() * to).normalized();
}

}  // namespace netvr
