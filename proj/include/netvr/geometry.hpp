#pragma once

// Shared vector/quaternion vocabulary. Scene convention (matches three.js):
// right-handed, +y up, an unrotated camera looks down -z with +x to its right.

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace netvr {

using Vec2 = Eigen::Vector2d;  // D-pad axes (x, y) in [-1, 1]
using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

inline Vec3 world_up() { return Vec3::UnitY(); }

/// Forward (viewing) direction of an orientation.
inline Vec3 view_vector(const Quat& q) { return q * Vec3(0.0, 0.0, -1.0); }

inline Vec3 right_vector(const Quat& q) { return q * Vec3::UnitX(); }

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

inline Quat axis_angle(const Vec3& axis, double radians) {
  return Quat(Eigen::AngleAxisd(radians, axis.normalized()));
}

/// Rotation about +y that turns the default view (-z) onto the horizontal
/// heading `h` (h.y is ignored).
inline Quat yaw_facing(const Vec3& h) {
  return axis_angle(world_up(), std::atan2(-h.x(), -h.z()));
}

/// Quaternion mapping +z onto `dir`; identity for a zero vector.
inline Quat z_to_direction(const Vec3& dir) {
  const double len = dir.norm();
  if (len == 0.0) return Quat::Identity();
  return Quat::FromTwoVectors(Vec3::UnitZ(), dir / len);
}

inline bool all_finite(const Vec3& v) {
  return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

inline Vec3 centroid(std::span<const Vec3> points) {
  Vec3 sum = Vec3::Zero();
  for (const auto& p : points) sum += p;
  return points.empty() ? sum : Vec3(sum / static_cast<double>(points.size()));
}

struct Sphere {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

/// Sphere enclosing every node sphere, centred on the positions' centroid.
/// Throws std::invalid_argument on empty input or mismatched spans.
inline Sphere bounding_sphere(std::span<const Vec3> positions, std::span<const double> radii) {
  if (positions.empty()) throw std::invalid_argument("bounding_sphere: no positions");
  if (positions.size() != radii.size())
    throw std::invalid_argument("bounding_sphere: positions/radii size mismatch");
  Sphere s;
  s.center = centroid(positions);
  for (std::size_t i = 0; i < positions.size(); ++i)
    s.radius = std::max(s.radius, (positions[i] - s.center).norm() + radii[i]);
  return s;
}

/// Rigid placement of the graph in the world: rotation about a pivot point.
struct GraphTransform {
  Vec3 pivot = Vec3::Zero();
  Quat rotation = Quat::Identity();

  bool is_identity() const { return rotation.coeffs() == Quat::Identity().coeffs(); }
  Vec3 to_world(const Vec3& local) const { return pivot + rotation * (local - pivot); }
  Vec3 to_local(const Vec3& world) const { return pivot + rotation.conjugate() * (world - pivot); }
  Vec3 direction_to_local(const Vec3& world_dir) const { return rotation.conjugate() * world_dir; }
};

}  // namespace netvr
