#pragma once

// Laser-pointer picking: BVH over node spheres and edge capsules, nearest-hit
// queries, and hover highlight/lowlight sets.

#include "geometry.hpp"
#include "graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace netvr {

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3(0.0, 0.0, -1.0);

  Ray() = default;
  /// Throws std::invalid_argument unless |direction| = 1 within 1e-9.
  Ray(const Vec3& o, const Vec3& d) : origin(o), direction(d) {
    if (!all_finite(o) || !all_finite(d) || std::abs(d.norm() - 1.0) > 1e-9)
      throw std::invalid_argument("ray direction must be a finite unit vector");
  }
  static Ray through(const Vec3& from, const Vec3& to) { return Ray(from, (to - from).normalized()); }
  Vec3 at(double t) const { return origin + t * direction; }
};

enum class EntityKind : std::uint8_t { Node, Edge };

struct Entity {
  EntityKind kind = EntityKind::Node;
  std::uint32_t index = 0;

  static Entity node(NodeIndex i) { return {EntityKind::Node, i}; }
  static Entity edge(EdgeIndex i) { return {EntityKind::Edge, i}; }
  friend bool operator==(const Entity&, const Entity&) = default;
};

struct PickHit {
  Entity entity;
  double distance = 0.0;
};

/// Orders hits: nearer first; at equal distance nodes beat edges, then lower
/// index wins.
inline bool closer(const PickHit& a, const PickHit& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  if (a.entity.kind != b.entity.kind) return a.entity.kind == EntityKind::Node;
  return a.entity.index < b.entity.index;
}

// ---------------------------------------------------------------------------
// Primitive intersection. A primitive whose interior contains the ray origin
// is not hit: the pointer cannot select the element it starts inside.

inline std::optional<double> intersect_sphere(const Ray& ray, const Vec3& center, double radius) {
  const Vec3 oc = ray.origin - center;
  const double c = oc.squaredNorm() - radius * radius;
  if (c < 0.0) return std::nullopt;
  const double b = oc.dot(ray.direction);
  const double disc = b * b - c;
  if (disc < 0.0) return std::nullopt;
  const double t = -b - std::sqrt(disc);
  if (t < 0.0) return std::nullopt;
  return t;
}

inline double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double s = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + s * ab)).norm();
}

/// Entry distance into the capsule swept by a sphere of `radius` along [a, b]:
/// the earliest entry among its cylinder body and two end spheres.
inline std::optional<double> intersect_capsule(const Ray& ray, const Vec3& a, const Vec3& b, double radius) {
  if (point_segment_distance(ray.origin, a, b) < radius) return std::nullopt;
  std::optional<double> best;
  auto consider = [&](std::optional<double> t) {
    if (t && (!best || *t < *best)) best = t;
  };

  const Vec3 ba = b - a;
  const Vec3 oa = ray.origin - a;
  const double baba = ba.squaredNorm();
  const double bard = ba.dot(ray.direction);
  const double baoa = ba.dot(oa);
  const double rdoa = ray.direction.dot(oa);
  const double oaoa = oa.squaredNorm();
  const double qa = baba - bard * bard;
  if (baba > 0.0 && qa > 1e-12 * baba) {
    const double qb = baba * rdoa - baoa * bard;
    const double qc = baba * oaoa - baoa * baoa - radius * radius * baba;
    const double h = qb * qb - qa * qc;
    if (h >= 0.0) {
      const double t = (-qb - std::sqrt(h)) / qa;
      const double y = baoa + t * bard;
      if (t >= 0.0 && y > 0.0 && y < baba) consider(t);
    }
  }
  consider(intersect_sphere(ray, a, radius));
  consider(intersect_sphere(ray, b, radius));
  return best;
}

// ---------------------------------------------------------------------------
// Index

struct PickParams {
  /// Edges thinner than this are picked as if they had this radius.
  double min_edge_pick_radius = 0.08;
};

struct Aabb {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void expand(const Aabb& o) {
    lo = lo.cwiseMin(o.lo);
    hi = hi.cwiseMax(o.hi);
  }
  Vec3 center() const { return 0.5 * (lo + hi); }

  /// Slab test; returns the entry distance if the ray meets the box within
  /// [0, t_max].
  std::optional<double> hit(const Ray& r, const Vec3& inv_dir, double t_max) const {
    double t0 = 0.0, t1 = t_max;
    for (int a = 0; a < 3; ++a) {
      double tn = (lo[a] - r.origin[a]) * inv_dir[a];
      double tf = (hi[a] - r.origin[a]) * inv_dir[a];
      if (std::isnan(tn) || std::isnan(tf)) {  // 0 * inf: origin on a slab plane, parallel ray
        if (r.origin[a] < lo[a] || r.origin[a] > hi[a]) return std::nullopt;
        continue;
      }
      if (tn > tf) std::swap(tn, tf);
      t0 = std::max(t0, tn);
      t1 = std::min(t1, tf);
      if (t0 > t1) return std::nullopt;
    }
    return t0;
  }
};

struct PickPrimitive {
  Entity entity;
  Vec3 a = Vec3::Zero();  // sphere centre, or capsule segment start
  Vec3 b = Vec3::Zero();  // capsule segment end (== a for spheres)
  double radius = 0.0;
  Aabb bounds;

  std::optional<double> intersect(const Ray& r) const {
    return entity.kind == EntityKind::Node ? intersect_sphere(r, a, radius) : intersect_capsule(r, a, b, radius);
  }
};

/// Per-element pickability masks; an empty span means "all pickable".
struct PickFilter {
  std::span<const std::uint8_t> nodes;
  std::span<const std::uint8_t> edges;

  bool allows(const Entity& e) const {
    const auto& m = e.kind == EntityKind::Node ? nodes : edges;
    return m.empty() || (e.index < m.size() && m[e.index]);
  }
};

/// Builds the pick primitives for a positions snapshot. An edge becomes the
/// capsule between its endpoint sphere surfaces; edges whose endpoint spheres
/// overlap have no pickable part and are skipped.
inline std::vector<PickPrimitive> make_pick_primitives(const DynamicGraph& g, std::span<const Vec3> positions,
                                                       std::span<const double> radii,
                                                       std::span<const double> girths, const PickParams& pp = {}) {
  if (positions.size() != g.node_count() || radii.size() != g.node_count() || girths.size() != g.edge_count())
    throw std::invalid_argument("pick snapshot inconsistent with graph");
  std::vector<PickPrimitive> prims;
  prims.reserve(g.node_count() + g.edge_count());
  for (NodeIndex n = 0; n < g.node_count(); ++n) {
    PickPrimitive p;
    p.entity = Entity::node(n);
    p.a = p.b = positions[n];
    p.radius = radii[n];
    prims.push_back(p);
  }
  for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
    const NodeIndex s = g.source(e), t = g.target(e);
    const Vec3 d = positions[t] - positions[s];
    const double len = d.norm();
    if (len <= radii[s] + radii[t]) continue;
    const Vec3 u = d / len;
    PickPrimitive p;
    p.entity = Entity::edge(e);
    p.a = positions[s] + radii[s] * u;
    p.b = positions[t] - radii[t] * u;
    p.radius = std::max(girths[e], pp.min_edge_pick_radius);
    prims.push_back(p);
  }
  for (auto& p : prims) {
    // padded so slab rounding can never reject a true hit
    const double pad = p.radius * (1.0 + 1e-9) + 1e-9;
    p.bounds.lo = p.a.cwiseMin(p.b) - Vec3::Constant(pad);
    p.bounds.hi = p.a.cwiseMax(p.b) + Vec3::Constant(pad);
  }
  return prims;
}

/// Exhaustive nearest hit over every primitive.
inline std::optional<PickHit> pick_linear(std::span<const PickPrimitive> prims, const Ray& ray,
                                          const PickFilter& filter = {}) {
  std::optional<PickHit> best;
  for (const auto& p : prims) {
    if (!filter.allows(p.entity)) continue;
    if (auto t = p.intersect(ray)) {
      PickHit h{p.entity, *t};
      if (!best || closer(h, *best)) best = h;
    }
  }
  return best;
}

/// Bounding-volume hierarchy over pick primitives with median splits on the
/// widest centroid axis. Immutable after construction; queries are const and
/// may run concurrently.
class PickIndex {
 public:
  static constexpr std::uint32_t kLeafSize = 4;

  struct Node {
    Aabb bounds;
    std::uint32_t first = 0;  // leaf: first primitive; inner: left child (right = left + 1)
    std::uint32_t count = 0;  // primitives in a leaf, 0 for inner nodes
  };

  PickIndex() = default;
  explicit PickIndex(std::vector<PickPrimitive> prims) : prims_(std::move(prims)) {
    if (prims_.empty()) return;
    nodes_.reserve(2 * prims_.size());
    nodes_.push_back({});
    build(0, 0, static_cast<std::uint32_t>(prims_.size()));
  }

  PickIndex(const DynamicGraph& g, std::span<const Vec3> positions, std::span<const double> radii,
            std::span<const double> girths, const PickParams& pp = {})
      : PickIndex(make_pick_primitives(g, positions, radii, girths, pp)) {}

  bool empty() const { return prims_.empty(); }
  std::span<const PickPrimitive> primitives() const { return prims_; }
  std::span<const Node> nodes() const { return nodes_; }

  std::optional<PickHit> pick(const Ray& ray, const PickFilter& filter = {}) const {
    if (nodes_.empty()) return std::nullopt;
    const Vec3 inv(1.0 / ray.direction.x(), 1.0 / ray.direction.y(), 1.0 / ray.direction.z());
    std::optional<PickHit> best;
    double best_t = std::numeric_limits<double>::infinity();
    std::uint32_t stack[64];
    int top = 0;
    if (!nodes_[0].bounds.hit(ray, inv, best_t)) return std::nullopt;
    stack[top++] = 0;
    while (top > 0) {
      const Node& n = nodes_[stack[--top]];
      if (n.count > 0) {
        for (std::uint32_t k = n.first; k < n.first + n.count; ++k) {
          const auto& p = prims_[k];
          if (!filter.allows(p.entity)) continue;
          if (auto t = p.intersect(ray)) {
            PickHit h{p.entity, *t};
            if (!best || closer(h, *best)) {
              best = h;
              best_t = *t;
            }
          }
        }
        continue;
      }
      // ties at best_t must still be visited for the node-over-edge rule
      auto tl = nodes_[n.first].bounds.hit(ray, inv, best_t);
      auto tr = nodes_[n.first + 1].bounds.hit(ray, inv, best_t);
      if (tl && tr) {
        const bool left_first = *tl <= *tr;
        stack[top++] = left_first ? n.first + 1 : n.first;
        stack[top++] = left_first ? n.first : n.first + 1;
      } else if (tl) {
        stack[top++] = n.first;
      } else if (tr) {
        stack[top++] = n.first + 1;
      }
    }
    return best;
  }

 private:
  void build(std::uint32_t ni, std::uint32_t first, std::uint32_t count) {
    Aabb bounds, centers;
    for (std::uint32_t k = first; k < first + count; ++k) {
      bounds.expand(prims_[k].bounds);
      const Vec3 c = prims_[k].bounds.center();
      centers.expand({c, c});
    }
    nodes_[ni].bounds = bounds;
    const Vec3 extent = centers.hi - centers.lo;
    int axis = 0;
    extent.maxCoeff(&axis);
    if (count <= kLeafSize || extent[axis] <= 0.0) {
      nodes_[ni].first = first;
      nodes_[ni].count = count;
      return;
    }
    const std::uint32_t half = count / 2;
    std::nth_element(prims_.begin() + first, prims_.begin() + first + half, prims_.begin() + first + count,
                     [axis](const PickPrimitive& l, const PickPrimitive& r) {
                       return l.bounds.center()[axis] < r.bounds.center()[axis];
                     });
    const auto left = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({});
    nodes_.push_back({});
    nodes_[ni].first = left;
    nodes_[ni].count = 0;
    build(left, first, half);
    build(left + 1, first + half, count - half);
  }

  std::vector<PickPrimitive> prims_;
  std::vector<Node> nodes_;
};

// ---------------------------------------------------------------------------
// Hover highlighting

enum class Emphasis : std::uint8_t { Normal, Hovered, Highlight, Lowlight };

/// Per-element emphasis. With no hover every element is Normal. With a hover,
/// each visible element is exactly one of Hovered/Highlight/Lowlight (a
/// hovered edge counts as part of its own highlight); invisible elements stay
/// Normal.
struct HighlightState {
  std::optional<Entity> hovered;
  std::vector<Emphasis> nodes;
  std::vector<Emphasis> edges;

  std::vector<NodeIndex> nodes_with(Emphasis e) const { return collect(nodes, e); }
  std::vector<EdgeIndex> edges_with(Emphasis e) const { return collect(edges, e); }

 private:
  static std::vector<std::uint32_t> collect(const std::vector<Emphasis>& v, Emphasis e) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < v.size(); ++i)
      if (v[i] == e) out.push_back(i);
    return out;
  }
};

/// Visibility masks; an empty span means "all visible".
struct Visibility {
  std::span<const std::uint8_t> nodes;
  std::span<const std::uint8_t> edges;
  bool node(NodeIndex i) const { return nodes.empty() || nodes[i]; }
  bool edge(EdgeIndex i) const { return edges.empty() || edges[i]; }
};

/// Hovered node: its neighborhood is highlighted. Hovered edge: the edge and
/// its two endpoints are highlighted. Every other visible element is
/// lowlighted. Throws GraphError for an entity outside the graph.
inline HighlightState hover_update(const DynamicGraph& g, const std::optional<PickHit>& hit,
                                   const Visibility& visible = {}, EdgeFilter filter = EdgeFilter::Both) {
  HighlightState hs;
  hs.nodes.assign(g.node_count(), Emphasis::Normal);
  hs.edges.assign(g.edge_count(), Emphasis::Normal);
  if (!hit) return hs;

  const Entity& ent = hit->entity;
  if (ent.kind == EntityKind::Node && ent.index >= g.node_count())
    throw GraphError("#" + std::to_string(ent.index), "unknown node entity");
  if (ent.kind == EntityKind::Edge && ent.index >= g.edge_count())
    throw GraphError("#" + std::to_string(ent.index), "unknown edge entity");
  hs.hovered = ent;

  for (NodeIndex n = 0; n < g.node_count(); ++n)
    if (visible.node(n)) hs.nodes[n] = Emphasis::Lowlight;
  for (EdgeIndex e = 0; e < g.edge_count(); ++e)
    if (visible.edge(e)) hs.edges[e] = Emphasis::Lowlight;

  auto raise_node = [&](NodeIndex n, Emphasis em) {
    if (visible.node(n)) hs.nodes[n] = em;
  };
  auto raise_edge = [&](EdgeIndex e) {
    if (visible.edge(e)) hs.edges[e] = Emphasis::Highlight;
  };

  if (ent.kind == EntityKind::Node) {
    const auto nb = neighborhood(g, ent.index, filter);
    for (NodeIndex n : nb.nodes) raise_node(n, Emphasis::Highlight);
    for (EdgeIndex e : nb.edges) raise_edge(e);
    raise_node(ent.index, Emphasis::Hovered);
  } else {
    raise_node(g.source(ent.index), Emphasis::Highlight);
    raise_node(g.target(ent.index), Emphasis::Highlight);
    raise_edge(ent.index);
  }
  return hs;
}

/// Pick masks for the current view: visible elements, minus lowlighted ones
/// when `lowlight_pickable` is false.
struct PickMasks {
  std::vector<std::uint8_t> nodes;
  std::vector<std::uint8_t> edges;
  PickFilter filter() const { return {nodes, edges}; }
};

inline PickMasks pick_masks(const DynamicGraph& g, const Visibility& visible, const HighlightState& hs,
                            bool lowlight_pickable = true) {
  PickMasks m;
  m.nodes.resize(g.node_count());
  m.edges.resize(g.edge_count());
  for (NodeIndex n = 0; n < g.node_count(); ++n)
    m.nodes[n] = visible.node(n) && (lowlight_pickable || hs.nodes.empty() || hs.nodes[n] != Emphasis::Lowlight);
  for (EdgeIndex e = 0; e < g.edge_count(); ++e)
    m.edges[e] = visible.edge(e) && (lowlight_pickable || hs.edges.empty() || hs.edges[e] != Emphasis::Lowlight);
  return m;
}

}  // namespace netvr
