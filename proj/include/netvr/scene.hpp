#pragma once

// Per-frame scene synthesis: flat GPU-instancing buffers for nodes, edge tubes
// and direction arrows, plus overlay props and the hover label.
//
// Buffer layout (every field a little-endian IEEE-754 binary32):
//   node instance, 8 floats / 32 bytes:
//     [0..2] position xyz   [3] radius   [4..7] colour rgba
//   edge / arrow instance, 13 floats / 52 bytes:
//     [0..2] centre xyz   [3..6] orientation quaternion xyzw (maps +z onto
//     source->target)   [7] length   [8] girth (tube radius)   [9..12] colour rgba
// All positions are world space: the graph rotation is already applied.

#include "geometry.hpp"
#include "graph.hpp"
#include "navigation.hpp"
#include "picking.hpp"
#include "temporal.hpp"

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace netvr {

struct NodeInstanceLayout {
  static constexpr std::size_t kStride = 8;
  static constexpr std::size_t kPosition = 0, kRadius = 3, kColor = 4;
};

struct EdgeInstanceLayout {
  static constexpr std::size_t kStride = 13;
  static constexpr std::size_t kCenter = 0, kOrientation = 3, kLength = 7, kGirth = 8, kColor = 9;
};

struct Rgba {
  float r = 0, g = 0, b = 0, a = 1;
  friend bool operator==(const Rgba&, const Rgba&) = default;
};

struct PropTransform {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();
};

struct InstanceBuffers {
  std::vector<float> nodes;
  std::vector<float> edges;
  std::vector<float> arrows;
  std::vector<NodeIndex> node_ids;   // graph node of each node instance
  std::vector<EdgeIndex> edge_ids;   // graph edge of each tube instance
  std::vector<EdgeIndex> arrow_ids;  // graph edge of each arrow instance
  /// World position of every graph node (xyz per node), visible or not.
  std::vector<float> node_positions;
  std::optional<PropTransform> camera_prop;
  std::optional<Vec3> indicator;  // head-local direction, detail perspective only

  std::size_t node_count() const { return node_ids.size(); }
  std::size_t edge_count() const { return edge_ids.size(); }
  std::size_t arrow_count() const { return arrow_ids.size(); }

  /// Number of instanced draws a renderer issues: one per non-empty batch.
  int batch_count() const {
    return (node_count() > 0 ? 1 : 0) + (edge_count() > 0 ? 1 : 0) + (arrow_count() > 0 ? 1 : 0);
  }

  bool layout_consistent() const {
    return nodes.size() == node_count() * NodeInstanceLayout::kStride &&
           edges.size() == edge_count() * EdgeInstanceLayout::kStride &&
           arrows.size() == arrow_count() * EdgeInstanceLayout::kStride;
  }
};

/// Serializes a float buffer in the documented little-endian layout.
inline std::vector<std::byte> to_le_bytes(std::span<const float> data) {
  std::vector<std::byte> out(data.size() * 4);
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto bits = std::bit_cast<std::uint32_t>(data[i]);
    for (int b = 0; b < 4; ++b) out[i * 4 + b] = static_cast<std::byte>((bits >> (8 * b)) & 0xffu);
  }
  return out;
}

struct SceneParams {
  VisualParams visual;
  double arrow_fraction = 0.85;         // arrow centre, as a fraction along source->target
  double arrow_length_fraction = 0.08;  // arrow length relative to the edge
  double arrow_girth_factor = 2.5;      // arrow base radius relative to the tube
  float lowlight_opacity = 0.15f;
  float lowlight_gray = 0.12f;
  float lowlight_tint = 0.25f;  // share of the background colour mixed into the dark hue
  Rgb background{0.02f, 0.02f, 0.06f};
  Rgb highlight{1.0f, 0.0f, 0.0f};
  Rgb edge_color{0.6f, 0.6f, 0.6f};

  Rgb lowlight_color() const {
    auto mix = [&](float bg) { return (1.0f - lowlight_tint) * lowlight_gray + lowlight_tint * bg; };
    return {mix(background.r), mix(background.g), mix(background.b)};
  }
};

/// Precomputes the graph's static styling (radii, girths, group colours) and
/// turns per-frame state into instance buffers. `synthesize` is pure: equal
/// inputs give byte-identical buffers.
class SceneSynthesizer {
 public:
  explicit SceneSynthesizer(const DynamicGraph& g, SceneParams params = {})
      : graph_(g),
        params_(params),
        radii_(node_radii(g, params.visual)),
        girths_(edge_girths(g, params.visual)) {}

  const std::vector<double>& radii() const { return radii_; }
  const std::vector<double>& girths() const { return girths_; }
  const SceneParams& params() const { return params_; }

  /// `opacities` and `highlight` may be empty (all opaque / no hover).
  InstanceBuffers synthesize(std::span<const Vec3> positions, const ElementOpacities& opacities,
                             const HighlightState& highlight, const NavigationState& nav) const {
    const auto& g = graph_;
    if (positions.size() != g.node_count()) throw std::invalid_argument("synthesize: positions snapshot does not match graph");
    if (!opacities.nodes.empty() && (opacities.nodes.size() != g.node_count() || opacities.edges.size() != g.edge_count()))
      throw std::invalid_argument("synthesize: opacities do not match graph");
    if (!highlight.nodes.empty() && (highlight.nodes.size() != g.node_count() || highlight.edges.size() != g.edge_count()))
      throw std::invalid_argument("synthesize: highlight state does not match graph");

    InstanceBuffers out;
    const GraphTransform xf{centroid(positions), nav.graph_rotation};
    const bool rotate = !xf.is_identity();

    out.node_positions.resize(3 * g.node_count());
    std::vector<Vec3> world(positions.begin(), positions.end());
    for (NodeIndex n = 0; n < g.node_count(); ++n) {
      if (rotate) world[n] = xf.to_world(positions[n]);
      for (int a = 0; a < 3; ++a) out.node_positions[3 * n + a] = static_cast<float>(world[n][a]);
    }

    out.nodes.reserve(g.node_count() * NodeInstanceLayout::kStride);
    out.node_ids.reserve(g.node_count());
    for (NodeIndex n = 0; n < g.node_count(); ++n) {
      const Emphasis em = highlight.nodes.empty() ? Emphasis::Normal : highlight.nodes[n];
      const Rgb base = group_color(g.nodes()[n].group_index);
      const auto [rgb, alpha] = style(em, base, opacities.nodes.empty() ? 1.0 : opacities.nodes[n]);
      if (!(alpha > 0.0f)) continue;
      out.node_ids.push_back(n);
      for (int a = 0; a < 3; ++a) out.nodes.push_back(out.node_positions[3 * n + a]);
      out.nodes.push_back(static_cast<float>(radii_[n]));
      push_color(out.nodes, rgb, alpha);
    }

    out.edges.reserve(g.edge_count() * EdgeInstanceLayout::kStride);
    out.edge_ids.reserve(g.edge_count());
    for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
      const Emphasis em = highlight.edges.empty() ? Emphasis::Normal : highlight.edges[e];
      const auto [rgb, alpha] = style(em, params_.edge_color, opacities.edges.empty() ? 1.0 : opacities.edges[e]);
      if (!(alpha > 0.0f)) continue;
      const Vec3& s = world[g.source(e)];
      const Vec3& t = world[g.target(e)];
      const Vec3 d = t - s;
      const double len = d.norm();
      const Quat q = z_to_direction(d);
      out.edge_ids.push_back(e);
      push_edge(out.edges, 0.5 * (s + t), q, len, girths_[e], rgb, alpha);
      if (g.edge_directed(e)) {
        out.arrow_ids.push_back(e);
        push_edge(out.arrows, s + params_.arrow_fraction * d, q, params_.arrow_length_fraction * len,
                  params_.arrow_girth_factor * girths_[e], rgb, alpha);
      }
    }

    if (nav.perspective == Perspective::Overview) {
      if (nav.selection) out.camera_prop = PropTransform{nav.selection->entry_point, nav.active.orientation};
      else if (nav.has_detail_pose) out.camera_prop = PropTransform{nav.passive.position + nav.eye_height * world_up(), nav.passive.orientation};
    } else {
      out.camera_prop = PropTransform{nav.passive.position + nav.eye_height * world_up(), nav.passive.orientation};
      const RigPose head{nav.head_position(), nav.active.orientation};
      if ((nav.passive.position - head.position).norm() > 0.0) out.indicator = indicator_direction(nav, head);
    }
    return out;
  }

 private:
  struct Style {
    Rgb rgb;
    float alpha;
  };

  Style style(Emphasis em, const Rgb& base, double temporal_opacity) const {
    const auto t = static_cast<float>(std::clamp(temporal_opacity, 0.0, 1.0));
    switch (em) {
      case Emphasis::Highlight: return {params_.highlight, t};
      case Emphasis::Lowlight: return {params_.lowlight_color(), t * params_.lowlight_opacity};
      case Emphasis::Hovered:
      case Emphasis::Normal: break;
    }
    return {base, t};
  }

  static void push_color(std::vector<float>& buf, const Rgb& c, float alpha) {
    buf.insert(buf.end(), {c.r, c.g, c.b, alpha});
  }

  static void push_edge(std::vector<float>& buf, const Vec3& center, const Quat& q, double length, double girth,
                        const Rgb& c, float alpha) {
    buf.insert(buf.end(), {static_cast<float>(center.x()), static_cast<float>(center.y()), static_cast<float>(center.z()),
                           static_cast<float>(q.x()), static_cast<float>(q.y()), static_cast<float>(q.z()),
                           static_cast<float>(q.w()), static_cast<float>(length), static_cast<float>(girth)});
    push_color(buf, c, alpha);
  }

  const DynamicGraph& graph_;
  SceneParams params_;
  std::vector<double> radii_;
  std::vector<double> girths_;
};

inline InstanceBuffers synthesize(const DynamicGraph& g, std::span<const Vec3> positions,
                                  const ElementOpacities& opacities, const HighlightState& highlight,
                                  const NavigationState& nav, const SceneParams& params = {}) {
  return SceneSynthesizer(g, params).synthesize(positions, opacities, highlight, nav);
}

// ---------------------------------------------------------------------------
// Labels

struct LabelPayload {
  Entity entity;
  std::string text;
  bool screen_center = true;
};

/// Edge weights are shown with three significant digits ("0.8", "12.3").
inline std::string format_weight(double w) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", w);
  return buf;
}

inline std::optional<LabelPayload> label_payload(const DynamicGraph& g, const std::optional<Entity>& hovered) {
  if (!hovered) return std::nullopt;
  if (hovered->kind == EntityKind::Node) {
    if (hovered->index >= g.node_count()) throw GraphError("#" + std::to_string(hovered->index), "unknown node entity");
    return LabelPayload{*hovered, g.nodes()[hovered->index].label, true};
  }
  if (hovered->index >= g.edge_count()) throw GraphError("#" + std::to_string(hovered->index), "unknown edge entity");
  return LabelPayload{*hovered, format_weight(g.edges()[hovered->index].weight), true};
}

}  // namespace netvr
