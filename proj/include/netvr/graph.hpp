#pragma once

// Dynamic attributed graph: JSON loading/validation, adjacency, per-frame
// presence and the attribute -> visual mapping.

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace netvr {

using NodeIndex = std::uint32_t;
using EdgeIndex = std::uint32_t;
using FrameIndex = std::uint32_t;

/// Validation or lookup failure; `element()` names the offending node/edge.
class GraphError : public std::runtime_error {
 public:
  GraphError(const std::string& element, const std::string& what)
      : std::runtime_error(element.empty() ? what : what + " [" + element + "]"), element_(element) {}
  const std::string& element() const noexcept { return element_; }

 private:
  std::string element_;
};

struct NodeRecord {
  std::string id;
  std::string label;
  nlohmann::json group;         // as written in the input (number, string or null)
  std::uint32_t group_index = 0;
  double value = 1.0;
  std::vector<FrameIndex> frames;  // sorted, unique; empty on input means "all frames"
  nlohmann::json attributes = nlohmann::json::object();  // unknown fields, passed through
};

struct EdgeRecord {
  std::string source;
  std::string target;
  double weight = 1.0;
  std::optional<bool> directed;   // unset: inherits the graph default
  std::vector<FrameIndex> frames;
  nlohmann::json attributes = nlohmann::json::object();
};

struct Neighborhood {
  std::vector<NodeIndex> nodes;
  std::vector<EdgeIndex> edges;
};

enum class EdgeFilter { Both, Outgoing };

/// Elements present in one frame, as per-element masks.
struct FramePresence {
  std::vector<std::uint8_t> nodes;
  std::vector<std::uint8_t> edges;

  std::vector<NodeIndex> node_indices() const { return indices(nodes); }
  std::vector<EdgeIndex> edge_indices() const { return indices(edges); }

 private:
  static std::vector<std::uint32_t> indices(const std::vector<std::uint8_t>& mask) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < mask.size(); ++i)
      if (mask[i]) out.push_back(i);
    return out;
  }
};

/// Immutable once constructed. The constructor validates every invariant and
/// builds the adjacency index; elements with no frames become present in all.
class DynamicGraph {
 public:
  DynamicGraph(std::vector<NodeRecord> nodes, std::vector<EdgeRecord> edges, std::uint32_t frame_count = 1,
               bool directed = false, nlohmann::json attributes = nlohmann::json::object())
      : nodes_(std::move(nodes)),
        edges_(std::move(edges)),
        frame_count_(frame_count),
        directed_(directed),
        attributes_(std::move(attributes)) {
    validate_and_index();
  }

  const std::vector<NodeRecord>& nodes() const { return nodes_; }
  const std::vector<EdgeRecord>& edges() const { return edges_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::uint32_t frame_count() const { return frame_count_; }
  bool directed() const { return directed_; }
  const nlohmann::json& attributes() const { return attributes_; }

  bool edge_directed(EdgeIndex e) const { return edges_.at(e).directed.value_or(directed_); }
  NodeIndex source(EdgeIndex e) const { return endpoints_.at(e)[0]; }
  NodeIndex target(EdgeIndex e) const { return endpoints_.at(e)[1]; }
  const std::vector<EdgeIndex>& incident(NodeIndex n) const { return adjacency_.at(n); }
  std::size_t degree(NodeIndex n) const { return adjacency_.at(n).size(); }

  std::optional<NodeIndex> find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  NodeIndex index_of(std::string_view id) const {
    if (auto i = find(id)) return *i;
    throw GraphError(std::string(id), "unknown node id");
  }

  bool node_in_frame(NodeIndex n, FrameIndex f) const {
    return std::binary_search(nodes_[n].frames.begin(), nodes_[n].frames.end(), f);
  }
  bool edge_in_frame(EdgeIndex e, FrameIndex f) const {
    return std::binary_search(edges_[e].frames.begin(), edges_[e].frames.end(), f);
  }

 private:
  void validate_and_index();

  std::vector<NodeRecord> nodes_;
  std::vector<EdgeRecord> edges_;
  std::uint32_t frame_count_;
  bool directed_;
  nlohmann::json attributes_;
  std::unordered_map<std::string, NodeIndex> index_;
  std::vector<std::array<NodeIndex, 2>> endpoints_;
  std::vector<std::vector<EdgeIndex>> adjacency_;
};

namespace detail {

inline void normalize_frames(std::vector<FrameIndex>& frames, std::uint32_t frame_count, const std::string& who) {
  if (frames.empty()) {
    frames.resize(frame_count);
    for (FrameIndex f = 0; f < frame_count; ++f) frames[f] = f;
    return;
  }
  std::sort(frames.begin(), frames.end());
  frames.erase(std::unique(frames.begin(), frames.end()), frames.end());
  if (frames.back() >= frame_count)
    throw GraphError(who, "frame index " + std::to_string(frames.back()) + " >= frame_count " +
                              std::to_string(frame_count));
}

inline std::string edge_name(const EdgeRecord& e) { return e.source + "->" + e.target; }

}  // namespace detail

inline void DynamicGraph::validate_and_index() {
  if (frame_count_ < 1) throw GraphError("", "frame_count must be >= 1");

  std::unordered_map<std::string, std::uint32_t> group_names;
  index_.reserve(nodes_.size());
  for (NodeIndex i = 0; i < nodes_.size(); ++i) {
    auto& n = nodes_[i];
    if (n.id.empty()) throw GraphError("#" + std::to_string(i), "node without id");
    if (!index_.emplace(n.id, i).second) throw GraphError(n.id, "duplicate node id");
    if (!(n.value >= 0.0) || !std::isfinite(n.value)) throw GraphError(n.id, "node value must be finite and >= 0");
    if (n.label.empty()) n.label = n.id;
    if (n.group.is_number_integer() && n.group.get<std::int64_t>() >= 0) {
      n.group_index = static_cast<std::uint32_t>(n.group.get<std::int64_t>());
    } else if (!n.group.is_null()) {
      const std::string key = n.group.is_string() ? n.group.get<std::string>() : n.group.dump();
      n.group_index = group_names.emplace(key, static_cast<std::uint32_t>(group_names.size())).first->second;
    }
    detail::normalize_frames(n.frames, frame_count_, n.id);
  }

  endpoints_.resize(edges_.size());
  adjacency_.assign(nodes_.size(), {});
  // pair key -> frames already claimed by an edge with that key
  std::unordered_map<std::uint64_t, std::vector<FrameIndex>> claimed;
  for (EdgeIndex e = 0; e < edges_.size(); ++e) {
    auto& rec = edges_[e];
    const std::string name = detail::edge_name(rec);
    auto s = find(rec.source);
    if (!s) throw GraphError(rec.source, "edge " + name + " has dangling endpoint");
    auto t = find(rec.target);
    if (!t) throw GraphError(rec.target, "edge " + name + " has dangling endpoint");
    if (!(rec.weight >= 0.0) || !std::isfinite(rec.weight)) throw GraphError(name, "edge weight must be finite and >= 0");
    detail::normalize_frames(rec.frames, frame_count_, name);

    endpoints_[e] = {*s, *t};
    adjacency_[*s].push_back(e);
    if (*t != *s) adjacency_[*t].push_back(e);

    const bool dir = rec.directed.value_or(directed_);
    const NodeIndex a = dir ? *s : std::min(*s, *t);
    const NodeIndex b = dir ? *t : std::max(*s, *t);
    const std::uint64_t key = (std::uint64_t{a} << 32) | b;
    auto& used = claimed[key];
    std::vector<FrameIndex> overlap;
    std::set_intersection(used.begin(), used.end(), rec.frames.begin(), rec.frames.end(), std::back_inserter(overlap));
    if (!overlap.empty())
      throw GraphError(name, "duplicate edge in frame " + std::to_string(overlap.front()));
    std::vector<FrameIndex> merged;
    std::set_union(used.begin(), used.end(), rec.frames.begin(), rec.frames.end(), std::back_inserter(merged));
    used = std::move(merged);
  }
}

// ---------------------------------------------------------------------------
// JSON I/O

namespace detail {

inline std::string id_string(const nlohmann::json& v, const std::string& what) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  throw GraphError("", what + " must be a string or integer id");
}

inline std::vector<FrameIndex> read_frames(const nlohmann::json& obj, const std::string& who) {
  std::vector<FrameIndex> frames;
  auto it = obj.find("frames");
  if (it == obj.end()) return frames;
  if (!it->is_array()) throw GraphError(who, "frames must be an array");
  if (it->empty()) throw GraphError(who, "frames must not be empty");
  for (const auto& f : *it) {
    if (!f.is_number_integer() || f.get<std::int64_t>() < 0)
      throw GraphError(who, "frame index must be a nonnegative integer");
    frames.push_back(static_cast<FrameIndex>(f.get<std::int64_t>()));
  }
  return frames;
}

inline double read_number(const nlohmann::json& obj, const char* key, double fallback, const std::string& who) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  if (!it->is_number()) throw GraphError(who, std::string(key) + " must be a number");
  return it->get<double>();
}

inline nlohmann::json extra_fields(const nlohmann::json& obj, std::initializer_list<const char*> known) {
  nlohmann::json out = nlohmann::json::object();
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return it.key() == k; }))
      out[it.key()] = it.value();
  return out;
}

inline nlohmann::json frames_json(const std::vector<FrameIndex>& frames, std::uint32_t frame_count) {
  if (frames.size() == frame_count) return nullptr;  // canonical form omits "all frames"
  return frames;
}

}  // namespace detail

/// Parses and validates a graph document. Throws GraphError (with the element
/// id) on any schema or invariant violation, including JSON syntax errors.
inline DynamicGraph load_graph(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw GraphError("", std::string("JSON parse error: ") + e.what());
  }
  if (!doc.is_object()) throw GraphError("", "top level must be an object");

  const bool directed = doc.value("directed", false);
  std::int64_t frame_count = 1;
  if (auto it = doc.find("frame_count"); it != doc.end()) {
    if (!it->is_number_integer() || it->get<std::int64_t>() < 1)
      throw GraphError("", "frame_count must be a positive integer");
    frame_count = it->get<std::int64_t>();
  }

  std::vector<NodeRecord> nodes;
  const auto& jn = doc.contains("nodes") ? doc["nodes"] : nlohmann::json::array();
  if (!jn.is_array()) throw GraphError("", "nodes must be an array");
  nodes.reserve(jn.size());
  for (const auto& o : jn) {
    if (!o.is_object() || !o.contains("id")) throw GraphError("", "node must be an object with an id");
    NodeRecord n;
    n.id = detail::id_string(o["id"], "node id");
    if (auto it = o.find("label"); it != o.end() && it->is_string()) n.label = it->get<std::string>();
    if (auto it = o.find("group"); it != o.end()) n.group = *it;
    n.value = detail::read_number(o, "value", 1.0, n.id);
    n.frames = detail::read_frames(o, n.id);
    n.attributes = detail::extra_fields(o, {"id", "label", "group", "value", "frames"});
    nodes.push_back(std::move(n));
  }

  std::vector<EdgeRecord> edges;
  const auto& jl = doc.contains("links") ? doc["links"] : nlohmann::json::array();
  if (!jl.is_array()) throw GraphError("", "links must be an array");
  edges.reserve(jl.size());
  for (const auto& o : jl) {
    if (!o.is_object() || !o.contains("source") || !o.contains("target"))
      throw GraphError("", "link must be an object with source and target");
    EdgeRecord e;
    e.source = detail::id_string(o["source"], "link source");
    e.target = detail::id_string(o["target"], "link target");
    const std::string name = detail::edge_name(e);
    e.weight = detail::read_number(o, "weight", 1.0, name);
    if (auto it = o.find("directed"); it != o.end() && it->is_boolean()) e.directed = it->get<bool>();
    e.frames = detail::read_frames(o, name);
    e.attributes = detail::extra_fields(o, {"source", "target", "weight", "directed", "frames"});
    edges.push_back(std::move(e));
  }

  return DynamicGraph(std::move(nodes), std::move(edges), static_cast<std::uint32_t>(frame_count), directed,
                      detail::extra_fields(doc, {"directed", "frame_count", "nodes", "links"}));
}

inline DynamicGraph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GraphError(path, "cannot open graph file");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_graph(ss.str());
}

/// Canonical JSON form: "frames" omitted where an element spans all frames,
/// per-edge "directed" written only when it was given explicitly.
inline nlohmann::json to_json(const DynamicGraph& g) {
  nlohmann::json doc = g.attributes();
  doc["directed"] = g.directed();
  doc["frame_count"] = g.frame_count();
  auto& nodes = doc["nodes"] = nlohmann::json::array();
  for (const auto& n : g.nodes()) {
    nlohmann::json o = n.attributes;
    o["id"] = n.id;
    o["label"] = n.label;
    if (!n.group.is_null()) o["group"] = n.group;
    o["value"] = n.value;
    if (auto f = detail::frames_json(n.frames, g.frame_count()); !f.is_null()) o["frames"] = f;
    nodes.push_back(std::move(o));
  }
  auto& links = doc["links"] = nlohmann::json::array();
  for (const auto& e : g.edges()) {
    nlohmann::json o = e.attributes;
    o["source"] = e.source;
    o["target"] = e.target;
    o["weight"] = e.weight;
    if (e.directed) o["directed"] = *e.directed;
    if (auto f = detail::frames_json(e.frames, g.frame_count()); !f.is_null()) o["frames"] = f;
    links.push_back(std::move(o));
  }
  return doc;
}

inline std::string serialize(const DynamicGraph& g) { return to_json(g).dump(2); }

// ---------------------------------------------------------------------------
// Queries

/// Nodes adjacent to `node` through any incident edge plus those edges, both
/// sorted ascending. `Outgoing` keeps only edges leaving `node` (undirected
/// edges always count as outgoing).
inline Neighborhood neighborhood(const DynamicGraph& g, NodeIndex node, EdgeFilter filter = EdgeFilter::Both) {
  if (node >= g.node_count()) throw GraphError("#" + std::to_string(node), "unknown node index");
  Neighborhood out;
  for (EdgeIndex e : g.incident(node)) {
    const NodeIndex s = g.source(e), t = g.target(e);
    if (filter == EdgeFilter::Outgoing && g.edge_directed(e) && s != node) continue;
    out.edges.push_back(e);
    const NodeIndex other = s == node ? t : s;
    if (other != node) out.nodes.push_back(other);
  }
  std::sort(out.nodes.begin(), out.nodes.end());
  out.nodes.erase(std::unique(out.nodes.begin(), out.nodes.end()), out.nodes.end());
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

inline Neighborhood neighborhood(const DynamicGraph& g, std::string_view id, EdgeFilter filter = EdgeFilter::Both) {
  return neighborhood(g, g.index_of(id), filter);
}

/// An edge is present only when it lists the frame and both endpoints do too.
inline FramePresence frame_presence(const DynamicGraph& g, FrameIndex frame) {
  if (frame >= g.frame_count())
    throw std::out_of_range("frame " + std::to_string(frame) + " out of range [0, " +
                            std::to_string(g.frame_count()) + ")");
  FramePresence p;
  p.nodes.resize(g.node_count());
  for (NodeIndex n = 0; n < g.node_count(); ++n) p.nodes[n] = g.node_in_frame(n, frame);
  p.edges.resize(g.edge_count());
  for (EdgeIndex e = 0; e < g.edge_count(); ++e)
    p.edges[e] = g.edge_in_frame(e, frame) && p.nodes[g.source(e)] && p.nodes[g.target(e)];
  return p;
}

// ---------------------------------------------------------------------------
// Visual mapping

struct Rgb {
  float r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct VisualParams {
  double node_radius_min = 0.5;
  double node_radius_max = 2.5;  // radius of the largest-value node
  double edge_girth_min = 0.05;
  double edge_girth_max = 0.3;
};

/// r = r_min + k*sqrt(value), with k scaled so the largest value maps to r_max.
inline std::vector<double> node_radii(const DynamicGraph& g, const VisualParams& vp = {}) {
  double max_value = 0.0;
  for (const auto& n : g.nodes()) max_value = std::max(max_value, n.value);
  const double k = max_value > 0.0 ? (vp.node_radius_max - vp.node_radius_min) / std::sqrt(max_value) : 0.0;
  std::vector<double> r;
  r.reserve(g.node_count());
  for (const auto& n : g.nodes()) r.push_back(vp.node_radius_min + k * std::sqrt(n.value));
  return r;
}

/// Girth linear in weight, normalized onto [girth_min, girth_max].
inline std::vector<double> edge_girths(const DynamicGraph& g, const VisualParams& vp = {}) {
  double max_weight = 0.0;
  for (const auto& e : g.edges()) max_weight = std::max(max_weight, e.weight);
  const double k = max_weight > 0.0 ? (vp.edge_girth_max - vp.edge_girth_min) / max_weight : 0.0;
  std::vector<double> out;
  out.reserve(g.edge_count());
  for (const auto& e : g.edges()) out.push_back(vp.edge_girth_min + k * e.weight);
  return out;
}

// 12-class "Paired" categorical palette.
inline constexpr std::array<Rgb, 12> kGroupPalette{{
    {0.651f, 0.808f, 0.890f}, {0.122f, 0.471f, 0.706f}, {0.698f, 0.875f, 0.541f}, {0.200f, 0.627f, 0.173f},
    {0.984f, 0.604f, 0.600f}, {0.890f, 0.102f, 0.110f}, {0.992f, 0.749f, 0.435f}, {1.000f, 0.498f, 0.000f},
    {0.792f, 0.698f, 0.839f}, {0.416f, 0.239f, 0.604f}, {1.000f, 1.000f, 0.600f}, {0.694f, 0.349f, 0.157f},
}};

inline Rgb group_color(std::uint32_t group_index) { return kGroupPalette[group_index % kGroupPalette.size()]; }

}  // namespace netvr
