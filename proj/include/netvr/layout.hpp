#pragma once

// 3D force-directed layout: many-body repulsion (exact or Barnes-Hut), link
// springs and centering, annealed by a geometrically decaying temperature.
// The layout runs over every edge regardless of frame, so positions are
// shared by all time frames.

#include "geometry.hpp"
#include "graph.hpp"
#include "octree.hpp"

#include <charconv>
#include <cmath>
#include <condition_variable>
#include <cstdint>
#include <fstream>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace netvr {

struct LayoutParams {
  double repulsion_strength = -30.0;  // negative repels
  double link_distance = 30.0;
  double velocity_decay = 0.4;
  double alpha_decay = 1.0 - std::pow(0.001, 1.0 / 300.0);
  double alpha_min = 0.001;
  double theta = 0.9;
  /// Pairs closer than this have their squared distance softened to
  /// distance_min * distance, bounding the kick between near-coincident nodes.
  double distance_min = 1.0;
  /// Keep ticking after alpha < alpha_min (background worker only).
  bool keep_ticking = false;

  void validate() const {
    if (!(theta > 0.0)) throw std::invalid_argument("theta must be > 0");
    if (!(velocity_decay > 0.0 && velocity_decay < 1.0)) throw std::invalid_argument("velocity_decay must be in (0,1)");
    if (!(alpha_decay > 0.0 && alpha_decay < 1.0)) throw std::invalid_argument("alpha_decay must be in (0,1)");
    if (!(alpha_min > 0.0 && alpha_min < 1.0)) throw std::invalid_argument("alpha_min must be in (0,1)");
    if (!(link_distance >= 0.0)) throw std::invalid_argument("link_distance must be >= 0");
    if (!(distance_min >= 0.0)) throw std::invalid_argument("distance_min must be >= 0");
  }
};

/// Reads `key = value` lines ('#' starts a comment) over the defaults.
inline LayoutParams parse_layout_params(const std::string& text, LayoutParams params = {}) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    const std::string where = "layout params line " + std::to_string(lineno);
    if (eq == std::string::npos) throw std::invalid_argument(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "keep_ticking") {
      if (val != "true" && val != "false") throw std::invalid_argument(where + ": keep_ticking must be true/false");
      params.keep_ticking = val == "true";
      continue;
    }
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), x);
    if (ec != std::errc() || ptr != val.data() + val.size())
      throw std::invalid_argument(where + ": bad number '" + val + "'");
    if (key == "repulsion_strength") params.repulsion_strength = x;
    else if (key == "link_distance") params.link_distance = x;
    else if (key == "velocity_decay") params.velocity_decay = x;
    else if (key == "alpha_decay") params.alpha_decay = x;
    else if (key == "alpha_min") params.alpha_min = x;
    else if (key == "theta") params.theta = x;
    else if (key == "distance_min") params.distance_min = x;
    else throw std::invalid_argument(where + ": unknown key '" + key + "'");
  }
  params.validate();
  return params;
}

inline LayoutParams load_layout_params_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open layout params file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_layout_params(ss.str());
}

/// Raised when a tick produces a non-finite coordinate.
class LayoutError : public std::runtime_error {
 public:
  LayoutError(const std::string& node_id, const std::string& what)
      : std::runtime_error(what + " [" + node_id + "]"), node_id_(node_id) {}
  const std::string& node_id() const noexcept { return node_id_; }

 private:
  std::string node_id_;
};

struct LayoutState {
  std::vector<Vec3> positions;
  std::vector<Vec3> velocities;
  double alpha = 1.0;
  std::uint64_t tick_count = 0;
  std::uint64_t seed = 0;
  LayoutParams params;

  bool converged() const { return alpha < params.alpha_min; }
};

/// Pair-interaction counter for Barnes-Hut evaluations: one count per exact
/// pair and one per accepted cell aggregate.
struct ForceStats {
  std::uint64_t interactions = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline double unit_double(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

/// Deterministic 1e-6 displacement standing in for (x_i - x_j) when two nodes
/// coincide. Antisymmetric in (i, j), so pair forces still cancel.
inline Vec3 jiggle(std::uint32_t i, std::uint32_t j, std::uint64_t seed) {
  const std::uint32_t lo = std::min(i, j), hi = std::max(i, j);
  std::uint64_t h = splitmix64(seed ^ ((std::uint64_t{lo} << 32) | hi));
  Vec3 u;
  for (int a = 0; a < 3; ++a) {
    h = splitmix64(h);
    u[a] = 2.0 * unit_double(h) - 1.0;
  }
  if (u.squaredNorm() == 0.0) u = Vec3::UnitX();
  u = u.normalized() * 1e-6;
  return i < j ? u : Vec3(-u);
}

/// Velocity increment on a node at offset `delta` = (x_i - x_j) from a source
/// of `strength` (negative strength pushes the node away).
inline Vec3 repulsion_kernel(const Vec3& delta, double strength, double alpha, double distance_min) {
  double l2 = delta.squaredNorm();
  if (l2 < distance_min * distance_min) l2 = distance_min * std::sqrt(l2);
  return delta * (-strength * alpha / l2);
}

inline Vec3 pair_repulsion(const LayoutState& s, std::uint32_t i, std::uint32_t j) {
  Vec3 delta = s.positions[i] - s.positions[j];
  if (delta.squaredNorm() == 0.0) delta = jiggle(i, j, s.seed);
  return repulsion_kernel(delta, s.params.repulsion_strength, s.alpha, s.params.distance_min);
}

/// Link springs. Stiffness is 1/min(deg(s), deg(t)); the correction is split
/// between endpoints in proportion to degree (the lighter end moves more).
/// Uses positions extrapolated by the current velocities.
inline void add_link_forces(const LayoutState& s, const DynamicGraph& g, std::vector<Vec3>& forces) {
  std::vector<std::uint32_t> count(g.node_count(), 0);
  for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
    if (g.source(e) == g.target(e)) continue;
    ++count[g.source(e)];
    ++count[g.target(e)];
  }
  for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
    const NodeIndex a = g.source(e), b = g.target(e);
    if (a == b) continue;
    const double stiffness = 1.0 / std::min(count[a], count[b]);
    const double bias = static_cast<double>(count[a]) / (count[a] + count[b]);
    Vec3 d = (s.positions[b] + s.velocities[b]) - (s.positions[a] + s.velocities[a]);
    if (d.squaredNorm() == 0.0) d = jiggle(b, a, s.seed);
    const double l = d.norm();
    d *= (l - s.params.link_distance) / l * s.alpha * stiffness;
    forces[b] -= d * bias;
    forces[a] += d * (1.0 - bias);
  }
}

}  // namespace detail

/// Initial placement on a 3D phyllotaxis spiral (radius grows with the cube
/// root of the node rank), rotated by a seed-derived rotation and centred on
/// the origin. Throws std::invalid_argument for an empty graph.
inline LayoutState init_layout(const DynamicGraph& g, std::uint64_t seed, LayoutParams params = {}) {
  if (g.node_count() == 0) throw std::invalid_argument("init_layout: empty graph");
  params.validate();
  LayoutState s;
  s.seed = seed;
  s.params = params;
  s.positions.resize(g.node_count());
  s.velocities.assign(g.node_count(), Vec3::Zero());

  constexpr double kInitialRadius = 10.0;
  const double roll_step = std::numbers::pi * (3.0 - std::sqrt(5.0));
  const double yaw_step = std::numbers::pi * 20.0 / (9.0 + std::sqrt(221.0));

  std::uint64_t h = detail::splitmix64(seed);
  Quat spin;
  {
    double c[4];
    for (double& v : c) {
      h = detail::splitmix64(h);
      v = 2.0 * detail::unit_double(h) - 1.0;
    }
    spin = Quat(c[0], c[1], c[2], c[3]);
    spin = spin.norm() > 1e-3 ? spin.normalized() : Quat::Identity();
  }

  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const double radius = kInitialRadius * std::cbrt(0.5 + static_cast<double>(i));
    const double roll = static_cast<double>(i) * roll_step;
    const double yaw = static_cast<double>(i) * yaw_step;
    const Vec3 p(radius * std::cos(roll) * std::cos(yaw), radius * std::sin(roll) * std::cos(yaw),
                 radius * std::sin(yaw));
    s.positions[i] = spin * p;
  }
  const Vec3 c = centroid(s.positions);
  for (auto& p : s.positions) p -= c;
  return s;
}

/// Exact O(n^2) forces (repulsion + links), as per-node velocity increments.
inline std::vector<Vec3> compute_forces_brute(const LayoutState& s, const DynamicGraph& g) {
  const auto n = static_cast<std::uint32_t>(s.positions.size());
  std::vector<Vec3> forces(n, Vec3::Zero());
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < n; ++j)
      if (i != j) forces[i] += detail::pair_repulsion(s, i, j);
  detail::add_link_forces(s, g, forces);
  return forces;
}

/// Barnes-Hut forces: a cell is replaced by its aggregate when
/// width / distance < theta. Links are exact.
inline std::vector<Vec3> compute_forces_bh(const LayoutState& s, const DynamicGraph& g, const Octree& tree,
                                           ForceStats* stats = nullptr) {
  const auto n = static_cast<std::uint32_t>(s.positions.size());
  std::vector<Vec3> forces(n, Vec3::Zero());
  if (tree.point_order().size() != n) throw std::invalid_argument("octree does not match layout state");
  const double theta2 = s.params.theta * s.params.theta;
  const auto& cells = tree.cells();
  std::uint64_t interactions = 0;
  std::vector<std::int32_t> stack;
  stack.reserve(64);

  // spatially adjacent points walk the same cells, so visit them in tree order
  for (std::uint32_t i : tree.point_order()) {
    const Vec3& xi = s.positions[i];
    Vec3 f = Vec3::Zero();
    stack.assign(1, 0);
    while (!stack.empty()) {
      const auto& c = cells[static_cast<std::size_t>(stack.back())];
      stack.pop_back();
      if (c.leaf) {
        for (std::uint32_t j : tree.points_in(c)) {
          if (j == i) continue;
          f += detail::pair_repulsion(s, i, j);
          ++interactions;
        }
        continue;
      }
      const Vec3 delta = xi - c.center_of_mass;
      const double l2 = delta.squaredNorm();
      if (c.width * c.width < theta2 * l2) {
        f += detail::repulsion_kernel(delta, s.params.repulsion_strength * c.count(), s.alpha,
                                      s.params.distance_min);
        ++interactions;
        continue;
      }
      for (auto child : c.children)
        if (child != Octree::kNone) stack.push_back(child);
    }
    forces[i] = f;
  }
  detail::add_link_forces(s, g, forces);
  if (stats) stats->interactions += interactions;
  return forces;
}

/// One annealing step: decay alpha, apply Barnes-Hut + link forces to the
/// velocities, damp, integrate, then translate the centroid to the origin.
/// Throws LayoutError naming the first node with a non-finite coordinate.
inline void tick(LayoutState& s, const DynamicGraph& g) {
  if (!(s.alpha > 0.0)) throw std::invalid_argument("tick: alpha must be > 0");
  if (s.positions.size() != g.node_count()) throw std::invalid_argument("tick: state does not match graph");
  s.alpha += (0.0 - s.alpha) * s.params.alpha_decay;

  const Octree tree(s.positions, s.params.repulsion_strength);
  const auto forces = compute_forces_bh(s, g, tree);
  const double keep = 1.0 - s.params.velocity_decay;
  for (std::size_t i = 0; i < s.positions.size(); ++i) {
    s.velocities[i] = (s.velocities[i] + forces[i]) * keep;
    s.positions[i] += s.velocities[i];
  }
  for (std::size_t i = 0; i < s.positions.size(); ++i)
    if (!all_finite(s.positions[i])) throw LayoutError(g.nodes()[i].id, "non-finite layout position");
  const Vec3 c = centroid(s.positions);
  for (auto& p : s.positions) p -= c;
  ++s.tick_count;
}

/// Ticks until alpha < alpha_min. A single node is already at rest.
inline std::vector<Vec3> run_to_convergence(LayoutState& s, const DynamicGraph& g) {
  if (s.positions.size() <= 1) return s.positions;
  while (!s.converged()) tick(s, g);
  return s.positions;
}

// ---------------------------------------------------------------------------
// Background worker

/// Immutable positions published after a tick.
struct PositionsSnapshot {
  std::vector<Vec3> positions;
  std::uint64_t tick_count = 0;
  double alpha = 1.0;
};

/// Single writer, many readers: a dedicated thread ticks the layout and
/// publishes a fresh immutable snapshot after every tick. Readers only ever
/// hold complete snapshots.
class LayoutWorker {
 public:
  LayoutWorker(const DynamicGraph& graph, LayoutState state) : graph_(graph), state_(std::move(state)) {
    publish();
  }
  ~LayoutWorker() { stop(); }
  LayoutWorker(const LayoutWorker&) = delete;
  LayoutWorker& operator=(const LayoutWorker&) = delete;

  void start() {
    if (thread_.joinable()) return;
    thread_ = std::jthread([this](std::stop_token st) { run(st); });
  }

  void stop() {
    if (!thread_.joinable()) return;
    thread_.request_stop();
    thread_.join();
  }

  std::shared_ptr<const PositionsSnapshot> snapshot() const {
    std::lock_guard lock(mutex_);
    return snapshot_;
  }

  /// Blocks until the layout has converged (or the worker failed/stopped).
  std::shared_ptr<const PositionsSnapshot> wait_converged() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return done_; });
    if (error_) std::rethrow_exception(error_);
    return snapshot_;
  }

 private:
  void run(std::stop_token st) {
    try {
      while (!st.stop_requested()) {
        if (state_.positions.size() <= 1 || (state_.converged() && !state_.params.keep_ticking)) break;
        if (state_.alpha <= 0.0) break;
        tick(state_, graph_);
        publish();
        if (state_.converged()) signal_done();
      }
    } catch (...) {
      std::lock_guard lock(mutex_);
      error_ = std::current_exception();
    }
    signal_done();
  }

  void publish() {
    auto snap = std::make_shared<PositionsSnapshot>();
    snap->positions = state_.positions;
    snap->tick_count = state_.tick_count;
    snap->alpha = state_.alpha;
    std::lock_guard lock(mutex_);
    snapshot_ = std::move(snap);
  }

  void signal_done() {
    {
      std::lock_guard lock(mutex_);
      done_ = true;
    }
    cv_.notify_all();
  }

  const DynamicGraph& graph_;
  LayoutState state_;
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::shared_ptr<const PositionsSnapshot> snapshot_;
  bool done_ = false;
  std::exception_ptr error_;
  std::jthread thread_;
};

}  // namespace netvr
