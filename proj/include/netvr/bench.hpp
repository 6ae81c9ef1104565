#pragma once

// Headless benchmark: Erdos-Renyi G(n, m) graphs and scripted per-frame
// workloads (static overview, overview rotation, detail navigation) timed on
// the core pipeline (layout tick + scene synthesis + one pick).

#include "geometry.hpp"
#include "graph.hpp"
#include "layout.hpp"
#include "navigation.hpp"
#include "picking.hpp"
#include "scene.hpp"
#include "temporal.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace netvr {

/// G(n, m): exactly m distinct undirected edges drawn uniformly from the
/// n(n-1)/2 possible pairs; no self-loops. Deterministic for a seed.
inline DynamicGraph generate_er(std::uint32_t n, std::uint64_t m, std::uint64_t seed) {
  const std::uint64_t pairs = std::uint64_t{n} * (n > 0 ? n - 1 : 0) / 2;
  if (m > pairs)
    throw std::invalid_argument("generate_er: m = " + std::to_string(m) + " exceeds n(n-1)/2 = " + std::to_string(pairs));

  // Past half density draw the complement instead.
  const bool complement = m > pairs / 2;
  const std::uint64_t draws = complement ? pairs - m : m;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> pick(0, n > 0 ? n - 1 : 0);
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(static_cast<std::size_t>(draws * 2));
  while (chosen.size() < draws) {
    std::uint32_t a = pick(rng), b = pick(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    chosen.insert((std::uint64_t{a} << 32) | b);
  }

  std::vector<std::uint64_t> keys;
  keys.reserve(static_cast<std::size_t>(m));
  if (complement) {
    for (std::uint32_t a = 0; a < n; ++a)
      for (std::uint32_t b = a + 1; b < n; ++b) {
        const std::uint64_t k = (std::uint64_t{a} << 32) | b;
        if (!chosen.count(k)) keys.push_back(k);
      }
  } else {
    keys.assign(chosen.begin(), chosen.end());
    std::sort(keys.begin(), keys.end());
  }

  std::vector<NodeRecord> nodes(n);
  for (std::uint32_t i = 0; i < n; ++i) nodes[i].id = std::to_string(i);
  std::vector<EdgeRecord> edges;
  edges.reserve(keys.size());
  for (auto k : keys) {
    EdgeRecord e;
    e.source = std::to_string(k >> 32);
    e.target = std::to_string(k & 0xffffffffu);
    edges.push_back(std::move(e));
  }
  return DynamicGraph(std::move(nodes), std::move(edges), 1, false);
}

enum class ScenarioKind { OverviewStatic, OverviewRotation, DetailNavigation };

inline const char* scenario_name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::OverviewStatic: return "overview";
    case ScenarioKind::OverviewRotation: return "rotation";
    case ScenarioKind::DetailNavigation: return "detail";
  }
  return "?";
}

inline ScenarioKind parse_scenario(const std::string& s) {
  if (s == "overview") return ScenarioKind::OverviewStatic;
  if (s == "rotation") return ScenarioKind::OverviewRotation;
  if (s == "detail") return ScenarioKind::DetailNavigation;
  throw std::invalid_argument("unknown scenario '" + s + "' (overview|rotation|detail)");
}

struct Scenario {
  ScenarioKind kind = ScenarioKind::OverviewStatic;
  std::uint32_t frames = 600;
  std::uint64_t seed = 1;
  std::uint32_t warmup_frames = 60;
  double frame_dt = 1.0 / 90.0;        // simulated seconds per frame
  double rotation_deg_per_s = 30.0;    // OverviewRotation yaw rate
  std::uint32_t flights_per_600 = 10;  // DetailNavigation scripted flights per 600 frames
  bool concurrent = false;             // layout keeps ticking on a worker thread
  LayoutParams layout;
};

struct TimingReport {
  std::string scenario;
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  std::vector<double> samples_ms;
  std::uint64_t pick_queries = 0;
  std::uint64_t layout_ticks = 0;

  double mean() const {
    require_samples();
    return std::accumulate(samples_ms.begin(), samples_ms.end(), 0.0) / static_cast<double>(samples_ms.size());
  }
  /// Nearest-rank 95th percentile.
  double p95() const {
    require_samples();
    auto s = samples_ms;
    std::sort(s.begin(), s.end());
    const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(s.size())));
    return s[std::max<std::size_t>(rank, 1) - 1];
  }
  double fps_equivalent() const { return 1000.0 / mean(); }

 private:
  void require_samples() const {
    if (samples_ms.empty()) throw std::logic_error("timing report has no samples");
  }
};

/// Converges the layout, then runs `frames` timed frames (after the warmup)
/// of the scenario's scripted workload. Throws LayoutError on divergence.
inline TimingReport run_scenario(const DynamicGraph& g, const Scenario& sc) {
  if (sc.frames == 0) throw std::invalid_argument("run_scenario: frames must be > 0");
  if (g.node_count() == 0) throw std::invalid_argument("run_scenario: empty graph");
  using clock = std::chrono::steady_clock;

  LayoutParams lp = sc.layout;
  if (sc.concurrent) lp.keep_ticking = true;
  LayoutState layout = init_layout(g, sc.seed, lp);
  run_to_convergence(layout, g);

  SceneSynthesizer scene(g);
  std::vector<Vec3> positions = layout.positions;
  PickIndex index(g, positions, scene.radii(), scene.girths());
  const Sphere bounds = bounding_sphere(positions, scene.radii());
  NavigationState nav = make_navigation(bounds);
  const PresenceTable table = time_frame_table(g);
  const TimeCursor cursor = make_cursor(table.size());
  const ElementOpacities no_fade;

  std::unique_ptr<LayoutWorker> worker;
  std::uint64_t seen_tick = layout.tick_count;
  if (sc.concurrent) {
    worker = std::make_unique<LayoutWorker>(g, layout);
    worker->start();
  }

  std::mt19937_64 rng(sc.seed ^ 0x5eedULL);
  std::uniform_int_distribution<NodeIndex> any_node(0, static_cast<NodeIndex>(g.node_count() - 1));
  auto world_of = [&](NodeIndex n) { return nav.graph_transform(bounds).to_world(positions[n]); };

  const std::uint32_t total = sc.warmup_frames + sc.frames;
  const std::uint32_t flight_every =
      std::max<std::uint32_t>(1, 600 / std::max<std::uint32_t>(1, sc.flights_per_600));
  NodeIndex look_at = any_node(rng);

  if (sc.kind == ScenarioKind::DetailNavigation) {
    const NodeIndex entry = any_node(rng);
    select_node(nav, entry, world_of(entry), scene.radii()[entry]);
    select_node(nav, entry, world_of(entry), scene.radii()[entry]);
    nav = teleport_to_node(nav, world_of(entry), scene.radii()[entry]);
  }

  TimingReport rep;
  rep.scenario = scenario_name(sc.kind);
  rep.n = g.node_count();
  rep.m = g.edge_count();
  rep.samples_ms.reserve(sc.frames);

  for (std::uint32_t f = 0; f < total; ++f) {
    const auto t0 = clock::now();

    if (worker) {
      auto snap = worker->snapshot();
      if (snap->tick_count != seen_tick) {
        positions = snap->positions;
        seen_tick = snap->tick_count;
        index = PickIndex(g, positions, scene.radii(), scene.girths());
        ++rep.layout_ticks;
      }
    } else if (lp.keep_ticking) {
      tick(layout, g);
      positions = layout.positions;
      index = PickIndex(g, positions, scene.radii(), scene.girths());
      ++rep.layout_ticks;
    }

    Ray ray;
    switch (sc.kind) {
      case ScenarioKind::OverviewStatic:
      case ScenarioKind::OverviewRotation: {
        if (sc.kind == ScenarioKind::OverviewRotation) {
          const Vec2 dpad(sc.rotation_deg_per_s / nav.params.rotation_speed_deg, 0.0);
          nav = apply_overview_rotation(nav, dpad, sc.frame_dt, bounds);
        }
        if (f % 30 == 0) look_at = any_node(rng);
        ray = Ray::through(nav.head_position(), world_of(look_at));
        break;
      }
      case ScenarioKind::DetailNavigation: {
        if (f % flight_every == 0) {
          look_at = any_node(rng);
          nav = start_auto_flight(nav, world_of(look_at), scene.radii()[look_at]);
        }
        nav = update_auto_flight(nav, sc.frame_dt);
        const Vec3 head = nav.head_position();
        const Vec3 target = world_of(look_at);
        ray = (target - head).norm() > 0.0 ? Ray::through(head, target) : Ray(head, view_vector(nav.active.orientation));
        break;
      }
    }

    const GraphTransform xf = nav.graph_transform(bounds);
    const Ray local(xf.to_local(ray.origin), xf.direction_to_local(ray.direction).normalized());
    const auto hit = index.pick(local);
    const HighlightState hs = hover_update(g, hit);
    const ElementOpacities op = cursor.transition ? element_opacities(cursor, table) : no_fade;
    const InstanceBuffers buffers = scene.synthesize(positions, op, hs, nav);

    const auto t1 = clock::now();
    if (f >= sc.warmup_frames) {
      ++rep.pick_queries;
      rep.samples_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    if (buffers.batch_count() > 3) throw std::logic_error("more than three instanced batches");
  }
  if (worker) worker->stop();
  return rep;
}

// ---------------------------------------------------------------------------
// Reports

enum class ReportFormat { Csv, Json };

inline ReportFormat parse_report_format(const std::string& s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json") return ReportFormat::Json;
  throw std::invalid_argument("unknown report format '" + s + "' (csv|json)");
}

namespace detail {
inline std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace detail

inline nlohmann::json report_json(const TimingReport& r) {
  nlohmann::json j;
  j["scenario"] = r.scenario;
  j["n"] = r.n;
  j["m"] = r.m;
  j["frames"] = r.samples_ms.size();
  j["pick_queries"] = r.pick_queries;
  auto& s = j["samples"] = nlohmann::json::array();
  for (std::size_t i = 0; i < r.samples_ms.size(); ++i) s.push_back({{"frame", i}, {"ms", r.samples_ms[i]}});
  j["aggregate"] = {{"mean_ms", r.mean()}, {"p95_ms", r.p95()}, {"fps_equivalent", r.fps_equivalent()}};
  return j;
}

/// CSV: header `scenario,n,m,frame,ms`, one row per frame, then `#`-prefixed
/// aggregate footer lines. JSON mirrors the same data.
inline std::string report(const TimingReport& r, ReportFormat fmt) {
  if (r.samples_ms.empty()) throw std::invalid_argument("report: no samples");
  if (fmt == ReportFormat::Json) return report_json(r).dump(2) + "\n";
  std::ostringstream out;
  out << "scenario,n,m,frame,ms\n";
  for (std::size_t i = 0; i < r.samples_ms.size(); ++i)
    out << r.scenario << ',' << r.n << ',' << r.m << ',' << i << ',' << detail::exact(r.samples_ms[i]) << '\n';
  out << "# mean_ms," << detail::exact(r.mean()) << '\n';
  out << "# p95_ms," << detail::exact(r.p95()) << '\n';
  out << "# fps_equivalent," << detail::exact(r.fps_equivalent()) << '\n';
  return out.str();
}

/// Reads a CSV report back; throws std::invalid_argument on malformed rows.
inline TimingReport parse_csv_report(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "scenario,n,m,frame,ms")
    throw std::invalid_argument("csv report: bad header");
  TimingReport r;
  std::size_t expected_frame = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cols.push_back(c);
    if (cols.size() != 5) throw std::invalid_argument("csv report: expected 5 columns: " + line);
    try {
      r.scenario = cols[0];
      r.n = std::stoull(cols[1]);
      r.m = std::stoull(cols[2]);
      if (std::stoull(cols[3]) != expected_frame++) throw std::invalid_argument("frame out of sequence");
      r.samples_ms.push_back(std::stod(cols[4]));
    } catch (const std::logic_error& e) {
      throw std::invalid_argument(std::string("csv report: ") + e.what() + ": " + line);
    }
  }
  if (r.samples_ms.empty()) throw std::invalid_argument("csv report: no samples");
  return r;
}

/// Structural check of a JSON report against docs/report.schema.json.
/// Returns the list of violations (empty when valid).
inline std::vector<std::string> report_json_violations(const nlohmann::json& j) {
  std::vector<std::string> errs;
  auto need = [&](const nlohmann::json& o, const char* key, auto pred, const char* what) {
    if (!o.is_object() || !o.contains(key)) errs.push_back(std::string("missing ") + key);
    else if (!pred(o[key])) errs.push_back(std::string(key) + " must be " + what);
  };
  auto is_uint = [](const nlohmann::json& v) { return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0); };
  auto is_nonneg = [](const nlohmann::json& v) { return v.is_number() && v.get<double>() >= 0.0; };
  auto is_pos = [](const nlohmann::json& v) { return v.is_number() && v.get<double>() > 0.0; };
  if (!j.is_object()) return {"report must be an object"};
  need(j, "scenario", [](const nlohmann::json& v) {
    return v.is_string() && (v == "overview" || v == "rotation" || v == "detail");
  }, "one of overview|rotation|detail");
  need(j, "n", is_uint, "a nonnegative integer");
  need(j, "m", is_uint, "a nonnegative integer");
  need(j, "frames", is_uint, "a nonnegative integer");
  need(j, "pick_queries", is_uint, "a nonnegative integer");
  need(j, "samples", [](const nlohmann::json& v) { return v.is_array() && !v.empty(); }, "a nonempty array");
  need(j, "aggregate", [](const nlohmann::json& v) { return v.is_object(); }, "an object");
  if (!errs.empty()) return errs;
  for (std::size_t i = 0; i < j["samples"].size(); ++i) {
    const auto& s = j["samples"][i];
    need(s, "frame", is_uint, "a nonnegative integer");
    need(s, "ms", is_nonneg, "a nonnegative number");
    if (s.is_object() && s.contains("frame") && s["frame"] != i) errs.push_back("samples out of order");
  }
  if (j["frames"] != j["samples"].size()) errs.push_back("frames does not match sample count");
  need(j["aggregate"], "mean_ms", is_nonneg, "a nonnegative number");
  need(j["aggregate"], "p95_ms", is_nonneg, "a nonnegative number");
  need(j["aggregate"], "fps_equivalent", is_pos, "a positive number");
  return errs;
}

}  // namespace netvr
