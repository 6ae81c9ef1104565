// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <netvr/netvr.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace netvr;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& s) {
    if (pass) detail += (detail.empty() ? "" : "; ") + s;
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

std::vector<Vec3> converged(const DynamicGraph& g, std::uint64_t seed) {
  auto s = init_layout(g, seed);
  return run_to_convergence(s, g);
}

DynamicGraph isolated(std::uint32_t n) {
  std::vector<NodeRecord> nodes(n);
  for (std::uint32_t i = 0; i < n; ++i) nodes[i].id = std::to_string(i);
  return DynamicGraph(std::move(nodes), {});
}

// Direct inverse-square sum from the force formula.
std::vector<Vec3> repulsion_reference(const LayoutState& s) {
  const double k = -s.params.repulsion_strength * s.alpha;
  std::vector<Vec3> f(s.positions.size(), Vec3::Zero());
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = 0; j < f.size(); ++j) {
      if (i == j) continue;
      const Vec3 d = s.positions[i] - s.positions[j];
      const double l = d.norm();
      f[i] += k * d / (l < s.params.distance_min ? s.params.distance_min * l : l * l);
    }
  return f;
}

Outcome barnes_hut() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto g = isolated(200);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(-50, 50);
  LayoutState s;
  s.seed = 1;
  for (int i = 0; i < 200; ++i) s.positions.emplace_back(U(rng), U(rng), U(rng));
  s.velocities.assign(200, Vec3::Zero());
  const auto exact = repulsion_reference(s);
  const auto brute = compute_forces_brute(s, g);
  auto rms = [&](const std::vector<Vec3>& f) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < f.size(); ++i) num += (f[i] - exact[i]).squaredNorm(), den += exact[i].squaredNorm();
    return std::sqrt(num / den);
  };
  auto bh = [&](double theta) {
    s.params.theta = theta;
    return compute_forces_bh(s, g, Octree(s.positions, s.params.repulsion_strength));
  };
  const double e_brute = rms(brute), e0 = rms(bh(1e-12)), e5 = rms(bh(0.5)), e9 = rms(bh(0.9));
  o.check(e_brute < 1e-12, fmt("brute vs formula %.2e", e_brute));
  o.check(e0 < 1e-9, fmt("theta->0 error %.2e >= 1e-9", e0));
  o.check(e5 < 0.01, fmt("theta=0.5 error %.4f >= 1%%", e5));
  o.check(e9 < 0.05, fmt("theta=0.9 error %.4f >= 5%%", e9));
  const double t = seconds_since(t0);
  o.check(t < 10.0, fmt("runtime %.1fs", t));
  o.note(fmt("rms theta0=%.1e theta0.5=%.3f%% theta0.9=%.3f%%", e0, 100 * e5, 100 * e9) + fmt(" in %.2fs", t));
  return o;
}

Outcome layout_scaling() {
  Outcome o;
  const std::uint32_t sizes[3] = {500, 1000, 2000};
  std::vector<DynamicGraph> graphs;
  for (auto n : sizes) graphs.push_back(generate_er(n, 3ull * n, 1));
  // mean tick over a full layout run; sizes interleaved so machine noise hits all alike
  std::vector<double> per_tick[3];
  for (int r = 0; r < 3; ++r)
    for (int k = 0; k < 3; ++k) {
      auto s = init_layout(graphs[k], 1 + r);
      const auto t0 = Clock::now();
      run_to_convergence(s, graphs[k]);
      per_tick[k].push_back(1000.0 * seconds_since(t0) / static_cast<double>(s.tick_count));
    }
  const double t500 = median(per_tick[0]), t1000 = median(per_tick[1]), t2000 = median(per_tick[2]);
  o.check(t500 < t1000 && t1000 < t2000, fmt("not increasing: %.3f %.3f %.3f ms", t500, t1000, t2000));
  o.check(t2000 / t1000 < 3.0, fmt("t(2000)/t(1000) = %.2f", t2000 / t1000));
  o.note(fmt("mean tick ms 500=%.3f 1000=%.3f 2000=%.3f", t500, t1000, t2000) + fmt(" ratio=%.2f", t2000 / t1000));
  return o;
}

Outcome picking() {
  Outcome o;
  const auto g = generate_er(500, 1500, 3);
  const auto pos = converged(g, 3);
  const auto radii = node_radii(g), girths = edge_girths(g);
  const PickIndex index(g, pos, radii, girths);
  const double spread = bounding_sphere(pos, radii).radius;
  std::mt19937_64 rng(1000);
  std::uniform_real_distribution<double> U(-spread, spread);
  std::normal_distribution<double> N(0, 1);
  std::uniform_int_distribution<NodeIndex> any(0, static_cast<NodeIndex>(g.node_count() - 1));
  int mismatches = 0, hits = 0;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    // even rays: free direction; odd rays: aimed at a jittered node position
    const Vec3 origin(U(rng), U(rng), U(rng));
    Vec3 dir(N(rng), N(rng), N(rng));
    if (i % 2) dir = pos[any(rng)] + 2.0 * dir - origin;
    const Ray ray(origin, dir.normalized());
    const auto a = index.pick(ray);
    const auto b = pick_linear(index.primitives(), ray);
    if (a.has_value() != b.has_value() || (a && !(a->entity == b->entity))) {
      ++mismatches;
      continue;
    }
    if (a) {
      ++hits;
      worst = std::max(worst, std::abs(a->distance - b->distance));
    }
  }
  o.check(mismatches == 0, fmt("%.0f entity mismatches", mismatches));
  o.check(worst <= 1e-6, fmt("distance deviation %.2e", worst));
  o.note(fmt("1000 rays, %.0f hits, max |dt| %.1e", hits, worst));
  return o;
}

Outcome navigation() {
  Outcome o;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> N(0, 1);
  auto rq = [&] { return Quat(N(rng), N(rng), N(rng), N(rng)).normalized(); };
  const Sphere bounds{Vec3(2, 1, -3), 10.0};

  bool involution = true, orientation = true;
  for (int i = 0; i < 200; ++i) {
    auto nav = make_navigation(bounds, Vec3(N(rng), 0.2, N(rng)));
    nav.passive = {Vec3(N(rng), N(rng), N(rng)), rq()};
    const auto before = nav;
    swap_rigs(nav);
    swap_rigs(nav);
    involution &= bit_equal(nav.active, before.active) && bit_equal(nav.passive, before.passive);

    nav.active.orientation = rq();
    const Quat q = nav.active.orientation;
    const Vec3 node(N(rng), N(rng), N(rng));
    select_node(nav, 1, node, 0.7);
    select_node(nav, 1, node, 0.7);
    const auto d = teleport_to_node(nav, node, 0.7);
    orientation &= bit_equal(d.active.orientation, q);
  }
  o.check(involution, "rig swap is not an exact involution");
  o.check(orientation, "teleport changed the orientation");

  o.check(ease_out_cubic(0.0) == 0.0 && ease_out_cubic(1.0) == 1.0 && ease_out_cubic(0.5) == 0.875,
          "ease-out endpoints/midpoint");
  auto nav = make_navigation(bounds);
  select_node(nav, 0, Vec3::Zero(), 1.0);
  select_node(nav, 0, Vec3::Zero(), 1.0);
  nav = teleport_to_node(nav, Vec3::Zero(), 1.0);
  nav = start_auto_flight(nav, Vec3(40, 3, -25), 2.0);
  const Vec3 start = nav.flight->start, end = nav.flight->target;
  o.check(nav.active.position == start, "flight does not start at the current position");
  while (nav.flight) nav = update_auto_flight(nav, 1.0 / 90);
  o.check(nav.active.position == end, "flight does not land on the adjusted target");
  o.check(std::abs((Vec3(40, 3, -25) - nav.head_position()).norm() - 3.0) < 1e-9, "standoff distance");

  const double d = overview_distance(10.0);
  o.check(std::abs(d - 20.78) < 0.005, fmt("overview distance %.4f", d));
  o.note(fmt("d(r=10)=%.4f", d));
  return o;
}

Outcome temporal() {
  Outcome o;
  const auto g = load_graph_file(NETVR_TEST_DATA "/comorbidity_f4.json");
  const auto pos = converged(g, 1);
  const SceneSynthesizer scene(g);
  const auto table = time_frame_table(g);
  const auto nav = make_navigation(bounding_sphere(pos, scene.radii()));
  const auto ref = to_le_bytes(scene.synthesize(pos, element_opacities(make_cursor(4), table), {}, nav).node_positions);
  int states = 0;
  bool identical = true;
  for (std::uint32_t from = 0; from < 4; ++from)
    for (std::uint32_t to = 0; to < 4; ++to)
      for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        auto c = make_cursor(4);
        c.current = from;
        if (to != from) {
          c = begin_transition(c, to);
          c.transition->progress = p;
        }
        identical &= to_le_bytes(scene.synthesize(pos, element_opacities(c, table), {}, nav).node_positions) == ref;
        ++states;
      }
  o.check(identical, "position buffers differ between cursor states");

  bool opacity_ok = true;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      auto present = [&](std::uint32_t s) { return s == 0 ? a == 1 : b == 1; };
      auto c = begin_transition(make_cursor(2), 1);
      for (int k = 0; k <= 20; ++k) {
        c.transition->progress = k / 20.0;
        const double want = (1 - k / 20.0) * a + (k / 20.0) * b;
        opacity_ok &= std::abs(element_opacity(c, present) - want) < 1e-15;
      }
      c.transition->progress = 0.0;
      opacity_ok &= element_opacity(c, present) == a;
      opacity_ok &= element_opacity(advance_transition(c, c.duration), present) == b;
    }
  o.check(opacity_ok, "opacity endpoint/linearity");
  o.note(fmt("%.0f cursor states byte-identical", states));
  return o;
}

Outcome er_generator() {
  Outcome o;
  const auto g = generate_er(500, 1500, 1);
  o.check(g.edge_count() == 1500, fmt("edge count %.0f", static_cast<double>(g.edge_count())));
  o.check(serialize(generate_er(500, 1500, 9)) == serialize(generate_er(500, 1500, 9)), "seed determinism");
  bool simple = true, mean_ok = true;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto h = generate_er(500, 1500, seed);
    std::set<std::pair<NodeIndex, NodeIndex>> seen;
    std::size_t degree_sum = 0;
    for (EdgeIndex e = 0; e < h.edge_count(); ++e) {
      simple &= h.source(e) != h.target(e);
      simple &= seen.insert(std::minmax(h.source(e), h.target(e))).second;
    }
    for (NodeIndex n = 0; n < h.node_count(); ++n) degree_sum += h.degree(n);
    mean_ok &= static_cast<double>(degree_sum) / 500.0 == 6.0;
  }
  o.check(simple, "self-loop or duplicate edge");
  o.check(mean_ok, "mean degree differs from 2m/n");
  o.note("n=500 m=1500, 20 seeds simple, mean degree 6");
  return o;
}

Outcome benchmark_ordering() {
  Outcome o;
  const auto g = generate_er(2000, 6000, 1);
  const ScenarioKind kinds[3] = {ScenarioKind::OverviewStatic, ScenarioKind::OverviewRotation,
                                 ScenarioKind::DetailNavigation};
  std::vector<double> means[3];
  for (int rep = 0; rep < 5; ++rep)
    for (int k = 0; k < 3; ++k) {
      Scenario sc;
      sc.kind = kinds[k];
      sc.seed = 1;
      means[k].push_back(run_scenario(g, sc).mean());
    }
  const double stat = median(means[0]), rot = median(means[1]), det = median(means[2]);
  o.check(rot >= stat, fmt("rotation %.4f ms < overview %.4f ms", rot, stat));
  o.check(det <= rot, fmt("detail %.4f ms > rotation %.4f ms", det, rot));

  int worst_batches = 0;
  for (std::uint32_t n : {10u, 500u, 2000u}) {
    const auto h = generate_er(n, 3ull * n, 2);
    const auto p = converged(h, 2);
    auto nav = make_navigation(bounding_sphere(p, node_radii(h)));
    nav.graph_rotation = axis_angle(Vec3::UnitY(), 0.4);
    worst_batches = std::max(worst_batches, synthesize(h, p, {}, {}, nav).batch_count());
  }
  o.check(worst_batches <= 3, fmt("%.0f batches", worst_batches));
  o.note(fmt("median mean ms overview=%.4f rotation=%.4f detail=%.4f", stat, rot, det) + "; batches <= 3");
  return o;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome headless_cli() {
  Outcome o;
  const std::string base = std::string(NETVR_CLI) + " bench --nodes 2000 --degree 3 --scenario rotation --frames 600";
  double slowest = 0.0;
  for (const char* format : {"csv", "json"}) {
    const std::string out = std::string("acceptance_report.") + format;
    const auto t0 = Clock::now();
    const int rc = std::system((base + " --format " + format + " --out " + out + " 2>/dev/null").c_str());
    const double t = seconds_since(t0);
    slowest = std::max(slowest, t);
    o.check(rc == 0, std::string(format) + " run failed");
    o.check(t < 120.0, fmt("run took %.1fs", t));
    if (rc != 0) continue;
    const std::string text = slurp(out);
    try {
      if (std::string(format) == "csv") {
        const auto r = parse_csv_report(text);
        o.check(r.samples_ms.size() == 600 && r.n == 2000 && r.m == 6000 && r.scenario == "rotation",
                "csv content");
      } else {
        const auto j = nlohmann::json::parse(text);
        const auto errs = report_json_violations(j);
        o.check(errs.empty(), "json schema: " + (errs.empty() ? std::string() : errs.front()));
        o.check(j["frames"] == 600, "json frame count");
        const std::string py = "python3 -c \"import jsonschema\" >/dev/null 2>&1";
        if (std::system(py.c_str()) == 0) {
          const std::string cmd = "python3 -c \"import json,sys,jsonschema; jsonschema.validate(json.load(open('" + out +
                                  "')), json.load(open('" NETVR_REPORT_SCHEMA "')))\"";
          o.check(std::system(cmd.c_str()) == 0, "jsonschema validation");
          o.note("jsonschema ok");
        }
      }
    } catch (const std::exception& e) {
      o.check(false, std::string(format) + ": " + e.what());
    }
  }
  o.note(fmt("slowest run %.2fs", slowest));
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "Barnes-Hut force accuracy", barnes_hut},
      {2, "layout tick scaling", layout_scaling},
      {3, "BVH pick equals linear scan", picking},
      {4, "navigation invariants", navigation},
      {5, "temporal invariants", temporal},
      {6, "G(n,m) generator", er_generator},
      {7, "scenario cost ordering", benchmark_ordering},
      {8, "headless bench CLI", headless_cli},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("criterion %d %s: %s (%s)\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
