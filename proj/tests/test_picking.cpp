#include "oracles.hpp"

#include <netvr/bench.hpp>
#include <netvr/layout.hpp>
#include <netvr/picking.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace netvr;

namespace {

struct Scene {
  DynamicGraph graph;
  std::vector<Vec3> positions;
  std::vector<double> radii, girths;
};

Scene er_scene(std::uint32_t n, std::uint32_t m, std::uint64_t seed) {
  Scene s{generate_er(n, m, seed), {}, {}, {}};
  auto st = init_layout(s.graph, seed);
  s.positions = run_to_convergence(st, s.graph);
  s.radii = node_radii(s.graph);
  s.girths = edge_girths(s.graph);
  return s;
}

Ray random_ray(std::mt19937_64& rng, double spread) {
  std::uniform_real_distribution<double> U(-spread, spread);
  return Ray(Vec3(U(rng), U(rng), U(rng)), oracle::random_unit(rng));
}

void expect_same(const std::optional<PickHit>& a, const std::optional<PickHit>& b) {
  ASSERT_EQ(a.has_value(), b.has_value());
  if (!a) return;
  EXPECT_EQ(a->entity, b->entity);
  EXPECT_NEAR(a->distance, b->distance, 1e-6);
}

DynamicGraph triangle() {
  return load_graph(R"({"nodes":[{"id":"a"},{"id":"b"},{"id":"c"}],
    "links":[{"source":"a","target":"b"},{"source":"b","target":"c"},{"source":"c","target":"a"}]})");
}

}  // namespace

TEST(Ray, RequiresUnitDirection) {
  EXPECT_THROW(Ray(Vec3::Zero(), Vec3(0, 0, 2)), std::invalid_argument);
  EXPECT_THROW(Ray(Vec3::Zero(), Vec3(std::nan(""), 0, 0)), std::invalid_argument);
  EXPECT_NO_THROW(Ray(Vec3::Zero(), Vec3(0, 1, 0)));
}

TEST(Sphere, DistanceNine) {
  EXPECT_DOUBLE_EQ(*intersect_sphere(Ray(Vec3(0, 0, -10), Vec3(0, 0, 1)), Vec3::Zero(), 1.0), 9.0);
  std::vector<PickPrimitive> prims(1);
  prims[0].entity = Entity::node(0);
  prims[0].radius = 1.0;
  prims[0].bounds.lo = Vec3::Constant(-1), prims[0].bounds.hi = Vec3::Constant(1);
  const PickIndex index(prims);
  const auto hit = index.pick(Ray(Vec3(0, 0, -10), Vec3(0, 0, 1)));
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->entity, Entity::node(0));
  EXPECT_DOUBLE_EQ(hit->distance, 9.0);
  EXPECT_FALSE(index.pick(Ray(Vec3(0, 0, -10), Vec3(0, 0, -1))));
}

TEST(Sphere, OriginInsideIsAMiss) {
  EXPECT_FALSE(intersect_sphere(Ray(Vec3(0.2, 0, 0), Vec3(0, 0, 1)), Vec3::Zero(), 1.0));
}

TEST(Capsule, AnalyticMatchesMarchingOracle) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> U(-3, 3), R(0.05, 1.0);
  int hits = 0;
  for (int k = 0; k < 3000; ++k) {
    const Vec3 a(U(rng), U(rng), U(rng));
    const Vec3 b = k % 10 == 0 ? a : Vec3(U(rng), U(rng), U(rng));  // some degenerate capsules
    const double r = R(rng);
    const Vec3 o = 3.0 * oracle::random_unit(rng) * 3.0;
    // aim roughly at the capsule so a good share of rays hit
    const Vec3 aim = 0.5 * (a + b) + Vec3(U(rng), U(rng), U(rng)) * 0.4;
    const Ray ray = Ray::through(o, aim);
    const auto got = intersect_capsule(ray, a, b, r);
    const auto want = oracle::march_capsule(ray.origin, ray.direction, a, b, r, 40.0);
    if (want) {
      ASSERT_TRUE(got) << "analytic missed a marched hit, case " << k;
      EXPECT_NEAR(*got, *want, 1e-6) << "case " << k;
      ++hits;
    } else if (got) {
      // a chord thinner than the march step: the hit must be a grazing one
      EXPECT_NEAR(point_segment_distance(ray.at(*got), a, b), r, 1e-9) << "case " << k;
    }
  }
  EXPECT_GT(hits, 1000);
}

TEST(PickIndex, EmptyMissesEverything) {
  const PickIndex index;
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10; ++i) EXPECT_FALSE(index.pick(random_ray(rng, 10)));
}

TEST(PickIndex, SingleNodeEqualsSphereTest) {
  const auto g = load_graph(R"({"nodes":[{"id":"n"}]})");
  const std::vector<Vec3> pos{Vec3(1, 2, 3)};
  const std::vector<double> radii{1.5}, girths{};
  const PickIndex index(g, pos, radii, girths);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 500; ++i) {
    const Ray ray = Ray::through(Vec3(0, 0, -8) + 4 * oracle::random_unit(rng), Vec3(1, 2, 3) + oracle::random_unit(rng));
    const auto hit = index.pick(ray);
    const auto t = intersect_sphere(ray, pos[0], 1.5);
    ASSERT_EQ(hit.has_value(), t.has_value());
    if (t) EXPECT_EQ(hit->distance, *t);
  }
}

TEST(PickIndex, AgreesWithLinearScanOnErScene) {
  const auto s = er_scene(500, 1500, 7);
  const PickIndex index(s.graph, s.positions, s.radii, s.girths);
  const double spread = bounding_sphere(s.positions, s.radii).radius;
  std::mt19937_64 rng(1000);
  std::uniform_int_distribution<NodeIndex> any(0, 499);
  int hits = 0;
  for (int i = 0; i < 1000; ++i) {
    // alternate free rays with rays aimed near a node so both paths get exercised
    const Ray ray = i % 2 ? random_ray(rng, spread)
                          : Ray::through(2 * spread * oracle::random_unit(rng), s.positions[any(rng)] + oracle::random_unit(rng));
    const auto want = pick_linear(index.primitives(), ray);
    expect_same(index.pick(ray), want);
    hits += want.has_value();
  }
  EXPECT_GT(hits, 400);
}

TEST(PickIndex, RespectsVisibilityFilter) {
  const auto s = er_scene(300, 900, 8);
  const PickIndex index(s.graph, s.positions, s.radii, s.girths);
  std::mt19937_64 rng(3);
  std::vector<std::uint8_t> nodes(300), edges(900);
  for (auto& v : nodes) v = rng() % 2;
  for (auto& v : edges) v = rng() % 2;
  const PickFilter filter{nodes, edges};
  const double spread = bounding_sphere(s.positions, s.radii).radius;
  for (int i = 0; i < 500; ++i) {
    const Ray ray = random_ray(rng, spread);
    const auto hit = index.pick(ray, filter);
    expect_same(hit, pick_linear(index.primitives(), ray, filter));
    if (hit) EXPECT_TRUE(filter.allows(hit->entity));
  }
}

TEST(PickIndex, NodeBeatsEdgeAtEqualDistance) {
  std::vector<PickPrimitive> prims(2);
  prims[0].entity = Entity::edge(0);
  prims[0].a = Vec3(-5, 0, 0), prims[0].b = Vec3(5, 0, 0), prims[0].radius = 1.0;
  prims[1].entity = Entity::node(3);
  prims[1].radius = 1.0;
  for (auto& p : prims) {
    p.bounds.lo = p.a.cwiseMin(p.b) - Vec3::Constant(1.01);
    p.bounds.hi = p.a.cwiseMax(p.b) + Vec3::Constant(1.01);
  }
  const Ray ray(Vec3(0, 0, -10), Vec3(0, 0, 1));
  const auto hit = PickIndex(prims).pick(ray);
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->entity, Entity::node(3));
  EXPECT_DOUBLE_EQ(hit->distance, 9.0);
  expect_same(hit, pick_linear(prims, ray));
}

TEST(PickIndex, StableUnderTinyOriginPerturbation) {
  const auto s = er_scene(300, 900, 9);
  const PickIndex index(s.graph, s.positions, s.radii, s.girths);
  std::mt19937_64 rng(4);
  const double spread = bounding_sphere(s.positions, s.radii).radius;
  for (int i = 0; i < 500; ++i) {
    const Ray ray = random_ray(rng, spread);
    const Ray nudged(ray.origin + 1e-10 * oracle::random_unit(rng), ray.direction);
    const auto a = index.pick(ray), b = index.pick(nudged);
    ASSERT_EQ(a.has_value(), b.has_value());
    if (a) EXPECT_EQ(a->entity, b->entity);
  }
}

TEST(PickPrimitives, EdgeCapsuleSpansSurfacesWithMinimumRadius) {
  const auto g = load_graph(R"({"nodes":[{"id":"a"},{"id":"b"}],"links":[{"source":"a","target":"b"}]})");
  const std::vector<Vec3> pos{Vec3(0, 0, 0), Vec3(10, 0, 0)};
  const std::vector<double> radii{1.0, 2.0}, girths{0.01};
  const auto prims = make_pick_primitives(g, pos, radii, girths);
  ASSERT_EQ(prims.size(), 3u);
  EXPECT_TRUE(prims[2].a.isApprox(Vec3(1, 0, 0)));
  EXPECT_TRUE(prims[2].b.isApprox(Vec3(8, 0, 0)));
  EXPECT_EQ(prims[2].radius, 0.08);
}

TEST(Hover, HubInTriangle) {
  const auto g = triangle();
  const auto hs = hover_update(g, PickHit{Entity::node(0), 1.0});
  EXPECT_EQ(hs.nodes_with(Emphasis::Hovered), (std::vector<NodeIndex>{0}));
  EXPECT_EQ(hs.nodes_with(Emphasis::Highlight), (std::vector<NodeIndex>{1, 2}));
  EXPECT_EQ(hs.edges_with(Emphasis::Highlight), (std::vector<EdgeIndex>{0, 2}));
  EXPECT_EQ(hs.edges_with(Emphasis::Lowlight), (std::vector<EdgeIndex>{1}));
  EXPECT_TRUE(hs.nodes_with(Emphasis::Lowlight).empty());
}

TEST(Hover, NoHitMeansNoEmphasis) {
  const auto g = triangle();
  const auto hs = hover_update(g, std::nullopt);
  EXPECT_FALSE(hs.hovered);
  EXPECT_TRUE(hs.nodes_with(Emphasis::Highlight).empty());
  EXPECT_TRUE(hs.nodes_with(Emphasis::Lowlight).empty());
  EXPECT_TRUE(hs.edges_with(Emphasis::Lowlight).empty());
}

TEST(Hover, EdgeInTenNodeGraph) {
  const auto g = oracle::random_graph(10, 15, 6);
  const EdgeIndex e = 4;
  const auto hs = hover_update(g, PickHit{Entity::edge(e), 2.0});
  auto hi = hs.nodes_with(Emphasis::Highlight);
  std::vector<NodeIndex> want{g.source(e), g.target(e)};
  std::sort(want.begin(), want.end());
  EXPECT_EQ(hi, want);
  EXPECT_EQ(hs.edges_with(Emphasis::Highlight), (std::vector<EdgeIndex>{e}));
  EXPECT_EQ(hs.nodes_with(Emphasis::Lowlight).size(), 8u);
  EXPECT_EQ(hs.edges_with(Emphasis::Lowlight).size(), 14u);
}

TEST(Hover, UnknownEntityThrows) {
  const auto g = triangle();
  EXPECT_THROW(hover_update(g, PickHit{Entity::node(9), 1.0}), GraphError);
  EXPECT_THROW(hover_update(g, PickHit{Entity::edge(3), 1.0}), GraphError);
}

TEST(Hover, PartitionsVisibleElements) {
  const auto g = oracle::random_graph(80, 200, 10, 3, true);
  for (FrameIndex f = 0; f < 3; ++f) {
    const auto p = frame_presence(g, f);
    const Visibility vis{p.nodes, p.edges};
    for (NodeIndex n = 0; n < g.node_count(); n += 7) {
      if (!p.nodes[n]) continue;
      const auto hs = hover_update(g, PickHit{Entity::node(n), 1.0}, vis);
      for (NodeIndex m = 0; m < g.node_count(); ++m)
        EXPECT_EQ(hs.nodes[m] == Emphasis::Normal, p.nodes[m] == 0) << m;
      for (EdgeIndex e = 0; e < g.edge_count(); ++e)
        EXPECT_EQ(hs.edges[e] == Emphasis::Normal, p.edges[e] == 0) << e;
      EXPECT_EQ(hs.nodes_with(Emphasis::Hovered), (std::vector<NodeIndex>{n}));
    }
  }
}

TEST(Hover, OutgoingFilterHighlightsOutEdgesOnly) {
  const auto g = load_graph(R"({"directed":true,"nodes":[{"id":"a"},{"id":"b"},{"id":"c"}],
    "links":[{"source":"a","target":"b"},{"source":"c","target":"a"}]})");
  const auto hs = hover_update(g, PickHit{Entity::node(0), 1.0}, {}, EdgeFilter::Outgoing);
  EXPECT_EQ(hs.edges_with(Emphasis::Highlight), (std::vector<EdgeIndex>{0}));
  EXPECT_EQ(hs.nodes_with(Emphasis::Lowlight), (std::vector<NodeIndex>{2}));
}

TEST(PickMasks, LowlightCanBeExcluded) {
  const auto g = triangle();
  const auto hs = hover_update(g, PickHit{Entity::node(0), 1.0});
  const auto all = pick_masks(g, {}, hs, true);
  const auto some = pick_masks(g, {}, hs, false);
  EXPECT_EQ(all.edges, (std::vector<std::uint8_t>{1, 1, 1}));
  EXPECT_EQ(some.edges, (std::vector<std::uint8_t>{1, 0, 1}));
  EXPECT_EQ(some.nodes, (std::vector<std::uint8_t>{1, 1, 1}));
}
