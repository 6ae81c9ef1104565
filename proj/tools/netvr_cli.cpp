// netvr command line: headless benchmark, offline layout, graph validation.

#include <netvr/bench.hpp>
#include <netvr/graph.hpp>
#include <netvr/layout.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

struct BenchArgs {
  std::optional<std::uint32_t> nodes;
  std::optional<std::uint64_t> edges;
  std::optional<double> degree;
  std::uint64_t seed = 1;
  std::string scenario = "overview";
  std::uint32_t frames = 600;
  std::string format = "csv";
  std::string out;
  std::string params;
  std::string graph;
  bool concurrent = false;
};

int run_bench(const BenchArgs& a) {
  netvr::Scenario sc;
  sc.kind = netvr::parse_scenario(a.scenario);
  sc.frames = a.frames;
  sc.seed = a.seed;
  sc.concurrent = a.concurrent;
  if (!a.params.empty()) sc.layout = netvr::load_layout_params_file(a.params);
  const auto fmt = netvr::parse_report_format(a.format);

  std::optional<netvr::DynamicGraph> g;
  if (!a.graph.empty()) {
    g.emplace(netvr::load_graph_file(a.graph));
  } else {
    if (!a.nodes) throw CLI::ValidationError("--nodes", "required unless --graph is given");
    std::uint64_t m = 0;
    if (a.edges) m = *a.edges;
    else if (a.degree) m = static_cast<std::uint64_t>(std::llround(*a.degree * *a.nodes));  // m = D * n
    else throw CLI::ValidationError("--edges/--degree", "one of them is required");
    g.emplace(netvr::generate_er(*a.nodes, m, a.seed));
  }
  const auto rep = netvr::run_scenario(*g, sc);
  write_output(a.out, netvr::report(rep, fmt));
  std::cerr << rep.scenario << " n=" << rep.n << " m=" << rep.m << " frames=" << rep.samples_ms.size()
            << " mean=" << rep.mean() << "ms p95=" << rep.p95() << "ms fps-equivalent=" << rep.fps_equivalent()
            << '\n';
  return 0;
}

int run_layout(const std::string& in, const std::string& out, const std::string& params, std::uint64_t seed) {
  const auto g = netvr::load_graph_file(in);
  netvr::LayoutParams lp;
  if (!params.empty()) lp = netvr::load_layout_params_file(params);
  nlohmann::json doc;
  auto& nodes = doc["nodes"] = nlohmann::json::array();
  if (g.node_count() > 0) {
    auto state = netvr::init_layout(g, seed, lp);
    netvr::run_to_convergence(state, g);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      const auto& p = state.positions[i];
      nodes.push_back({{"id", g.nodes()[i].id}, {"x", p.x()}, {"y", p.y()}, {"z", p.z()}});
    }
    doc["ticks"] = state.tick_count;
    doc["alpha"] = state.alpha;
  } else {
    doc["ticks"] = 0;
    doc["alpha"] = 1.0;
  }
  doc["seed"] = seed;
  write_output(out, doc.dump(2) + "\n");
  return 0;
}

int run_validate(const std::string& in) {
  const auto g = netvr::load_graph_file(in);
  std::cout << "ok: " << g.node_count() << " nodes, " << g.edge_count() << " edges, " << g.frame_count()
            << " frame(s), " << (g.directed() ? "directed" : "undirected") << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"netvr: immersive network exploration core"};
  app.require_subcommand(1);

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Run a headless frame-time benchmark on an Erdos-Renyi or loaded graph");
  auto* opt_nodes = b->add_option("--nodes", bench.nodes, "Node count n");
  auto* opt_edges = b->add_option("--edges", bench.edges, "Edge count m");
  auto* opt_degree = b->add_option("--degree", bench.degree, "Sets m = D * n");
  opt_edges->excludes(opt_degree);
  b->add_option("--graph", bench.graph, "Benchmark a graph JSON file instead of a generated one")
      ->excludes(opt_nodes)
      ->excludes(opt_edges)
      ->excludes(opt_degree);
  b->add_option("--seed", bench.seed, "Random seed")->capture_default_str();
  b->add_option("--scenario", bench.scenario, "overview | rotation | detail")
      ->check(CLI::IsMember({"overview", "rotation", "detail"}))
      ->capture_default_str();
  b->add_option("--frames", bench.frames, "Timed frames (after a 60-frame warmup)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  b->add_option("--format", bench.format, "csv | json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  b->add_option("--out", bench.out, "Output path (default: stdout)");
  b->add_option("--params", bench.params, "Layout parameter file (key = value)")->check(CLI::ExistingFile);
  b->add_flag("--concurrent", bench.concurrent, "Keep the layout ticking on a worker thread");

  std::string layout_in, layout_out, layout_params;
  std::uint64_t layout_seed = 1;
  auto* l = app.add_subcommand("layout", "Compute a converged 3D layout");
  l->add_option("--in", layout_in, "Graph JSON")->required()->check(CLI::ExistingFile);
  l->add_option("--out", layout_out, "Positions JSON (default: stdout)");
  l->add_option("--params", layout_params, "Layout parameter file (key = value)")->check(CLI::ExistingFile);
  l->add_option("--seed", layout_seed, "Random seed")->capture_default_str();

  std::string validate_in;
  auto* v = app.add_subcommand("validate", "Validate a graph JSON document");
  v->add_option("--in", validate_in, "Graph JSON")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (b->parsed()) return run_bench(bench);
    if (l->parsed()) return run_layout(layout_in, layout_out, layout_params, layout_seed);
    if (v->parsed()) return run_validate(validate_in);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
