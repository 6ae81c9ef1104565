// Drives a Session the way a UI shell would: load a graph, lay it out, point
// at a node, enter the detail perspective, scrub time and return.
//
//   scripted_session graph.json

#include <netvr/netvr.hpp>

#include <iostream>

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: scripted_session graph.json\n";
    return 2;
  }
  const auto graph = netvr::load_graph_file(argv[1]);
  if (graph.node_count() == 0) return 0;
  auto state = netvr::init_layout(graph, 1);
  netvr::Session session(graph, netvr::run_to_convergence(state, graph));

  auto report = [&](const char* step) {
    const auto f = session.frame();
    std::cout << step << ": nodes=" << f.buffers.node_count() << " edges=" << f.buffers.edge_count()
              << " arrows=" << f.buffers.arrow_count() << " batches=" << f.buffers.batch_count()
              << " label=" << (f.label ? f.label->text : "-")
              << " perspective=" << (session.navigation().perspective == netvr::Perspective::Overview ? "overview" : "detail")
              << " frame=" << f.time_bar.current << "/" << f.time_bar.frame_count << '\n';
  };
  report("start");

  // Aim the controller at node 0 from the overview head position.
  const auto& nav = session.navigation();
  const netvr::Vec3 head = nav.head_position();
  const netvr::Vec3 target = nav.graph_transform(session.bounding()).to_world(state.positions[0]);
  const netvr::Vec3 local_dir = nav.active.orientation.conjugate() * (target - head).normalized();
  netvr::RigPose controller{netvr::Vec3(0, nav.eye_height, 0), netvr::z_to_direction(-local_dir)};
  session.handle(netvr::ControllerPoseEvent{0.0, controller});
  report("hover");

  session.handle(netvr::TriggerEvent{0.1});
  session.handle(netvr::TriggerEvent{0.2});
  session.advance(1.0 / 90.0);
  report("teleported");

  session.handle(netvr::ModifierEvent{0.3, true});
  session.handle(netvr::DpadEvent{0.3, netvr::Vec2(1.0, 0.0)});
  for (int i = 0; i < 90; ++i) session.advance(1.0 / 90.0);
  session.handle(netvr::ModifierEvent{1.3, false});
  session.handle(netvr::DpadEvent{1.3, netvr::Vec2::Zero()});
  session.advance(1.0);
  report("scrubbed");

  session.handle(netvr::TriggerEvent{1.5, std::nullopt, true});
  report("overview");
  return 0;
}
