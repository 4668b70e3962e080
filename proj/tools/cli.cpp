// cityzoom command line: ingest, gen, layout, snapshot, serve.

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cityzoom/error.hpp"
#include "cityzoom/ingest.hpp"
#include "cityzoom/pipeline.hpp"
#include "cityzoom/serialization.hpp"
#include "cityzoom/server/net.hpp"

namespace {

using namespace cityzoom;

std::string read_input(const std::string& path) {
  if (path == "-") {
    return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << content;
  if (!out) throw Error("failed writing " + path);
}

CameraPose parse_pose(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("pose component is not a number: '" + item + "'");
    }
  }
  if (v.size() != 6) throw ValidationError("pose needs six numbers x,y,z,tx,ty,tz");
  CameraPose pose{{v[0], v[1], v[2]}, {v[3], v[4], v[5]}};
  validate(pose);
  return pose;
}

/// Accepts a structure document or a layout document carrying its structure.
LandscapeStructure structure_from_document(const std::string& text) {
  const Json j = Json::parse(text, nullptr, false);
  if (j.is_object() && j.contains("structure")) return parse_structure(j["structure"].dump());
  return parse_structure(text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Software city engine with semantic zoom and a collaborative mini-map"};
  app.require_subcommand(1);

  std::string input;
  std::string output = "-";

  auto* ingest = app.add_subcommand("ingest", "Reconstruct a structure from span JSON Lines");
  std::string metrics_path;
  ingest->add_option("spans", input, "Span file, - for stdin")->required();
  ingest->add_option("-o,--output", output, "Structure file, - for stdout");
  ingest->add_option("--metrics", metrics_path, "Structure file supplying LoC and instance counts");

  auto* gen = app.add_subcommand("gen", "Generate a synthetic structure");
  std::uint64_t seed = 1;
  SyntheticParams params;
  gen->add_option("--seed", seed, "Random seed");
  gen->add_option("--apps", params.apps, "Applications");
  gen->add_option("--packages", params.packages_per_app, "Root packages per application");
  gen->add_option("--depth", params.depth, "Package nesting depth");
  gen->add_option("--classes", params.classes_per_package, "Classes per package");
  gen->add_option("--methods", params.methods_per_class, "Methods per class");
  gen->add_option("--link-density", params.link_density, "Fraction of class pairs with a link");
  gen->add_option("-o,--output", output, "Structure file, - for stdout");

  auto* layout = app.add_subcommand("layout", "Compute the city layout of a structure");
  std::string layout_config_path;
  layout->add_option("structure", input, "Structure file, - for stdin")->required();
  layout->footer("The layout document also embeds its structure, so it can feed snapshot.");
  layout->add_option("--layout-config", layout_config_path, "Layout config JSON");
  layout->add_option("-o,--output", output, "Layout file, - for stdout");

  auto* snapshot = app.add_subcommand("snapshot", "Render the top view at a camera pose as SVG");
  std::string pose_text;
  std::string config_path;
  double size_px = 512;
  snapshot->add_option("structure", input, "Structure or layout file, - for stdin")->required();
  snapshot->add_option("--pose", pose_text, "Camera x,y,z,tx,ty,tz")->required();
  snapshot->add_option("--config", config_path, "Settings JSON (zoom and minimap sections)");
  snapshot->add_option("--layout-config", layout_config_path, "Layout config JSON");
  snapshot->add_option("--size", size_px, "Image side in pixels")->check(CLI::PositiveNumber);
  snapshot->add_option("-o,--output", output, "SVG file, - for stdout");

  auto* serve = app.add_subcommand("serve", "Run the HTTP and WebSocket server");
  server::ServerOptions options;
  std::vector<std::string> preload;
  serve->add_option("--port", options.port, "TCP port, 0 for any free port");
  serve->add_option("--address", options.address, "Bind address");
  serve->add_option("--load", preload, "Structure files to load at start");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      const auto spans = parse_spans(read_input(input));
      if (spans.empty()) throw ValidationError("no spans in " + input);
      AggregationDiagnostics diag;
      LandscapeStructure structure = ingest_spans(spans, &diag);
      if (!metrics_path.empty()) merge_metrics(structure, parse_structure(read_input(metrics_path)));
      std::cerr << "applications: " << structure.applications.size()
                << ", links: " << structure.communications.size()
                << ", unknown parents: " << diag.unknown_parents << "\n";
      write_output(output, dump_document(Json(structure)));
    } else if (*gen) {
      write_output(output, dump_document(Json(generate_synthetic(seed, params))));
    } else if (*layout) {
      LayoutConfig cfg;
      if (!layout_config_path.empty()) Json::parse(read_input(layout_config_path)).get_to(cfg);
      cfg.validate();
      const LandscapeStructure structure = structure_from_document(read_input(input));
      Json doc = compute_layout(structure, cfg);
      doc["structure"] = structure;
      write_output(output, dump_document(doc));
    } else if (*snapshot) {
      LayoutConfig cfg;
      if (!layout_config_path.empty()) Json::parse(read_input(layout_config_path)).get_to(cfg);
      const Settings settings = config_path.empty() ? Settings{} : parse_settings(read_input(config_path));
      const PreparedLandscape landscape(structure_from_document(read_input(input)), settings, cfg);
      write_output(output, snapshot_svg(landscape, parse_pose(pose_text), size_px));
    } else if (*serve) {
      server::LandscapeStore store;
      for (const auto& path : preload) {
        std::cout << path << " -> " << store.add(parse_structure(read_input(path))) << "\n";
      }
      options.handle_signals = true;
      server::Server srv(store, options);
      std::cout << "listening on " << options.address << ":" << srv.port() << std::endl;
      srv.run();
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
