#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mural2scene/emitter.hpp"
#include "mural2scene/pipeline.hpp"

using namespace mural2scene;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name) {
  const fs::path p = fs::temp_directory_path() / ("mural2scene_unit_" + name);
  fs::remove_all(p);
  return p;
}

Json gltf_of(const SceneIR &ir) {
  const auto files = render_package(ir);
  const auto &bytes = files.at("scene.gltf");
  return Json::parse(bytes.begin(), bytes.end());
}

const CompiledScene &foguang() {
  static const CompiledScene scene = [] {
    const auto lm = load_manifest(fs::path(FIXTURE_DIR) / "foguang.scene");
    CompileOptions opts;
    opts.downsample = 2;
    return compile_scene(lm.manifest, FIXTURE_DIR, opts);
  }();
  return scene;
}

SceneManifest one_billboard(std::map<std::string, Clip> &clips, std::map<std::string, Mesh> &meshes) {
  SceneManifest m;
  m.scene_id = "one";
  SliceSpec s;
  s.slice_id = "npc";
  s.source_id = "src";
  s.mask = {{0, 0}, {8, 0}, {8, 16}, {0, 16}};
  s.placement.position = {1, 0, -2};
  m.slices.push_back(s);
  Clip c;
  c.slice_id = "npc";
  c.pixels = Image(8, 16, {200, 10, 10, 255});
  c.physical_size_m = {0.5, 1.0};
  meshes["npc"] = make_billboard_quad(c, s.placement, AxisLock::Cylindrical);
  clips["npc"] = std::move(c);
  return m;
}

}  // namespace

TEST_CASE("empty manifest gives only the root") {
  SceneManifest m;
  m.scene_id = "empty";
  const SceneIR ir = lower_manifest(m, {}, {}, std::nullopt);
  CHECK(ir.nodes.empty());
  const Json g = gltf_of(ir);
  CHECK(g["asset"]["version"] == "2.0");
  CHECK(g["scenes"].size() == 1);
  CHECK(g["nodes"].size() == 1);
  CHECK_FALSE(g.contains("meshes"));

  const fs::path dir = scratch("empty");
  const ScenePackage pkg = emit_gltf(ir, dir);
  CHECK(validate_gltf_structure(pkg.gltf).empty());
  fs::remove_all(dir);
}

TEST_CASE("one billboard") {
  std::map<std::string, Clip> clips;
  std::map<std::string, Mesh> meshes;
  const SceneManifest m = one_billboard(clips, meshes);
  const SceneIR ir = lower_manifest(m, clips, meshes, std::nullopt);
  CHECK(ir.vertex_count() == 4);
  CHECK(ir.triangle_count() == 2);
  const Json g = gltf_of(ir);
  REQUIRE(g["meshes"].size() == 1);
  const auto &prim = g["meshes"][0]["primitives"][0];
  CHECK(g["accessors"][prim["attributes"]["POSITION"].get<int>()]["count"] == 4);
  CHECK(g["accessors"][prim["indices"].get<int>()]["count"] == 6);
  CHECK(g["materials"][prim["material"].get<int>()]["alphaMode"] == "BLEND");
  CHECK(g["nodes"].size() == 2);
  CHECK(g["nodes"][1]["extras"]["billboard"] == "Cylindrical");

  const fs::path dir = scratch("one");
  const ScenePackage pkg = emit_gltf(ir, dir);
  const auto diags = validate_gltf_structure(pkg.gltf);
  for (const auto &d : diags) MESSAGE(format_diagnostic(d));
  CHECK(diags.empty());

  SUBCASE("truncated buffer") {
    auto bin = read_file(pkg.bin);
    bin.pop_back();
    write_file(pkg.bin, bin);
    CHECK_FALSE(validate_gltf_structure(pkg.gltf).empty());
  }
  SUBCASE("corrupted accessor max") {
    const auto text = read_file(pkg.gltf);
    Json doc = Json::parse(text.begin(), text.end());
    doc["accessors"][prim["attributes"]["POSITION"].get<int>()]["max"][1] = 99.0;
    write_file(pkg.gltf, doc.dump(2));
    CHECK(has_code(validate_gltf_structure(pkg.gltf), "MINMAX_MISMATCH"));
  }
  SUBCASE("index out of range") {
    auto bin = read_file(pkg.bin);
    const Json &acc = g["accessors"][prim["indices"].get<int>()];
    const Json &view = g["bufferViews"][acc["bufferView"].get<int>()];
    const std::size_t at = view.value("byteOffset", 0) + acc.value("byteOffset", 0);
    bin[at] = 0xff;
    bin[at + 1] = 0xff;
    write_file(pkg.bin, bin);
    CHECK_FALSE(validate_gltf_structure(pkg.gltf).empty());
  }
  SUBCASE("missing file") { CHECK_FALSE(validate_gltf_structure(dir / "nope.gltf").empty()); }
  fs::remove_all(dir);
}

TEST_CASE("narrative naming a missing entity") {
  std::map<std::string, Clip> clips;
  std::map<std::string, Mesh> meshes;
  SceneManifest m = one_billboard(clips, meshes);
  narrative::NarrativeGraph g;
  g.nodes = {{"a", narrative::node::Media{1}, {}, {}}, {"b", narrative::node::Media{1}, {}, {}}};
  g.edges = {{"a", "b", narrative::trigger::RayClick{"official"}, {}}};
  g.start_node = "a";
  g.terminal_nodes = {"b"};
  g.guidance.waypoints = {{"a", {{0, 0, 0}}}};
  m.narrative = g;
  try {
    lower_manifest(m, clips, meshes, std::nullopt);
    FAIL("expected UNBOUND_TARGET");
  } catch (const CompileError &e) {
    CHECK(e.code() == "UNBOUND_TARGET");
  }
  m.narrative->edges[0].trigger = narrative::trigger::RayClick{"npc"};
  const SceneIR ir = lower_manifest(m, clips, meshes, std::nullopt);
  const Json j = gltf_of(ir);
  CHECK(j["nodes"][1]["extras"]["narrative_target"] == Json::array({"a"}));
}

TEST_CASE("Foguang package") {
  const CompiledScene &c = foguang();
  const auto lm = load_manifest(fs::path(FIXTURE_DIR) / "foguang.scene");
  CHECK(c.ir.nodes.size() == lm.manifest.slices.size() + lm.manifest.architectures.size());
  CHECK(c.ir.warnings.empty());
  REQUIRE(c.projection_scores.count("east_hall"));
  CHECK(c.projection_scores.at("east_hall") >= 0.85);

  const Json g = gltf_of(c.ir);
  CHECK(g["nodes"].size() == c.ir.nodes.size() + 1);

  // Recount triangles from the emitted accessors.
  std::size_t tris = 0;
  for (const auto &mesh : g["meshes"]) {
    for (const auto &p : mesh["primitives"]) {
      tris += g["accessors"][p["indices"].get<int>()]["count"].get<std::size_t>() / 3;
    }
  }
  std::size_t want = 0;
  for (const auto &[id, mesh] : c.meshes) want += mesh.triangle_count();
  CHECK(tris == want);
  CHECK(tris == c.ir.triangle_count());

  const fs::path dir = scratch("foguang");
  const ScenePackage pkg = emit_gltf(c.ir, dir);
  const auto diags = validate_gltf_structure(pkg.gltf);
  for (const auto &d : diags) MESSAGE(format_diagnostic(d));
  CHECK(diags.empty());
  CHECK(pkg.skybox_faces.size() >= 6);
  REQUIRE(pkg.narrative);
  CHECK(fs::exists(*pkg.narrative));
  CHECK(render_package(c.ir) == render_package(c.ir));
  fs::remove_all(dir);

  const std::string report = format_report(c.ir);
  CHECK(report.find("triangles") != std::string::npos);
}
