#include "mural2scene/emitter.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>
#include <sstream>

#include "mural2scene/narrative.hpp"

namespace mural2scene {

std::size_t SceneIR::triangle_count() const {
  std::size_t n = 0;
  for (const auto &m : meshes) {
    for (const auto &p : m.primitives) n += p.triangles.size();
  }
  return n;
}

std::size_t SceneIR::vertex_count() const {
  std::size_t n = 0;
  for (const auto &m : meshes) {
    for (const auto &p : m.primitives) n += p.vertices.size();
  }
  return n;
}

namespace {

Json effect_json(const DynamicEffect &e) {
  return std::visit(
      [](const auto &fx) -> Json {
        using T = std::decay_t<decltype(fx)>;
        if constexpr (std::is_same_v<T, effect::Flip>) {
          return {{"kind", "Flip"}, {"period_s", fx.period_s}};
        } else if constexpr (std::is_same_v<T, effect::Bob>) {
          return {{"kind", "Bob"}, {"amplitude_m", fx.amplitude_m}, {"period_s", fx.period_s}};
        } else {
          return {{"kind", "Pulse"},
                  {"min_scale", fx.min_scale},
                  {"max_scale", fx.max_scale},
                  {"period_s", fx.period_s}};
        }
      },
      e);
}

/// Entity id -> narrative nodes whose interactions involve it.
std::map<std::string, std::set<std::string>> narrative_targets(const narrative::NarrativeGraph &g) {
  std::map<std::string, std::set<std::string>> out;
  for (const auto &e : g.edges) {
    if (const auto t = narrative::entity_target(e.trigger)) out[*t].insert(e.from_node);
  }
  for (const auto &n : g.nodes) {
    if (const auto *d = std::get_if<narrative::node::Dialogue>(&n.kind)) {
      out[d->speaker_slice_id].insert(n.node_id);
    } else if (const auto *t = std::get_if<narrative::node::Task>(&n.kind)) {
      for (const auto &id : t->target_ids) out[id].insert(n.node_id);
      if (t->tool_id) out[*t->tool_id].insert(n.node_id);
    }
  }
  return out;
}

}  // namespace

SceneIR lower_manifest(const SceneManifest &m, const std::map<std::string, Clip> &clips,
                       const std::map<std::string, Mesh> &meshes, std::optional<Skybox> skybox,
                       const LowerOptions &opts) {
  SceneIR ir;
  ir.scene_id = m.scene_id;
  ir.scene_kind = to_string(m.scene_kind);
  ir.skybox = std::move(skybox);

  std::set<std::string> entities;
  for (const auto &s : m.slices) entities.insert(s.slice_id);
  for (const auto &a : m.architectures) entities.insert(a.arch_id);

  std::map<std::string, std::set<std::string>> targets;
  if (m.narrative) {
    Diagnostics unbound;
    for (const auto &d : narrative::validate_graph(*m.narrative, &entities)) {
      if (d.code == "UNBOUND_TARGET") unbound.push_back(d);
    }
    if (!unbound.empty()) throw CompileError(std::move(unbound));
    ir.narrative_file = narrative::compile_narrative(*m.narrative);
    ir.narrative_counts = {m.narrative->nodes.size(), m.narrative->edges.size(),
                           m.narrative->knowledge_items.size()};
    targets = narrative_targets(*m.narrative);
  }

  struct Entity {
    std::string id;
    Placement placement;
    Json extras;
  };
  std::vector<Entity> ents;
  for (const auto &s : m.slices) {
    Json x = Json::object();
    x["transfer"] = transfer_name(s.transfer);
    if (const auto *a = std::get_if<transfer::ArchitectureRef>(&s.transfer)) {
      x["arch_id"] = a->arch_id;
    }
    if (!s.tags.empty()) x["tags"] = s.tags;
    if (!s.effects.empty()) {
      Json fx = Json::array();
      for (const auto &e : s.effects) fx.push_back(effect_json(e));
      x["effects"] = std::move(fx);
    }
    ents.push_back({s.slice_id, s.placement, std::move(x)});
  }
  for (const auto &a : m.architectures) {
    ents.push_back({a.arch_id, a.placement, Json{{"transfer", "Architecture"}}});
  }
  std::sort(ents.begin(), ents.end(),
            [](const Entity &a, const Entity &b) { return a.id < b.id; });

  // Pack only the clips some mesh draws with.
  std::set<std::string> used;
  for (const auto &e : ents) {
    const auto it = meshes.find(e.id);
    if (it == meshes.end()) continue;
    for (const auto &p : it->second.primitives) used.insert(p.texture_slice_id);
  }
  std::vector<Clip> to_pack;
  for (const auto &id : used) {
    const auto it = clips.find(id);
    if (it == clips.end()) {
      throw CompileError(make_error("UNRESOLVED_SOURCE",
                                    "mesh texture \"" + id + "\" has no extracted clip"));
    }
    to_pack.push_back(it->second);
  }
  ir.atlases = pack_atlas(to_pack, opts.atlas_side_px, opts.atlas_padding_px);
  std::map<std::string, std::pair<std::size_t, UvRect>> where;
  for (std::size_t ai = 0; ai < ir.atlases.size(); ++ai) {
    for (const auto &[id, entry] : ir.atlases[ai].entries) where[id] = {ai, entry.uv};
  }

  std::map<IrMaterial, std::size_t> material_index;
  for (auto &e : ents) {
    IrNode node;
    node.name = e.id;
    node.translation = e.placement.position;
    node.yaw = e.placement.yaw;
    node.extras = std::move(e.extras);
    if (const auto t = targets.find(e.id); t != targets.end()) {
      node.extras["narrative_target"] = Json(std::vector<std::string>(t->second.begin(), t->second.end()));
    }
    if (const auto it = meshes.find(e.id); it != meshes.end() && !it->second.primitives.empty()) {
      const Mesh &mesh = it->second;
      if (mesh.billboard) node.extras["billboard"] = to_string(*mesh.billboard);
      if (!mesh.animation.empty() && !node.extras.contains("effects")) {
        Json fx = Json::array();
        for (const auto &a : mesh.animation) fx.push_back(effect_json(a));
        node.extras["effects"] = std::move(fx);
      }
      IrMesh out;
      out.name = e.id;
      for (const auto &p : mesh.primitives) {
        const auto &[atlas, uv] = where.at(p.texture_slice_id);
        const IrMaterial key{atlas, p.alpha_blend, p.double_sided};
        auto [mi, inserted] = material_index.try_emplace(key, ir.materials.size());
        if (inserted) ir.materials.push_back(key);
        IrPrimitive prim;
        prim.material = mi->second;
        prim.triangles = p.triangles;
        prim.vertices.reserve(p.vertices.size());
        for (const auto &v : p.vertices) {
          prim.vertices.push_back(
              {v.position, {uv.u0 + v.uv.x * (uv.u1 - uv.u0), uv.v0 + v.uv.y * (uv.v1 - uv.v0)}});
        }
        out.primitives.push_back(std::move(prim));
      }
      node.mesh = ir.meshes.size();
      ir.meshes.push_back(std::move(out));
    }
    ir.nodes.push_back(std::move(node));
  }
  return ir;
}

// ---- emission -----------------------------------------------------------------

namespace {

constexpr int kFloat = 5126;
constexpr int kUnsignedInt = 5125;
constexpr int kArrayBuffer = 34962;
constexpr int kElementArrayBuffer = 34963;

class BinaryWriter {
 public:
  std::size_t append(const void *data, std::size_t size) {
    while (bytes_.size() % 4 != 0) bytes_.push_back(0);
    const std::size_t offset = bytes_.size();
    const auto *p = static_cast<const std::uint8_t *>(data);
    bytes_.insert(bytes_.end(), p, p + size);
    return offset;
  }
  std::vector<std::uint8_t> take() {
    while (bytes_.size() % 4 != 0) bytes_.push_back(0);
    return std::move(bytes_);
  }

 private:
  std::vector<std::uint8_t> bytes_;
};

Json float_array(const std::vector<float> &v) {
  Json a = Json::array();
  for (float f : v) a.push_back(static_cast<double>(f));
  return a;
}

std::string face_path(int i) { return std::string("sky/") + kCubeFaceNames[i] + ".png"; }

std::vector<std::uint8_t> as_bytes(const std::string &s) { return {s.begin(), s.end()}; }

}  // namespace

std::map<std::string, std::vector<std::uint8_t>> render_package(const SceneIR &ir) {
  std::map<std::string, std::vector<std::uint8_t>> files;
  BinaryWriter bin;
  Json buffer_views = Json::array();
  Json accessors = Json::array();

  auto add_view = [&](const void *data, std::size_t size, int target) {
    const std::size_t offset = bin.append(data, size);
    buffer_views.push_back(
        {{"buffer", 0}, {"byteOffset", offset}, {"byteLength", size}, {"target", target}});
    return buffer_views.size() - 1;
  };

  Json meshes = Json::array();
  for (const auto &mesh : ir.meshes) {
    Json prims = Json::array();
    for (const auto &p : mesh.primitives) {
      std::vector<float> pos, uv;
      std::vector<float> pmin(3, 0.0f), pmax(3, 0.0f), tmin(2, 0.0f), tmax(2, 0.0f);
      for (std::size_t i = 0; i < p.vertices.size(); ++i) {
        const Vertex &v = p.vertices[i];
        const float xyz[3] = {static_cast<float>(v.position.x), static_cast<float>(v.position.y),
                              static_cast<float>(v.position.z)};
        const float st[2] = {static_cast<float>(v.uv.x), static_cast<float>(v.uv.y)};
        for (int k = 0; k < 3; ++k) {
          pos.push_back(xyz[k]);
          pmin[k] = i == 0 ? xyz[k] : std::min(pmin[k], xyz[k]);
          pmax[k] = i == 0 ? xyz[k] : std::max(pmax[k], xyz[k]);
        }
        for (int k = 0; k < 2; ++k) {
          uv.push_back(st[k]);
          tmin[k] = i == 0 ? st[k] : std::min(tmin[k], st[k]);
          tmax[k] = i == 0 ? st[k] : std::max(tmax[k], st[k]);
        }
      }
      std::vector<std::uint32_t> idx;
      std::uint32_t imin = 0, imax = 0;
      for (const auto &t : p.triangles) {
        for (auto i : t) {
          imin = idx.empty() ? i : std::min(imin, i);
          imax = idx.empty() ? i : std::max(imax, i);
          idx.push_back(i);
        }
      }
      const auto pos_view = add_view(pos.data(), pos.size() * sizeof(float), kArrayBuffer);
      accessors.push_back({{"bufferView", pos_view},
                           {"componentType", kFloat},
                           {"count", p.vertices.size()},
                           {"type", "VEC3"},
                           {"min", float_array(pmin)},
                           {"max", float_array(pmax)}});
      const auto pos_acc = accessors.size() - 1;
      const auto uv_view = add_view(uv.data(), uv.size() * sizeof(float), kArrayBuffer);
      accessors.push_back({{"bufferView", uv_view},
                           {"componentType", kFloat},
                           {"count", p.vertices.size()},
                           {"type", "VEC2"},
                           {"min", float_array(tmin)},
                           {"max", float_array(tmax)}});
      const auto uv_acc = accessors.size() - 1;
      const auto idx_view =
          add_view(idx.data(), idx.size() * sizeof(std::uint32_t), kElementArrayBuffer);
      accessors.push_back({{"bufferView", idx_view},
                           {"componentType", kUnsignedInt},
                           {"count", idx.size()},
                           {"type", "SCALAR"},
                           {"min", Json::array({imin})},
                           {"max", Json::array({imax})}});
      const auto idx_acc = accessors.size() - 1;
      prims.push_back({{"attributes", {{"POSITION", pos_acc}, {"TEXCOORD_0", uv_acc}}},
                       {"indices", idx_acc},
                       {"material", p.material},
                       {"mode", 4}});
    }
    meshes.push_back({{"name", mesh.name}, {"primitives", std::move(prims)}});
  }

  Json materials = Json::array();
  for (std::size_t i = 0; i < ir.materials.size(); ++i) {
    const IrMaterial &mat = ir.materials[i];
    materials.push_back(
        {{"name", "atlas" + std::to_string(mat.atlas) + (mat.alpha_blend ? "_blend" : "_opaque") +
                      (mat.double_sided ? "_2s" : "")},
         {"pbrMetallicRoughness",
          {{"baseColorTexture", {{"index", mat.atlas}}},
           {"metallicFactor", 0.0},
           {"roughnessFactor", 1.0}}},
         {"alphaMode", mat.alpha_blend ? "BLEND" : "OPAQUE"},
         {"doubleSided", mat.double_sided},
         {"extensions", {{"KHR_materials_unlit", Json::object()}}}});
  }

  Json images = Json::array();
  Json textures = Json::array();
  for (std::size_t i = 0; i < ir.atlases.size(); ++i) {
    const std::string path = "tex/atlas_" + std::to_string(i) + ".png";
    files[path] = encode_png(ir.atlases[i].pixels);
    images.push_back({{"uri", path}, {"mimeType", "image/png"}});
    textures.push_back({{"sampler", 0}, {"source", i}});
  }

  Json nodes = Json::array();
  Json root_children = Json::array();
  Json root_extras = {{"units", "meters"}, {"up_axis", "+Y"}, {"scene_kind", ir.scene_kind}};
  if (ir.skybox) {
    Json faces = Json::object();
    for (int i = 0; i < 6; ++i) {
      faces[kCubeFaceNames[i]] = face_path(i);
      files[face_path(i)] = encode_png(ir.skybox->faces[i]);
    }
    files["sky/contact_sheet.png"] = encode_png(contact_sheet(*ir.skybox));
    root_extras["skybox"] = {{"layout", "opengl_cube_map"}, {"faces", std::move(faces)}};
  }
  if (ir.narrative_file) {
    files["narrative.json"] = as_bytes(*ir.narrative_file);
    root_extras["narrative"] = "narrative.json";
  }
  nodes.push_back({{"name", ir.scene_id}, {"children", Json::array()}, {"extras", root_extras}});
  for (const auto &n : ir.nodes) {
    Json node = {{"name", n.name}};
    if (n.translation != Vec3{}) {
      node["translation"] = {n.translation.x, n.translation.y, n.translation.z};
    }
    if (n.yaw != 0.0) node["rotation"] = {0.0, std::sin(n.yaw / 2), 0.0, std::cos(n.yaw / 2)};
    if (n.mesh) node["mesh"] = *n.mesh;
    if (!n.extras.empty()) node["extras"] = n.extras;
    root_children.push_back(nodes.size());
    nodes.push_back(std::move(node));
  }
  if (root_children.empty()) {
    nodes[0].erase("children");
  } else {
    nodes[0]["children"] = std::move(root_children);
  }

  std::vector<std::uint8_t> bin_bytes = bin.take();
  Json gltf = {{"asset", {{"version", "2.0"}, {"generator", "mural2scene"}}},
               {"extensionsUsed", Json::array({"KHR_materials_unlit"})},
               {"scene", 0},
               {"scenes", Json::array({{{"name", ir.scene_id}, {"nodes", Json::array({0})}}})},
               {"nodes", std::move(nodes)}};
  if (ir.materials.empty()) gltf.erase("extensionsUsed");
  if (!meshes.empty()) gltf["meshes"] = std::move(meshes);
  if (!materials.empty()) gltf["materials"] = std::move(materials);
  if (!textures.empty()) {
    gltf["textures"] = std::move(textures);
    gltf["images"] = std::move(images);
    gltf["samplers"] = Json::array(
        {{{"magFilter", 9729}, {"minFilter", 9729}, {"wrapS", 33071}, {"wrapT", 33071}}});
  }
  if (!bin_bytes.empty()) {
    gltf["accessors"] = std::move(accessors);
    gltf["bufferViews"] = std::move(buffer_views);
    gltf["buffers"] = Json::array({{{"uri", "scene.bin"}, {"byteLength", bin_bytes.size()}}});
    files["scene.bin"] = std::move(bin_bytes);
  }
  files["scene.gltf"] = as_bytes(gltf.dump(2) + "\n");
  files["report.txt"] = as_bytes(format_report(ir));
  return files;
}

std::string format_report(const SceneIR &ir) {
  std::ostringstream os;
  os << "scene " << ir.scene_id << " (" << ir.scene_kind << ")\n";
  std::size_t with_mesh = 0;
  for (const auto &n : ir.nodes) with_mesh += n.mesh.has_value();
  os << "entities: " << ir.nodes.size() << " (" << with_mesh << " with geometry)\n";
  os << "nodes: " << ir.nodes.size() + 1 << "\n";
  std::size_t prims = 0;
  for (const auto &m : ir.meshes) prims += m.primitives.size();
  os << "meshes: " << ir.meshes.size() << " primitives: " << prims << "\n";
  os << "vertices: " << ir.vertex_count() << "\n";
  os << "triangles: " << ir.triangle_count() << "\n";
  os << "materials: " << ir.materials.size() << "\n";
  for (std::size_t i = 0; i < ir.atlases.size(); ++i) {
    os << "atlas " << i << ": " << ir.atlases[i].pixels.width() << "x"
       << ir.atlases[i].pixels.height() << " px, " << ir.atlases[i].entries.size()
       << " clips\n";
  }
  if (ir.skybox) os << "skybox: 6 faces " << ir.skybox->faces[0].width() << " px\n";
  if (ir.narrative_file) {
    os << "narrative: " << ir.narrative_counts[0] << " nodes, " << ir.narrative_counts[1]
       << " edges, " << ir.narrative_counts[2] << " knowledge items\n";
  }
  os << "warnings: " << ir.warnings.size() << "\n";
  for (const auto &w : ir.warnings) os << format_diagnostic(w) << "\n";
  return os.str();
}

ScenePackage emit_gltf(const SceneIR &ir, const std::filesystem::path &out_dir) {
  namespace fs = std::filesystem;
  const auto files = render_package(ir);
  ScenePackage pkg;
  pkg.dir = out_dir;
  for (const auto &[rel, bytes] : files) {
    const fs::path path = out_dir / rel;
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError(path.parent_path().string(), ec.message());
    write_file(path, bytes);
    if (rel == "scene.gltf") pkg.gltf = path;
    else if (rel == "scene.bin") pkg.bin = path;
    else if (rel == "narrative.json") pkg.narrative = path;
    else if (rel == "report.txt") pkg.report_path = path;
    else if (rel.rfind("tex/", 0) == 0) pkg.textures.push_back(path);
    else if (rel.rfind("sky/", 0) == 0 && rel != "sky/contact_sheet.png") {
      pkg.skybox_faces.push_back(path);
    }
  }
  pkg.report = format_report(ir);
  return pkg;
}

// ---- structural validation ------------------------------------------------------

namespace {

class GltfChecker {
 public:
  GltfChecker(const std::filesystem::path &path) : path_(path), base_(path.parent_path()) {}

  Diagnostics run() {
    std::vector<std::uint8_t> text;
    try {
      text = read_file(path_);
    } catch (const IoError &e) {
      error("MISSING_FILE", e.what());
      return diags_;
    }
    try {
      doc_ = nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::exception &e) {
      error("INVALID_GLTF", std::string("not JSON: ") + e.what());
      return diags_;
    }
    if (!doc_.is_object()) {
      error("INVALID_GLTF", "top level is not an object");
      return diags_;
    }
    check_asset();
    load_buffers();
    check_buffer_views();
    check_accessors();
    check_meshes();
    check_materials_textures();
    check_nodes_scenes();
    return diags_;
  }

 private:
  void error(const std::string &code, const std::string &msg) {
    diags_.push_back(make_error(code, msg, path_.string()));
  }

  const nlohmann::json &arr(const char *key) {
    static const nlohmann::json empty = nlohmann::json::array();
    const auto it = doc_.find(key);
    if (it == doc_.end()) return empty;
    if (!it->is_array()) {
      error("INVALID_GLTF", std::string("\"") + key + "\" is not an array");
      return empty;
    }
    return *it;
  }

  bool index_ok(const nlohmann::json &v, const char *collection, const std::string &what) {
    if (!v.is_number_unsigned() || v.get<std::size_t>() >= arr(collection).size()) {
      error("DANGLING_REFERENCE", what + " does not index " + collection);
      return false;
    }
    return true;
  }

  void check_asset() {
    const auto it = doc_.find("asset");
    if (it == doc_.end() || !it->is_object() || !it->contains("version")) {
      error("MISSING_FIELD", "asset.version is required");
    } else if ((*it)["version"] != "2.0") {
      error("INVALID_GLTF", "asset.version must be \"2.0\"");
    }
  }

  void load_buffers() {
    const auto &buffers = arr("buffers");
    for (std::size_t i = 0; i < buffers.size(); ++i) {
      const auto &b = buffers[i];
      const std::string what = "buffers[" + std::to_string(i) + "]";
      if (!b.contains("byteLength") || !b["byteLength"].is_number_unsigned()) {
        error("MISSING_FIELD", what + ".byteLength is required");
        data_.emplace_back();
        continue;
      }
      const std::size_t declared = b["byteLength"].get<std::size_t>();
      std::vector<std::uint8_t> bytes;
      if (!b.contains("uri") || !b["uri"].is_string()) {
        error("MISSING_FIELD", what + ".uri is required outside GLB");
      } else {
        try {
          bytes = read_file(base_ / b["uri"].get<std::string>());
        } catch (const IoError &e) {
          error("MISSING_FILE", what + ": " + e.what());
        }
        if (bytes.size() < declared) {
          error("BUFFER_SIZE_MISMATCH", what + " declares " + std::to_string(declared) +
                                            " bytes but the file has " +
                                            std::to_string(bytes.size()));
        }
      }
      data_.push_back(std::move(bytes));
    }
  }

  void check_buffer_views() {
    const auto &views = arr("bufferViews");
    for (std::size_t i = 0; i < views.size(); ++i) {
      const auto &v = views[i];
      const std::string what = "bufferViews[" + std::to_string(i) + "]";
      if (!v.contains("buffer") || !v.contains("byteLength")) {
        error("MISSING_FIELD", what + " needs buffer and byteLength");
        continue;
      }
      if (!index_ok(v["buffer"], "buffers", what + ".buffer")) continue;
      const std::size_t buf = v["buffer"].get<std::size_t>();
      const std::size_t end = v.value("byteOffset", std::size_t{0}) +
                              v["byteLength"].get<std::size_t>();
      const std::size_t declared = arr("buffers")[buf].value("byteLength", std::size_t{0});
      if (end > declared) {
        error("BUFFERVIEW_OUT_OF_BOUNDS", what + " ends at byte " + std::to_string(end) +
                                              " past buffer length " + std::to_string(declared));
      }
    }
  }

  static std::size_t component_size(int type) {
    switch (type) {
      case 5120: case 5121: return 1;
      case 5122: case 5123: return 2;
      case 5125: case 5126: return 4;
      default: return 0;
    }
  }

  static std::size_t component_count(const std::string &type) {
    if (type == "SCALAR") return 1;
    if (type == "VEC2") return 2;
    if (type == "VEC3") return 3;
    if (type == "VEC4" || type == "MAT2") return 4;
    if (type == "MAT3") return 9;
    if (type == "MAT4") return 16;
    return 0;
  }

  /// Decoded accessor components, or nothing if the accessor is unusable.
  struct Decoded {
    bool ok = false;
    std::size_t count = 0;
    std::size_t width = 0;
    std::vector<double> values;
  };

  void check_accessors() {
    const auto &accs = arr("accessors");
    decoded_.resize(accs.size());
    for (std::size_t i = 0; i < accs.size(); ++i) {
      const auto &a = accs[i];
      const std::string what = "accessors[" + std::to_string(i) + "]";
      if (!a.contains("componentType") || !a.contains("count") || !a.contains("type")) {
        error("MISSING_FIELD", what + " needs componentType, count and type");
        continue;
      }
      const int ctype = a["componentType"].get<int>();
      const std::size_t csize = component_size(ctype);
      const std::size_t width = component_count(a["type"].get<std::string>());
      if (csize == 0 || width == 0) {
        error("INVALID_GLTF", what + " has an unknown componentType or type");
        continue;
      }
      if (!a.contains("bufferView")) continue;  // all zeros; nothing to check
      if (!index_ok(a["bufferView"], "bufferViews", what + ".bufferView")) continue;
      const auto &view = arr("bufferViews")[a["bufferView"].get<std::size_t>()];
      const std::size_t count = a["count"].get<std::size_t>();
      const std::size_t elem = csize * width;
      const std::size_t stride = view.value("byteStride", elem);
      const std::size_t offset = a.value("byteOffset", std::size_t{0});
      const std::size_t need = count == 0 ? 0 : offset + stride * (count - 1) + elem;
      if (need > view.value("byteLength", std::size_t{0})) {
        error("ACCESSOR_OUT_OF_BOUNDS",
              what + " needs " + std::to_string(need) + " bytes of its bufferView");
        continue;
      }
      const std::size_t buf = view.value("buffer", std::size_t{0});
      if (buf >= data_.size()) continue;
      const auto &bytes = data_[buf];
      const std::size_t base = view.value("byteOffset", std::size_t{0}) + offset;
      if (count > 0 && base + stride * (count - 1) + elem > bytes.size()) {
        continue;  // reported as BUFFER_SIZE_MISMATCH already
      }
      Decoded d;
      d.count = count;
      d.width = width;
      d.values.reserve(count * width);
      for (std::size_t k = 0; k < count; ++k) {
        for (std::size_t c = 0; c < width; ++c) {
          const std::uint8_t *p = bytes.data() + base + k * stride + c * csize;
          d.values.push_back(read_component(p, ctype));
        }
      }
      d.ok = true;
      check_min_max(a, d, what, ctype);
      decoded_[i] = std::move(d);
    }
  }

  static double read_component(const std::uint8_t *p, int ctype) {
    switch (ctype) {
      case 5120: { std::int8_t v; std::memcpy(&v, p, 1); return v; }
      case 5121: return *p;
      case 5122: { std::int16_t v; std::memcpy(&v, p, 2); return v; }
      case 5123: { std::uint16_t v; std::memcpy(&v, p, 2); return v; }
      case 5125: { std::uint32_t v; std::memcpy(&v, p, 4); return v; }
      default: { float v; std::memcpy(&v, p, 4); return v; }
    }
  }

  void check_min_max(const nlohmann::json &a, const Decoded &d, const std::string &what,
                     int ctype) {
    if (!a.contains("min") && !a.contains("max")) return;
    for (const char *key : {"min", "max"}) {
      if (!a.contains(key)) continue;
      const auto &declared = a[key];
      if (!declared.is_array() || declared.size() != d.width) {
        error("MINMAX_MISMATCH", what + "." + key + " has the wrong length");
        continue;
      }
      for (std::size_t c = 0; c < d.width; ++c) {
        double actual = 0.0;
        for (std::size_t k = 0; k < d.count; ++k) {
          const double v = d.values[k * d.width + c];
          actual = k == 0 ? v : (key[1] == 'i' ? std::min(actual, v) : std::max(actual, v));
        }
        double want = declared[c].get<double>();
        if (ctype == 5126) want = static_cast<float>(want);
        if (d.count > 0 && want != actual) {
          std::ostringstream msg;
          msg << what << "." << key << "[" << c << "] is " << want << " but the data gives "
              << actual;
          error("MINMAX_MISMATCH", msg.str());
        }
      }
    }
  }

  void check_meshes() {
    const auto &meshes = arr("meshes");
    for (std::size_t mi = 0; mi < meshes.size(); ++mi) {
      const auto &prims = meshes[mi].value("primitives", nlohmann::json::array());
      if (prims.empty()) error("MISSING_FIELD", "meshes[" + std::to_string(mi) + "] has no primitives");
      for (std::size_t pi = 0; pi < prims.size(); ++pi) {
        const auto &p = prims[pi];
        const std::string what =
            "meshes[" + std::to_string(mi) + "].primitives[" + std::to_string(pi) + "]";
        if (!p.contains("attributes") || !p["attributes"].contains("POSITION")) {
          error("MISSING_FIELD", what + " has no POSITION attribute");
          continue;
        }
        std::size_t vertex_count = 0;
        bool have_count = false;
        for (const auto &[name, acc] : p["attributes"].items()) {
          if (!index_ok(acc, "accessors", what + "." + name)) continue;
          const std::size_t ai = acc.get<std::size_t>();
          const std::size_t n = arr("accessors")[ai].value("count", std::size_t{0});
          if (have_count && n != vertex_count) {
            error("INVALID_GLTF", what + " attributes disagree on vertex count");
          }
          vertex_count = n;
          have_count = true;
          if (name.rfind("TEXCOORD_", 0) == 0 && ai < decoded_.size() && decoded_[ai].ok) {
            for (double v : decoded_[ai].values) {
              if (!(v >= 0.0 && v <= 1.0)) {
                error("UV_OUT_OF_RANGE", what + "." + name + " leaves [0, 1]");
                break;
              }
            }
          }
        }
        if (p.contains("indices") && index_ok(p["indices"], "accessors", what + ".indices")) {
          const std::size_t ai = p["indices"].get<std::size_t>();
          if (ai < decoded_.size() && decoded_[ai].ok) {
            if (decoded_[ai].count % 3 != 0) {
              error("INVALID_GLTF", what + " index count is not a multiple of 3");
            }
            for (double v : decoded_[ai].values) {
              if (v >= static_cast<double>(vertex_count)) {
                error("INDEX_OUT_OF_RANGE", what + " index " + std::to_string(static_cast<long>(v)) +
                                                " >= vertex count " + std::to_string(vertex_count));
                break;
              }
            }
          }
        }
        if (p.contains("material")) index_ok(p["material"], "materials", what + ".material");
      }
    }
  }

  void check_materials_textures() {
    const auto &materials = arr("materials");
    for (std::size_t i = 0; i < materials.size(); ++i) {
      const auto &m = materials[i];
      if (m.contains("pbrMetallicRoughness") &&
          m["pbrMetallicRoughness"].contains("baseColorTexture")) {
        index_ok(m["pbrMetallicRoughness"]["baseColorTexture"].value("index", nlohmann::json()),
                 "textures", "materials[" + std::to_string(i) + "] baseColorTexture");
      }
    }
    const auto &textures = arr("textures");
    for (std::size_t i = 0; i < textures.size(); ++i) {
      const std::string what = "textures[" + std::to_string(i) + "]";
      if (textures[i].contains("source")) index_ok(textures[i]["source"], "images", what + ".source");
      if (textures[i].contains("sampler")) {
        index_ok(textures[i]["sampler"], "samplers", what + ".sampler");
      }
    }
    const auto &images = arr("images");
    for (std::size_t i = 0; i < images.size(); ++i) {
      const std::string what = "images[" + std::to_string(i) + "]";
      if (!images[i].contains("uri") || !images[i]["uri"].is_string()) {
        error("MISSING_FIELD", what + " has no uri");
        continue;
      }
      const auto file = base_ / images[i]["uri"].get<std::string>();
      try {
        decode_image(read_file(file), file.string());
      } catch (const IoError &e) {
        error("MISSING_IMAGE", what + ": " + e.what());
      }
    }
  }

  void check_nodes_scenes() {
    const auto &nodes = arr("nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto &n = nodes[i];
      const std::string what = "nodes[" + std::to_string(i) + "]";
      if (n.contains("mesh")) index_ok(n["mesh"], "meshes", what + ".mesh");
      for (const auto &c : n.value("children", nlohmann::json::array())) {
        index_ok(c, "nodes", what + ".children");
      }
      for (const char *key : {"translation", "rotation", "scale"}) {
        for (const auto &v : n.value(key, nlohmann::json::array())) {
          if (!v.is_number() || !std::isfinite(v.get<double>())) {
            error("NONFINITE_TRANSFORM", what + "." + key + " is not finite");
          }
        }
      }
    }
    const auto &scenes = arr("scenes");
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      for (const auto &n : scenes[i].value("nodes", nlohmann::json::array())) {
        index_ok(n, "nodes", "scenes[" + std::to_string(i) + "].nodes");
      }
    }
    if (doc_.contains("scene")) index_ok(doc_["scene"], "scenes", "scene");
  }

  std::filesystem::path path_;
  std::filesystem::path base_;
  nlohmann::json doc_;
  std::vector<std::vector<std::uint8_t>> data_;
  std::vector<Decoded> decoded_;
  Diagnostics diags_;
};

}  // namespace

Diagnostics validate_gltf_structure(const std::filesystem::path &gltf_path) {
  return GltfChecker(gltf_path).run();
}

}  // namespace mural2scene
