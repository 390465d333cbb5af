#include "mural2scene/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <ostream>

#include "mural2scene/pipeline.hpp"

namespace mural2scene {

namespace fs = std::filesystem;

namespace {

void print(std::ostream &err, const Diagnostics &diags, const std::string &doc) {
  for (Diagnostic d : diags) {
    if (d.path.empty() && d.loc.known()) d.path = doc;
    err << format_diagnostic(d) << "\n";
  }
}

/// Runs `body`, mapping exceptions onto exit codes.
template <typename Body>
int guarded(std::ostream &err, const std::string &doc, Body body) {
  try {
    return body();
  } catch (const IoError &e) {
    err << "ERROR IO_FAILURE " << e.path() << " " << e.what() << "\n";
    return kExitIo;
  } catch (const CompileError &e) {
    print(err, e.diagnostics(), doc);
    return kExitDiagnostics;
  }
}

fs::path base_dir(const fs::path &manifest) {
  const fs::path parent = manifest.parent_path();
  return parent.empty() ? fs::path(".") : parent;
}

/// Writes every file or none: content is staged beside `out` and moved in
/// once complete.
void write_tree(const fs::path &out, const std::map<std::string, std::vector<std::uint8_t>> &files) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError(out.string(), ec.message());
  const fs::path staging = out / ".staging";
  fs::remove_all(staging, ec);
  for (const auto &[rel, bytes] : files) {
    const fs::path p = staging / rel;
    fs::create_directories(p.parent_path(), ec);
    if (ec) throw IoError(p.parent_path().string(), ec.message());
    write_file(p, bytes);
  }
  for (const auto &[rel, bytes] : files) {
    const fs::path dst = out / rel;
    fs::create_directories(dst.parent_path(), ec);
    fs::rename(staging / rel, dst, ec);
    if (ec) throw IoError(dst.string(), ec.message());
  }
  fs::remove_all(staging, ec);
}

CompileOptions options_from(const CliConfig &cfg) {
  CompileOptions opts;
  opts.downsample = cfg.downsample;
  opts.seed = cfg.seed;
  return opts;
}

bool blocks(const Diagnostics &diags, bool strict) {
  return has_errors(diags) || (strict && !diags.empty());
}

}  // namespace

int cmd_validate(const CliConfig &cfg, std::ostream &out, std::ostream &err) {
  const std::string doc = cfg.manifest.filename().string();
  return guarded(err, doc, [&] {
    LoadedManifest lm = load_manifest(cfg.manifest);
    Diagnostics diags = lm.warnings;
    const Diagnostics v = validate_manifest(lm.manifest, doc);
    diags.insert(diags.end(), v.begin(), v.end());
    print(err, diags, doc);
    const bool failed = blocks(diags, cfg.strict);
    out << doc << ": " << count_errors(diags) << " error(s), "
        << diags.size() - count_errors(diags) << " warning(s)\n";
    return failed ? kExitDiagnostics : kExitOk;
  });
}

int cmd_compile(const CliConfig &cfg, std::ostream &out, std::ostream &err) {
  const std::string doc = cfg.manifest.filename().string();
  return guarded(err, doc, [&] {
    if (cfg.out.empty()) {
      err << "ERROR MISSING_FIELD --out is required\n";
      return kExitDiagnostics;
    }
    LoadedManifest lm = load_manifest(cfg.manifest);
    Diagnostics diags = lm.warnings;
    const Diagnostics v = validate_manifest(lm.manifest, doc);
    diags.insert(diags.end(), v.begin(), v.end());
    print(err, diags, doc);
    if (blocks(diags, cfg.strict)) return kExitDiagnostics;

    CompiledScene scene = compile_scene(lm.manifest, base_dir(cfg.manifest), options_from(cfg));
    // Manifest-level warnings belong in the report too.
    Diagnostics all = diags;
    all.insert(all.end(), scene.ir.warnings.begin(), scene.ir.warnings.end());
    print(err, scene.ir.warnings, doc);
    if (blocks(all, cfg.strict)) return kExitDiagnostics;
    scene.ir.warnings = all;
    for (auto &w : scene.ir.warnings) {
      if (w.path.empty() && w.loc.known()) w.path = doc;
    }

    write_tree(cfg.out, render_package(scene.ir));
    out << format_report(scene.ir);
    return kExitOk;
  });
}

int cmd_simulate(const CliConfig &cfg, std::ostream &out, std::ostream &err) {
  const std::string doc = cfg.manifest.filename().string();
  const std::string script_doc = cfg.script.filename().string();
  std::optional<std::vector<narrative::Event>> script;
  try {
    const auto bytes = read_file(cfg.script);
    auto parsed = parse_script(
        std::string_view(reinterpret_cast<const char *>(bytes.data()), bytes.size()), script_doc);
    if (!parsed.events) {
      print(err, parsed.diagnostics, script_doc);
      return kExitIo;
    }
    script = std::move(parsed.events);
  } catch (const IoError &e) {
    err << "ERROR IO_FAILURE " << e.path() << " " << e.what() << "\n";
    return kExitIo;
  }

  return guarded(err, doc, [&] {
    const auto bytes = read_file(cfg.manifest);
    const std::string text(bytes.begin(), bytes.end());
    narrative::NarrativeGraph graph;
    const auto probe = text::parse(text, doc);
    if (probe.value && probe.value->kind() == text::Kind::Object && probe.value->find("format")) {
      graph = narrative::load_narrative(text);
    } else {
      LoadedManifest lm = load_manifest(cfg.manifest);
      if (!lm.manifest.narrative) {
        err << "ERROR NO_NARRATIVE " << doc << " manifest has no narrative graph\n";
        return kExitDiagnostics;
      }
      graph = *lm.manifest.narrative;
    }
    const Diagnostics diags = narrative::validate_graph(graph);
    print(err, diags, doc);
    if (blocks(diags, cfg.strict)) return kExitDiagnostics;

    const narrative::SimTrace trace = narrative::simulate(graph, *script);
    out << narrative::format_trace(trace);
    return trace.completed() ? kExitOk : kExitDiagnostics;
  });
}

int cmd_skybox(const CliConfig &cfg, std::ostream &out, std::ostream &err) {
  const std::string doc = cfg.manifest.filename().string();
  return guarded(err, doc, [&] {
    if (cfg.out.empty()) {
      err << "ERROR MISSING_FIELD --out is required\n";
      return kExitDiagnostics;
    }
    LoadedManifest lm = load_manifest(cfg.manifest);
    const SceneManifest &m = lm.manifest;
    if (!m.skybox && !(m.scene_kind == SceneKind::Panorama && m.panorama_image)) {
      err << "ERROR NO_SKYBOX " << doc << " manifest has neither a skybox nor a panorama\n";
      return kExitDiagnostics;
    }
    const CompileOptions opts = options_from(cfg);
    std::map<std::string, Clip> clips;
    if (m.skybox) clips = extract_clips(m, base_dir(cfg.manifest), m.skybox->horizon_slices, opts);
    const auto sky = build_skybox(m, base_dir(cfg.manifest), clips, opts);
    std::map<std::string, std::vector<std::uint8_t>> files;
    for (int i = 0; i < 6; ++i) {
      files[std::string("sky/") + kCubeFaceNames[i] + ".png"] = encode_png(sky->faces[i]);
    }
    files["sky/contact_sheet.png"] = encode_png(contact_sheet(*sky));
    write_tree(cfg.out, files);
    out << "skybox: 6 faces " << sky->faces[0].width() << " px written to "
        << (cfg.out / "sky").string() << "\n";
    return kExitOk;
  });
}

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Compile annotated mural artwork into a 3D scene package", "mural2scene"};
  app.require_subcommand(1);
  CliConfig cfg;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App *sub) {
    sub->add_option("--manifest", cfg.manifest, "Scene manifest")->required();
  };
  CLI::App *compile = app.add_subcommand("compile", "Build the scene package");
  add_common(compile);
  compile->add_option("--out", cfg.out, "Output directory")->required();
  compile->add_option("--downsample", cfg.downsample, "Box-filter sources by N")
      ->check(CLI::PositiveNumber);
  compile->add_option("--seed", seed, "Override the skybox rhythm seed");
  compile->add_flag("--strict", cfg.strict, "Treat warnings as errors");

  CLI::App *validate = app.add_subcommand("validate", "Parse and validate only");
  add_common(validate);
  validate->add_flag("--strict", cfg.strict, "Treat warnings as errors");

  CLI::App *simulate = app.add_subcommand("simulate", "Replay an event script");
  add_common(simulate);
  simulate->add_option("--script", cfg.script, "Event script")->required();
  simulate->add_flag("--strict", cfg.strict, "Treat warnings as errors");

  CLI::App *skybox = app.add_subcommand("skybox", "Synthesize the skybox only");
  add_common(skybox);
  skybox->add_option("--out", cfg.out, "Output directory")->required();
  skybox->add_option("--downsample", cfg.downsample, "Box-filter sources by N")
      ->check(CLI::PositiveNumber);
  skybox->add_option("--seed", seed, "Override the skybox rhythm seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "ERROR USAGE " << e.what() << "\n";
    return kExitDiagnostics;
  }
  for (CLI::App *sub : {compile, skybox}) {
    if (sub->parsed() && sub->count("--seed") > 0) cfg.seed = seed;
  }

  if (compile->parsed()) return cmd_compile(cfg, out, err);
  if (validate->parsed()) return cmd_validate(cfg, out, err);
  if (simulate->parsed()) return cmd_simulate(cfg, out, err);
  return cmd_skybox(cfg, out, err);
}

}  // namespace mural2scene
