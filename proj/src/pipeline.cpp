#include "mural2scene/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <set>
#include <thread>

#include "mural2scene/geometry.hpp"

namespace mural2scene {

int thread_cap() {
  if (const char *env = std::getenv("MURAL2SCENE_THREADS")) {
    char *end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min(v, 256L));
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

LoadedManifest load_manifest(const std::filesystem::path &path) {
  const auto bytes = read_file(path);
  auto parsed = parse_manifest(std::string_view(reinterpret_cast<const char *>(bytes.data()),
                                                bytes.size()),
                               path.filename().string());
  if (!parsed.ok()) throw CompileError(std::move(parsed.diagnostics));
  LoadedManifest out;
  out.manifest = std::move(*parsed.manifest);
  out.path = path;
  out.warnings = std::move(parsed.diagnostics);
  return out;
}

namespace {

/// Runs fn(i) for i in [0, n) on up to `threads` workers. The first
/// exception by index is rethrown, so failures do not depend on timing.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto count = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (count <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
  }
  for (auto &e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct DecodedSource {
  Image image;
  double dpi = 0.0;
};

}  // namespace

std::map<std::string, Clip> extract_clips(const SceneManifest &m,
                                          const std::filesystem::path &base_dir,
                                          const std::vector<std::string> &slice_ids,
                                          const CompileOptions &opts) {
  if (opts.downsample < 1) {
    throw CompileError(make_error("INVALID_VALUE", "downsample factor must be >= 1"));
  }
  std::vector<const SliceSpec *> slices;
  std::set<std::string> source_ids;
  for (const auto &id : slice_ids) {
    const SliceSpec *s = m.find_slice(id);
    if (s == nullptr) {
      throw CompileError(make_error("UNRESOLVED_SOURCE", "no slice named \"" + id + "\""));
    }
    slices.push_back(s);
    source_ids.insert(s->source_id);
  }

  Diagnostics problems;
  std::map<std::string, DecodedSource> sources;
  for (const auto &sid : source_ids) {
    const MuralSource *src = m.find_source(sid);
    if (src == nullptr) {
      throw CompileError(make_error("UNRESOLVED_SOURCE", "no source named \"" + sid + "\""));
    }
    Image img = read_image(base_dir / src->image_path);
    const double want_w = src->declared_width_px();
    const double want_h = src->declared_height_px();
    if (std::abs(img.width() - want_w) > kSourceSizeTolerance * want_w ||
        std::abs(img.height() - want_h) > kSourceSizeTolerance * want_h) {
      problems.push_back(make_error(
          "SOURCE_SIZE_MISMATCH",
          "source \"" + sid + "\" is " + std::to_string(img.width()) + "x" +
              std::to_string(img.height()) + " px but its physical size at " +
              std::to_string(src->dpi) + " dpi implies " + std::to_string(std::lround(want_w)) +
              "x" + std::to_string(std::lround(want_h)),
          {}, src->loc));
    }
    for (const SliceSpec *s : slices) {
      if (s->source_id != sid) continue;
      for (const Vec2 &p : s->mask) {
        if (p.x < 0 || p.y < 0 || p.x > img.width() || p.y > img.height()) {
          problems.push_back(make_error("MASK_OUT_OF_BOUNDS",
                                        "slice \"" + s->slice_id + "\" mask leaves the " +
                                            std::to_string(img.width()) + "x" +
                                            std::to_string(img.height()) + " source image",
                                        {}, s->loc));
          break;
        }
      }
    }
    sources[sid] = {downsample(img, opts.downsample),
                    static_cast<double>(src->dpi) / opts.downsample};
  }
  if (!problems.empty()) throw CompileError(std::move(problems));

  std::vector<Clip> clips(slices.size());
  const int threads = opts.threads > 0 ? opts.threads : thread_cap();
  parallel_for(slices.size(), threads, [&](std::size_t i) {
    SliceSpec scaled = *slices[i];
    for (Vec2 &p : scaled.mask) p = p * (1.0 / opts.downsample);
    const DecodedSource &src = sources.at(scaled.source_id);
    clips[i] = feather_alpha(extract_clip(src.image, src.dpi, scaled), opts.feather_radius_px);
  });
  std::map<std::string, Clip> out;
  for (auto &c : clips) out.emplace(c.slice_id, std::move(c));
  return out;
}

std::optional<Skybox> build_skybox(const SceneManifest &m, const std::filesystem::path &base_dir,
                                   const std::map<std::string, Clip> &clips,
                                   const CompileOptions &opts) {
  if (m.skybox) {
    SkyboxSpec spec = *m.skybox;
    if (opts.seed) spec.rhythm_seed = *opts.seed;
    std::vector<const Clip *> horizon;
    for (const auto &id : spec.horizon_slices) {
      const auto it = clips.find(id);
      if (it == clips.end()) {
        throw CompileError(make_error("UNRESOLVED_SOURCE",
                                      "skybox horizon slice \"" + id + "\" was not extracted"));
      }
      horizon.push_back(&it->second);
    }
    return make_skybox(spec, horizon);
  }
  if (m.scene_kind == SceneKind::Panorama && m.panorama_image) {
    return skybox_from_panorama(read_image(base_dir / *m.panorama_image),
                                SkyboxSpec{}.face_size_px);
  }
  return std::nullopt;
}

CompiledScene compile_scene(const SceneManifest &m, const std::filesystem::path &base_dir,
                            const CompileOptions &opts) {
  CompiledScene out;
  std::vector<std::string> ids;
  for (const auto &s : m.slices) ids.push_back(s.slice_id);
  out.clips = extract_clips(m, base_dir, ids, opts);

  Diagnostics warnings;
  for (const auto &s : m.slices) {
    const Clip &clip = out.clips.at(s.slice_id);
    if (const auto *f = std::get_if<transfer::FaceToEye>(&s.transfer)) {
      Mesh mesh = make_billboard_quad(clip, s.placement, f->axis_lock);
      mesh.animation = s.effects;
      out.meshes[s.slice_id] = std::move(mesh);
    } else if (std::holds_alternative<transfer::Cross>(s.transfer)) {
      Mesh mesh = make_cross(clip, s.placement);
      mesh.animation = s.effects;
      out.meshes[s.slice_id] = std::move(mesh);
    }
  }

  std::map<std::string, const Clip *> by_id;
  for (const auto &[id, clip] : out.clips) by_id[id] = &clip;
  for (const auto &a : m.architectures) {
    Mesh mesh = make_architecture(a, by_id);
    if (a.calibration) {
      const auto it = by_id.find(a.calibration->slice_id);
      if (it == by_id.end()) {
        throw CompileError(make_error("UNRESOLVED_SOURCE",
                                      "calibration of \"" + a.arch_id + "\" names slice \"" +
                                          a.calibration->slice_id + "\", which was not extracted",
                                      {}, a.loc));
      }
      const double score =
          projection_match_check(to_world(mesh, a.placement), *a.calibration, *it->second);
      out.projection_scores[a.arch_id] = score;
      if (score < kProjectionMatchThreshold) {
        warnings.push_back(make_warning(
            "PROJECTION_MISMATCH",
            "architecture \"" + a.arch_id + "\" matches slice \"" + a.calibration->slice_id +
                "\" with IoU " + text::format_double(score) + " below " +
                text::format_double(kProjectionMatchThreshold),
            {}, a.loc));
      }
    }
    out.meshes[a.arch_id] = std::move(mesh);
  }

  out.ir = lower_manifest(m, out.clips, out.meshes, build_skybox(m, base_dir, out.clips, opts),
                          opts.lower);
  out.ir.warnings = std::move(warnings);
  return out;
}

}  // namespace mural2scene
