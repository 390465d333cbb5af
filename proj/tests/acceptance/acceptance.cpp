// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "generators.hpp"
#include "mural2scene/emitter.hpp"
#include "mural2scene/geometry.hpp"
#include "mural2scene/manifest.hpp"
#include "mural2scene/pipeline.hpp"
#include "mural2scene/skybox.hpp"
#include "mural2scene/slicer.hpp"
#include "oracles.hpp"

using namespace mural2scene;
namespace fs = std::filesystem;
namespace nv = mural2scene::narrative;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Collects the first few failure messages of a criterion.
struct Check {
  bool ok = true;
  std::ostringstream detail;
  int shown = 0;

  void fail(const std::string &msg) {
    ok = false;
    if (shown++ < 5) detail << "\n    " << msg;
  }
  void expect(bool cond, const std::string &msg) {
    if (!cond) fail(msg);
  }
};

template <class F>
std::string error_code(F &&f) {
  try {
    f();
  } catch (const CompileError &e) {
    return e.code();
  }
  return {};
}

const fs::path kFixtures = FIXTURE_DIR;

LoadedManifest foguang_manifest() { return load_manifest(kFixtures / "foguang.scene"); }

CompileOptions fixture_options() {
  CompileOptions o;
  o.downsample = 2;
  return o;
}

// ---- 1 ----------------------------------------------------------------------

void billboard_invariant(Check &c, std::string &summary) {
  gen::Rng rng(1);
  Clip clip;
  clip.slice_id = "s";
  clip.pixels = Image(4, 8);
  clip.physical_size_m = {1.0, 2.0};
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Vec3 sprite{gen::uniform(rng, -50, 50), gen::uniform(rng, -5, 5), gen::uniform(rng, -50, 50)};
    Vec3 camera;
    do {
      // Mix of distances, down to near-overhead cameras.
      const double r = std::pow(10.0, gen::uniform(rng, -5.9, 2));
      const double a = gen::uniform(rng, -kPi, kPi);
      camera = sprite + Vec3{r * std::sin(a), gen::uniform(rng, -20, 20), r * std::cos(a)};
    } while (std::hypot(camera.x - sprite.x, camera.z - sprite.z) <= 1e-6);

    Placement p;
    p.position = sprite;
    p.yaw = billboard_yaw(sprite, camera);
    const Mesh quad = to_world(make_billboard_quad(clip, Placement{}, AxisLock::Cylindrical), p);
    const auto &v = quad.primitives[0].vertices;
    const auto &tri = quad.primitives[0].triangles[0];
    const Vec3 n = cross(v[tri[1]].position - v[tri[0]].position,
                         v[tri[2]].position - v[tri[0]].position);
    const double dx = camera.x - sprite.x, dz = camera.z - sprite.z;
    const double angle = std::abs(std::atan2(n.x * dz - n.z * dx, n.x * dx + n.z * dz));
    worst = std::max(worst, angle);
    if (angle > 1e-6) c.fail("pose " + std::to_string(i) + ": angle " + std::to_string(angle));
  }
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 1.0, "runtime " + std::to_string(elapsed) + " s");
  const Vec3 s{3, 1, 4};
  c.expect(error_code([&] { billboard_yaw(s, s + Vec3{0, 10, 0}); }) == "DEGENERATE_VIEW",
           "overhead camera did not raise DEGENERATE_VIEW");
  c.expect(error_code([&] { billboard_yaw(s, s + Vec3{5e-10, -3, 5e-10}); }) == "DEGENERATE_VIEW",
           "near-overhead camera did not raise DEGENERATE_VIEW");
  char buf[128];
  std::snprintf(buf, sizeof buf, "1000 poses, max error %.3g rad, %.3f s", worst, elapsed);
  summary = buf;
}

// ---- 2 ----------------------------------------------------------------------

void cross_silhouette(Check &c, std::string &summary) {
  const double W = 3.7;
  Clip clip;
  clip.slice_id = "tree";
  clip.pixels = Image(4, 4);
  clip.physical_size_m = {W, 5.0};
  const Mesh m = make_cross(clip, Placement{});
  double worst = 0.0;
  for (int k = 0; k < 360; ++k) {
    const double theta = 2 * kPi * k / 360.0;
    const double want = W * std::max(std::abs(std::cos(theta)), std::abs(std::sin(theta)));
    const double got = oracle::silhouette_width(m.positions(), theta);
    worst = std::max(worst, std::abs(got - want));
    if (std::abs(got - want) > 1e-9 * W) c.fail("theta " + std::to_string(theta));
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "360 angles, max |error| %.3g m (W = %.1f)", worst, W);
  summary = buf;
}

// ---- 3 ----------------------------------------------------------------------

void matte_oracle(Check &c, std::string &summary) {
  gen::Rng rng(3);
  Image src(64, 64);
  for (auto &b : src.bytes()) b = static_cast<std::uint8_t>(rng());
  long pixels = 0;
  int degenerate = 0;
  for (int i = 0; i < 200; ++i) {
    SliceSpec spec;
    spec.slice_id = "p" + std::to_string(i);
    spec.mask = gen::star_polygon(rng, 64.0, 16);
    int covered = 0;
    for (int y = 0; y < 64; ++y) {
      for (int x = 0; x < 64; ++x) covered += oracle::pnpoly(spec.mask, x + 0.5, y + 0.5);
    }
    Clip clip;
    try {
      clip = feather_alpha(extract_clip(src, 100, spec), 0);
    } catch (const CompileError &e) {
      ++degenerate;
      c.expect(e.code() == "DEGENERATE_MASK" && covered == 0,
               spec.slice_id + ": threw " + e.code() + " with " + std::to_string(covered) +
                   " covered pixels");
      continue;
    }
    int inside = 0;
    bool same = true;
    for (int y = 0; y < clip.height(); ++y) {
      for (int x = 0; x < clip.width(); ++x) {
        const int sx = x + clip.origin_x, sy = y + clip.origin_y;
        const bool want = oracle::pnpoly(spec.mask, sx + 0.5, sy + 0.5);
        const Rgba p = clip.pixels.at(x, y);
        same &= (p.a == 255) == want && (p.a == 0) == !want;
        same &= p.r == src.at(sx, sy).r && p.g == src.at(sx, sy).g && p.b == src.at(sx, sy).b;
        inside += p.a == 255;
        ++pixels;
      }
    }
    c.expect(same, spec.slice_id + ": alpha or RGB differs from the oracle");
    c.expect(inside == covered, spec.slice_id + ": clip covers " + std::to_string(inside) +
                                    ", oracle " + std::to_string(covered));
  }
  summary = "200 polygons, " + std::to_string(pixels) + " pixels compared, " +
            std::to_string(degenerate) + " degenerate";
}

// ---- 4 ----------------------------------------------------------------------

std::vector<Vec3> rounded_sorted(std::vector<Vec3> pts) {
  for (auto &p : pts) {
    p = {std::round(p.x * 1e9) / 1e9 + 0.0, std::round(p.y * 1e9) / 1e9 + 0.0,
         std::round(p.z * 1e9) / 1e9 + 0.0};
  }
  std::sort(pts.begin(), pts.end(), [](Vec3 a, Vec3 b) {
    return std::tie(a.x, a.y, a.z) < std::tie(b.x, b.y, b.z);
  });
  return pts;
}

void architecture_fixture(Check &c, std::string &summary) {
  const auto lm = foguang_manifest();
  const ArchitectureSpec &hall = lm.manifest.architectures.at(0);
  const auto clips = extract_clips(lm.manifest, kFixtures, {"east_hall_wall", "east_hall_roof"},
                                   fixture_options());
  std::map<std::string, const Clip *> refs;
  for (const auto &[id, clip] : clips) refs[id] = &clip;

  const Mesh local = make_architecture(hall, refs);
  const Aabb b = bounds(local.positions());
  double total_h = 0.0, max_overhang = 0.0;
  for (const auto &s : hall.storeys) {
    total_h += s.height_m + s.roof.rise_m;
    max_overhang = std::max(max_overhang, s.roof.overhang_m);
  }
  const double sc = hall.placement.scale;
  const double dw = std::abs((b.max.x - b.min.x) - (hall.footprint_width_m + 2 * max_overhang) * sc);
  const double dh = std::abs((b.max.y - b.min.y) - total_h * sc);
  const double dd = std::abs((b.max.z - b.min.z) - (hall.footprint_depth_m + 2 * max_overhang) * sc);
  c.expect(dw <= 1e-9 && dh <= 1e-9 && dd <= 1e-9,
           "AABB off by " + std::to_string(std::max({dw, dh, dd})));

  ArchitectureSpec square = hall;
  square.footprint_depth_m = square.footprint_width_m;
  const Mesh sq = make_architecture(square, refs);
  Placement quarter;
  quarter.yaw = kPi / 2;
  c.expect(rounded_sorted(sq.positions()) == rounded_sorted(to_world(sq, quarter).positions()),
           "square footprint changes under a 90 degree turn");

  const ViewCalibration &cal = *hall.calibration;
  const Clip &front = clips.at(cal.slice_id);
  const Mesh world = to_world(local, hall.placement);
  const double score = projection_match_check(world, cal, front);
  c.expect(score >= kProjectionMatchThreshold, "score " + std::to_string(score) + " < 0.85");

  std::vector<Vec2> projected;
  for (const Vec3 &p : world.positions()) {
    if (auto q = oracle::project(cal.eye, cal.look_at, cal.vertical_fov, p)) projected.push_back(*q);
  }
  const double aspect = static_cast<double>(front.width()) / front.height();
  const double h = cal.image_rect.height;
  const std::array<double, 4> rect{cal.image_rect.center.x - h * aspect / 2,
                                   cal.image_rect.center.y - h / 2,
                                   cal.image_rect.center.x + h * aspect / 2,
                                   cal.image_rect.center.y + h / 2};
  const double raster = oracle::raster_iou(oracle::jarvis_hull(projected), rect, 512);
  c.expect(std::abs(raster - score) <= 1e-3,
           "analytic " + std::to_string(score) + " vs raster " + std::to_string(raster));
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "AABB error %.2g m, projection match %.5f, raster oracle %.5f (|diff| %.2g)",
                std::max({dw, dh, dd}), score, raster, std::abs(raster - score));
  summary = buf;
}

// ---- 5 ----------------------------------------------------------------------

void skybox_suite(Check &c, std::string &summary) {
  const auto lm = foguang_manifest();
  SkyboxSpec spec = *lm.manifest.skybox;
  spec.rhythm_seed = 42;
  const auto clips =
      extract_clips(lm.manifest, kFixtures, spec.horizon_slices, fixture_options());
  std::vector<const Clip *> band;
  for (const auto &id : spec.horizon_slices) band.push_back(&clips.at(id));

  const Skybox a = make_skybox(spec, band);
  const Skybox b = make_skybox(spec, band);
  for (int i = 0; i < 6; ++i) {
    c.expect(encode_png(a.faces[i]) == encode_png(b.faces[i]),
             std::string("face ") + kCubeFaceNames[i] + " differs between runs");
  }
  const int seam = oracle::cube_seam_diff(a.faces);
  c.expect(seam <= 2, "seam difference " + std::to_string(seam) + "/255");

  SkyboxSpec flat = spec;
  flat.band_height_frac = 0;
  flat.horizon_slices.clear();
  flat.sky_top = flat.sky_horizon = flat.ground = {90, 100, 110};
  const int flat_seam = oracle::cube_seam_diff(make_skybox(flat, {}).faces);
  c.expect(flat_seam == 0, "flat sky seam " + std::to_string(flat_seam));

  // Rows above the tallest possible band carry only the gradient.
  const int hr = horizon_row(spec.face_size_px);
  const int clear_rows =
      hr - static_cast<int>(std::ceil(band_height_px(spec) * spec.scale_jitter.max)) - 1;
  auto monotone = [&](const Skybox &sky, int rows) {
    for (CubeFace f : kSideRing) {
      const Image &img = sky.face(f);
      for (int x = 0; x < img.width(); ++x) {
        for (int y = 1; y < rows; ++y) {
          const Rgba p = img.at(x, y - 1), q = img.at(x, y);
          auto ok = [](int top, int hor, int prev, int cur) {
            return hor >= top ? cur >= prev : cur <= prev;
          };
          if (!ok(spec.sky_top.r, spec.sky_horizon.r, p.r, q.r) ||
              !ok(spec.sky_top.g, spec.sky_horizon.g, p.g, q.g) ||
              !ok(spec.sky_top.b, spec.sky_horizon.b, p.b, q.b)) {
            return false;
          }
        }
      }
    }
    return true;
  };
  c.expect(clear_rows > 1 && monotone(a, clear_rows), "gradient not monotone above the band");
  SkyboxSpec bare = spec;
  bare.band_height_frac = 0;
  c.expect(monotone(make_skybox(bare, {}), hr), "gradient not monotone without a band");
  summary = "face " + std::to_string(spec.face_size_px) + " px, seed 42 seam " +
            std::to_string(seam) + "/255, flat seam " + std::to_string(flat_seam) +
            ", deterministic";
}

// ---- 6 ----------------------------------------------------------------------

void fig2_reproduction(Check &c, std::string &summary) {
  const auto lm = foguang_manifest();
  const nv::NarrativeGraph &g = *lm.manifest.narrative;
  const auto diags = validate_graph(g);
  c.expect(diags.empty(), "graph has " + std::to_string(diags.size()) + " diagnostics");

  const auto script_bytes = read_file(kFixtures / "foguang_canonical.script");
  const auto script =
      *parse_script(std::string(script_bytes.begin(), script_bytes.end())).events;
  const nv::SimTrace t = nv::simulate(g, script);
  c.expect(t.completed(), "canonical script did not complete");
  c.expect(t.delivered().size() == 10 && g.knowledge_items.size() == 10,
           std::to_string(t.delivered().size()) + " items delivered");
  c.expect(t.stage_entries() == 6, "stage entries " + std::to_string(t.stage_entries()));

  const std::string task = "clean_hall";
  int variants = 0;
  for (std::size_t i = 0; i < script.size(); ++i) {
    const auto *grab = std::get_if<nv::trigger::Grab>(&script[i]);
    const auto *n = g.find_node(task);
    const auto &spots = std::get<nv::node::Task>(n->kind).target_ids;
    if (!grab || std::find(spots.begin(), spots.end(), grab->target_id) == spots.end()) continue;
    auto cut = script;
    cut.erase(cut.begin() + static_cast<std::ptrdiff_t>(i));
    const auto r = nv::simulate(g, cut);
    const auto *stuck = std::get_if<nv::outcome::Stuck>(&r.result);
    c.expect(stuck && stuck->at_node == task, "omitting event " + std::to_string(i) +
                                                  " did not leave the visitor stuck at the task");
    ++variants;
  }
  c.expect(variants == 3, std::to_string(variants) + " clean events in the canonical script");
  const auto count = nv::enumerate_completions(g, nv::kMaxEnumerationLength);
  c.expect(count == 1, "enumerate_completions = " + std::to_string(count));
  summary = "completed with " + std::to_string(t.delivered().size()) + " items, " +
            std::to_string(variants) + " omission variants stuck, " + std::to_string(count) +
            " completion";
}

// ---- 7 ----------------------------------------------------------------------

std::string current_node(const nv::SimTrace &t) {
  std::string at = t.start_node;
  for (const auto &s : t.steps) {
    if (s.node_entered) at = *s.node_entered;
  }
  return at;
}

void oracle_agreement(Check &c, std::string &summary) {
  gen::Rng rng(7);
  const std::vector<std::string> entities{"lamp", "scroll", "bell", "gate"};
  constexpr int kMaxLen = 12;
  const auto t0 = Clock::now();
  long scripts = 0, completed = 0, rejected_steps = 0;
  for (int gi = 0; gi < 500; ++gi) {
    const nv::NarrativeGraph g = gen::graph(rng, 8, entities);
    const auto comps = oracle::completions(g, kMaxLen);
    std::set<std::vector<std::size_t>> lib;
    nv::for_each_completion(g, kMaxLen, [&](const std::vector<std::size_t> &w) { lib.insert(w); });
    if (lib != std::set<std::vector<std::size_t>>(comps.begin(), comps.end())) {
      c.fail("graph " + std::to_string(gi) + ": enumerator disagrees with the stack search");
    }
    for (const auto &w : lib) {
      if (!nv::simulate(g, nv::script_for_path(g, w)).completed()) {
        c.fail("graph " + std::to_string(gi) + ": canonical script of a completion is rejected");
      }
    }
    for (int si = 0; si < 100; ++si) {
      const auto script = gen::script(rng, g, comps, entities, 16);
      const nv::SimTrace t = nv::simulate(g, script);
      const oracle::Replay r = oracle::replay(g, script);
      ++scripts;
      const std::string where = "graph " + std::to_string(gi) + " script " + std::to_string(si);
      if (t.completed() != r.completed) {
        c.fail(where + ": completed " + std::to_string(t.completed()) + " vs oracle " +
               std::to_string(r.completed));
        continue;
      }
      const bool fatal = std::holds_alternative<nv::outcome::RejectedEvent>(t.result);
      if (fatal != r.fatal) c.fail(where + ": fatal rejection disagrees");
      if (t.steps.size() != r.accepted.size()) {
        c.fail(where + ": consumed " + std::to_string(t.steps.size()) + " events vs oracle " +
               std::to_string(r.accepted.size()));
        continue;
      }
      for (std::size_t k = 0; k < t.steps.size(); ++k) {
        const bool acc = t.steps[k].status == nv::StepStatus::Accepted;
        rejected_steps += !acc;
        if (acc != r.accepted[k]) {
          c.fail(where + ": event " + std::to_string(k) + " accept/reject disagrees");
          break;
        }
      }
      if (current_node(t) != r.final_node) c.fail(where + ": final node disagrees");
      if (t.completed()) {
        ++completed;
        if (static_cast<int>(r.edges.size()) <= kMaxLen && !lib.count(r.edges)) {
          c.fail(where + ": accepted walk is not an enumerated completion");
        }
      }
    }
  }
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 30.0, "runtime " + std::to_string(elapsed) + " s");
  char buf[160];
  std::snprintf(buf, sizeof buf, "500 graphs x 100 scripts (%ld completed, %ld rejected events), %.2f s",
                completed, rejected_steps, elapsed);
  summary = buf;
}

// ---- 8 ----------------------------------------------------------------------

void end_to_end(Check &c, std::string &summary) {
  const auto lm = foguang_manifest();
  const Image source = read_image(kFixtures / lm.manifest.sources.at(0).image_path);
  const int width = downsample(source, 2).width();
  c.expect(width <= 8192, "downsampled width " + std::to_string(width));

  const auto t0 = Clock::now();
  const CompiledScene first = compile_scene(lm.manifest, kFixtures, fixture_options());
  const auto bytes_a = render_package(first.ir);
  const double once = seconds_since(t0);
  const CompiledScene second = compile_scene(lm.manifest, kFixtures, fixture_options());
  const auto bytes_b = render_package(second.ir);
  c.expect(bytes_a == bytes_b, "packages differ between runs");
  c.expect(once < 60.0, "compile took " + std::to_string(once) + " s");

  const fs::path out = fs::temp_directory_path() / "mural2scene_acceptance_pkg";
  fs::remove_all(out);
  const ScenePackage pkg = emit_gltf(first.ir, out);
  const auto diags = validate_gltf_structure(pkg.gltf);
  for (const auto &d : diags) c.fail(format_diagnostic(d));
  std::size_t total = 0;
  for (const auto &[name, b] : bytes_a) total += b.size();
  fs::remove_all(out);
  char buf[160];
  std::snprintf(buf, sizeof buf, "source %d px wide, %zu files / %zu bytes identical, compile %.2f s",
                width, bytes_a.size(), total, once);
  summary = buf;
}

// ---- 9 ----------------------------------------------------------------------

std::string mutate(gen::Rng &rng, std::string doc) {
  const int edits = gen::uniform_int(rng, 1, 6);
  for (int e = 0; e < edits && !doc.empty(); ++e) {
    const std::size_t at = static_cast<std::size_t>(gen::uniform_int(rng, 0, static_cast<int>(doc.size()) - 1));
    switch (gen::uniform_int(rng, 0, 4)) {
      case 0: doc.erase(at, static_cast<std::size_t>(gen::uniform_int(rng, 1, 20))); break;
      case 1: doc[at] = static_cast<char>(rng()); break;
      case 2: doc.insert(at, 1, "{}[],:\"-0123456789e.\\/"[rng() % 22]); break;
      case 3: doc.resize(at); break;
      default: doc.insert(at, doc.substr(at / 2, static_cast<std::size_t>(gen::uniform_int(rng, 1, 40)))); break;
    }
  }
  return doc;
}

void fuzz_and_round_trip(Check &c, std::string &summary) {
  gen::Rng rng(9);
  int accepted = 0;
  for (int i = 0; i < 10000; ++i) {
    std::string input;
    if (i % 2 == 0) {
      input = gen::bytes(rng, 512);
    } else {
      input = mutate(rng, serialize_manifest(gen::manifest(rng)));
    }
    try {
      const ManifestParse p = parse_manifest(input, "fuzz");
      if (p.ok()) {
        ++accepted;
        validate_manifest(*p.manifest);
      } else if (p.diagnostics.empty() || !has_errors(p.diagnostics)) {
        c.fail("input " + std::to_string(i) + ": rejected without an error diagnostic");
      } else {
        for (const auto &d : p.diagnostics) {
          if (d.is_error() && !d.loc.known()) {
            c.fail("input " + std::to_string(i) + ": " + d.code + " has no location");
            break;
          }
        }
      }
    } catch (const std::exception &e) {
      c.fail("input " + std::to_string(i) + ": threw " + e.what());
    }
  }

  int valid = 0, attempts = 0;
  while (valid < 500 && attempts < 5000) {
    ++attempts;
    const SceneManifest m = gen::manifest(rng);
    if (has_errors(validate_manifest(m))) continue;
    ++valid;
    const std::string doc = serialize_manifest(m);
    const ManifestParse p = parse_manifest(doc);
    if (!p.ok()) {
      c.fail("manifest " + std::to_string(valid) + " failed to reparse: " +
             format_diagnostic(p.diagnostics.at(0)));
      continue;
    }
    if (!(*p.manifest == m)) c.fail("manifest " + std::to_string(valid) + " changed in round trip");
    if (serialize_manifest(*p.manifest) != doc) {
      c.fail("manifest " + std::to_string(valid) + " serializes differently after reparse");
    }
  }
  c.expect(valid == 500, "only " + std::to_string(valid) + " valid manifests generated");
  summary = "10000 fuzz inputs (" + std::to_string(accepted) + " parsed), " +
            std::to_string(valid) + " round trips";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char *name;
    std::function<void(Check &, std::string &)> run;
  };
  const std::vector<Criterion> criteria{
      {1, "billboard invariant", billboard_invariant},
      {2, "cross silhouette", cross_silhouette},
      {3, "matte oracle equivalence", matte_oracle},
      {4, "architecture fixture", architecture_fixture},
      {5, "skybox", skybox_suite},
      {6, "narrative walkthrough", fig2_reproduction},
      {7, "narrative oracle agreement", oracle_agreement},
      {8, "end-to-end determinism", end_to_end},
      {9, "fuzz totality and round trip", fuzz_and_round_trip},
  };
  int failures = 0;
  for (const auto &cr : criteria) {
    Check c;
    std::string summary;
    const auto t0 = Clock::now();
    try {
      cr.run(c, summary);
    } catch (const CompileError &e) {
      c.fail(std::string("CompileError: ") + e.what());
    } catch (const std::exception &e) {
      c.fail(std::string("exception: ") + e.what());
    }
    failures += !c.ok;
    std::printf("%s %d %s: %s [%.2f s]%s\n", c.ok ? "PASS" : "FAIL", cr.id, cr.name,
                summary.c_str(), seconds_since(t0), c.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
