#pragma once

// End-to-end rendering of a mesh under a status document, and batch
// rendering of archives.

#include <algorithm>
#include <atomic>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "hexinspect/ao.hpp"
#include "hexinspect/colormap.hpp"
#include "hexinspect/filters.hpp"
#include "hexinspect/gmap.hpp"
#include "hexinspect/histogram_svg.hpp"
#include "hexinspect/mesh_io.hpp"
#include "hexinspect/png.hpp"
#include "hexinspect/quality.hpp"
#include "hexinspect/raster.hpp"
#include "hexinspect/status.hpp"
#include "hexinspect/surface.hpp"
#include "hexinspect/zip.hpp"

namespace hexinspect {

/// Wraps a library error with the pipeline stage it came from; the original
/// error is nested (std::rethrow_if_nested recovers it).
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what) : Error(stage + ": " + what), stage_(std::move(stage)) {}
  [[nodiscard]] const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

template <class F>
auto run_stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    std::throw_with_nested(StageError(name, e.what()));
  }
}

/// The innermost error of a possibly nested chain.
inline void rethrow_innermost(const std::exception& e) {
  try {
    std::rethrow_if_nested(e);
  } catch (const std::exception& inner) {
    rethrow_innermost(inner);
    throw;
  }
}

struct Rendering {
  Status status;  ///< as embedded: thresholds reconciled, mesh name filled in
  FilterState filter;
  QualityField quality;
  Scene scene;
  Camera camera;  ///< framed
  Image image;
  Bytes png;
};

/// Builds the scene the status describes over an already-built map.
inline Scene build_scene(const GMap& g, const Status& s, const FilterState& f, const QualityField& q,
                         unsigned threads = 0) {
  Scene scene;
  ExtractionOptions eo;
  eo.mode = s.mode;
  eo.parameter = s.mode_parameter;
  eo.colors = {s.colors.outer, s.colors.inner};
  eo.wire_color = s.colors.wireframe;
  auto extracted = extract(g, f.hidden, eo);
  scene.surface = std::move(extracted.surface);
  scene.wireframe = std::move(extracted.wireframe);
  if (s.colormap != Colormap::None) apply_cell_colors(scene.surface, apply_colormap(q.normalized, s.colormap));
  if (s.lighting == Lighting::Ao && !scene.surface.empty())
    scene.surface.ao = compute_ao(scene.surface, probe_directions(s.ao.probes, s.ao.seed), threads);
  if (s.silhouette_alpha > 0.0) scene.silhouette = silhouette_mesh(g, f.hidden, s.colors.silhouette);
  scene.irregular = irregular_geometry(g, f.hidden, s.irregular.mode, s.irregular.xray, s.irregular.include_boundary,
                                       {s.colors.valence3, s.colors.valence5, s.colors.other});
  return scene;
}

inline RenderOptions render_options(const Status& s) {
  RenderOptions o;
  o.lighting = s.lighting;
  o.background = s.colors.background;
  o.silhouette = s.colors.silhouette;
  o.silhouette_alpha = s.silhouette_alpha;
  o.width = s.width;
  o.height = s.height;
  return o;
}

/// map -> quality -> filters -> extraction -> AO -> raster -> PNG with status.
/// Errors surface as StageError naming the failing stage.
inline Rendering render_mesh(const HexMesh& mesh, Status status, unsigned threads = 0,
                             ThresholdSource source = ThresholdSource::Auto) {
  run_stage("status", [&] { validate(status); });
  if (status.mesh.empty()) status.mesh = mesh.name;
  const GMap g = run_stage("connectivity", [&] { return GMap::build(mesh); });
  const auto depths = peel_depths(g);
  Rendering r;
  r.quality = run_stage("quality", [&] { return evaluate_metric(mesh, status.quality.metric); });
  r.status = resolve_threshold(std::move(status), r.quality, source);
  r.filter = run_stage("filters", [&] { return compose(g, filter_params(r.status), depths, r.quality.normalized); });
  r.scene = run_stage("extract", [&] { return build_scene(g, r.status, r.filter, r.quality, threads); });
  r.camera = frame(r.status.camera, g.bounds());
  r.image = run_stage("raster", [&] { return render(r.scene, r.camera, render_options(r.status)); });
  r.png = run_stage("snapshot", [&] { return embed_png(encode_png(r.image), r.status); });
  return r;
}

/// Histogram legend of the rendering's metric.
inline std::string histogram_svg(const Rendering& r) {
  return render_histogram(histogram(r.quality), r.status.colormap);
}

/// Entry name without directories or extension.
inline std::string model_stem(const std::string& entry) {
  const auto slash = entry.find_last_of("/\\");
  std::string s = slash == std::string::npos ? entry : entry.substr(slash + 1);
  const auto dot = s.find_last_of('.');
  return dot == std::string::npos ? s : s.substr(0, dot);
}

struct BatchResult {
  Bytes archive;
  std::size_t rendered = 0;
  std::vector<std::string> errors;  ///< one line per failed model
  [[nodiscard]] bool partial() const { return !errors.empty(); }
};

/// One screenshot and one histogram per model, rendered with shared settings.
/// Failed models are listed in errors.txt; the others are still produced.
inline BatchResult batch(std::span<const std::uint8_t> zip, const Status& shared, unsigned jobs = 1,
                         ThresholdSource source = ThresholdSource::Auto) {
  auto contents = run_stage("archive", [&] { return read_archive(zip); });
  const std::size_t n = contents.meshes.size();
  std::vector<std::vector<ZipEntry>> produced(n);
  std::vector<std::string> failed(n);
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      const auto& m = contents.meshes[i];
      try {
        Status s = shared;
        s.mesh = model_stem(m.name);
        // Each worker casts its own rays; nested threading would oversubscribe.
        const auto r = render_mesh(m.mesh, s, jobs > 1 ? 1 : 0, source);
        produced[i].push_back({s.mesh + ".png", r.png});
        produced[i].push_back({s.mesh + "-hist.svg", to_bytes(histogram_svg(r))});
      } catch (const Error& e) {
        failed[i] = m.name + ": " + e.what();
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(1, n))));
  if (jobs == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(work);
  }

  BatchResult out;
  std::vector<ZipEntry> entries;
  for (const auto& f : contents.failures) out.errors.push_back(f.name + ": " + f.error);
  for (std::size_t i = 0; i < n; ++i) {
    if (!failed[i].empty()) out.errors.push_back(failed[i]);
    if (!produced[i].empty()) ++out.rendered;
    for (auto& e : produced[i]) entries.push_back(std::move(e));
  }
  std::sort(out.errors.begin(), out.errors.end());
  if (!out.errors.empty()) {
    std::string log;
    for (const auto& e : out.errors) log += e + "\n";
    entries.push_back({"errors.txt", to_bytes(log)});
  }
  out.archive = zip_write(entries);
  return out;
}

}  // namespace hexinspect
