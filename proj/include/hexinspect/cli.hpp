#pragma once

// The hexinspect command line: info, quality, extract, render, batch and
// status. `run` is the whole program; main() only forwards to it.

#include <charconv>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hexinspect/mesh_io.hpp"
#include "hexinspect/pipeline.hpp"

namespace hexinspect::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,     ///< anything not covered below
  kUsage = 2,       ///< bad command line
  kIo = 3,          ///< unreadable or unwritable file
  kParse = 4,       ///< malformed mesh, status, PNG or archive
  kValidation = 5,  ///< well-formed input with out-of-domain values
  kPartial = 6,     ///< batch finished but some models failed
};

namespace detail {

inline std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline double to_double(const std::string& s, const std::string& flag) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size() || !std::isfinite(v))
    throw ValidationError("--" + flag + ": '" + s + "' is not a finite number");
  return v;
}

inline std::array<double, 3> triple(const std::string& text, const std::string& flag) {
  const auto parts = split(text);
  if (parts.size() != 3) throw ValidationError("--" + flag + " expects three comma-separated numbers");
  return {to_double(parts[0], flag), to_double(parts[1], flag), to_double(parts[2], flag)};
}

inline Vec3 vec(const std::string& text, const std::string& flag) {
  const auto t = triple(text, flag);
  return {t[0], t[1], t[2]};
}

inline Rgb rgb(const std::string& text, const std::string& flag) {
  const auto t = triple(text, flag);
  return {t[0], t[1], t[2]};
}

inline CellId cell_id(const std::string& s, const std::string& flag) {
  unsigned long long v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size() || v >= kInvalid)
    throw ValidationError("--" + flag + ": '" + s + "' is not a cell id");
  return static_cast<CellId>(v);
}

inline std::set<CellId> ids(const std::string& text, const std::string& flag) {
  std::set<CellId> out;
  if (text.empty()) return out;
  for (const auto& p : split(text)) out.insert(cell_id(p, flag));
  return out;
}

inline bool boolean(const std::string& s, const std::string& flag) {
  if (s == "true" || s == "1" || s == "on" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "off" || s == "no") return false;
  throw ValidationError("--" + flag + ": expected true or false, got '" + s + "'");
}

}  // namespace detail

/// One optional value per status field, filled from the command line and
/// applied over a base status (flags win).
struct Overrides {
  std::optional<std::string> status_file;
  std::optional<std::string> mesh_name;
  std::optional<std::string> camera_direction, camera_up, camera_target;
  std::optional<double> camera_distance, fov_deg;
  std::optional<std::string> plane_enabled, plane_normal;
  std::optional<double> plane_offset;
  std::optional<long long> peel;
  std::optional<std::string> metric, quality_enabled;
  std::optional<double> quality_threshold, quality_threshold_raw;
  std::optional<std::string> colormap, mode;
  std::optional<double> mode_parameter, silhouette_alpha;
  std::optional<int> regularization;
  std::optional<std::string> irregular, xray, include_boundary;
  std::optional<std::string> dug, undug, isolated;
  std::optional<std::string> outer, inner, background, silhouette, wireframe, valence3, valence5, other;
  std::optional<std::string> lighting;
  std::optional<long long> probes;
  std::optional<std::uint64_t> seed;
  std::optional<int> width, height;

  void bind(CLI::App& app) {
    app.add_option("--status", status_file, "Status document (JSON, or a PNG with an embedded status)");
    app.add_option("--mesh-name", mesh_name, "Name recorded in the status");
    app.add_option("--camera-direction", camera_direction, "View direction x,y,z");
    app.add_option("--camera-up", camera_up, "Up vector x,y,z");
    app.add_option("--camera-target", camera_target, "Look-at point x,y,z");
    app.add_option("--camera-distance", camera_distance, "Eye distance; 0 frames the mesh");
    app.add_option("--fov-deg", fov_deg, "Vertical field of view in degrees");
    app.add_option("--plane-enabled", plane_enabled, "Enable the cutting plane (true/false)");
    app.add_option("--plane-normal", plane_normal, "Cutting plane normal x,y,z (enables the plane)");
    app.add_option("--plane-offset", plane_offset, "Cutting plane offset (enables the plane)");
    app.add_option("--peel", peel, "Hide cells shallower than this peeling depth");
    app.add_option("--metric", metric, "Quality metric id");
    app.add_option("--quality-enabled", quality_enabled, "Enable the quality filter (true/false)");
    app.add_option("--quality-threshold", quality_threshold, "Normalized threshold in [0,1] (enables the filter)");
    app.add_option("--quality-threshold-raw", quality_threshold_raw, "Threshold in metric units (enables the filter)");
    app.add_option("--colormap", colormap, "none, parula, jet or redblue");
    app.add_option("--mode", mode, "Surface mode: flat, fissure or rounded");
    app.add_option("--mode-parameter", mode_parameter, "Wire opacity, gap or rounding radius");
    app.add_option("--silhouette-alpha", silhouette_alpha, "Context silhouette opacity");
    app.add_option("--regularization", regularization, "Regularization rounds (0-5)");
    app.add_option("--irregular", irregular, "Singular structure: off, wire, barbed or paper");
    app.add_option("--xray", xray, "Draw singular structure through the surface (true/false)");
    app.add_option("--include-boundary", include_boundary, "Include boundary singularities (true/false)");
    app.add_option("--dug", dug, "Comma-separated cells hidden by hand");
    app.add_option("--undug", undug, "Comma-separated cells restored by hand");
    app.add_option("--isolated", isolated, "Cell shown alone, or 'none'");
    app.add_option("--outer-color", outer, "r,g,b in [0,1]");
    app.add_option("--inner-color", inner, "r,g,b in [0,1]");
    app.add_option("--background-color", background, "r,g,b in [0,1]");
    app.add_option("--silhouette-color", silhouette, "r,g,b in [0,1]");
    app.add_option("--wireframe-color", wireframe, "r,g,b in [0,1]");
    app.add_option("--valence3-color", valence3, "r,g,b in [0,1]");
    app.add_option("--valence5-color", valence5, "r,g,b in [0,1]");
    app.add_option("--other-color", other, "r,g,b in [0,1]");
    app.add_option("--lighting", lighting, "ao or direct");
    app.add_option("--probes", probes, "Ambient occlusion probe count");
    app.add_option("--seed", seed, "Probe generation seed");
    app.add_option("--width", width, "Image width");
    app.add_option("--height", height, "Image height");
  }

  /// Threshold field the user set explicitly, if any.
  [[nodiscard]] ThresholdSource threshold_source() const {
    if (quality_threshold_raw) return ThresholdSource::Raw;
    if (quality_threshold) return ThresholdSource::Normalized;
    return ThresholdSource::Auto;
  }

  [[nodiscard]] Status apply(Status s) const {
    using namespace detail;
    if (mesh_name) s.mesh = *mesh_name;
    if (camera_direction) s.camera.direction = vec(*camera_direction, "camera-direction");
    if (camera_up) s.camera.up = vec(*camera_up, "camera-up");
    if (camera_target) s.camera.target = vec(*camera_target, "camera-target");
    if (camera_distance) s.camera.distance = *camera_distance;
    if (fov_deg) s.camera.fov_deg = *fov_deg;
    if (plane_normal) {
      const Vec3 n = vec(*plane_normal, "plane-normal");
      if (norm(n) == 0.0) throw ValidationError("--plane-normal must be non-zero");
      s.plane.normal = normalized(n);
      s.plane.enabled = true;
    }
    if (plane_offset) {
      s.plane.offset = *plane_offset;
      s.plane.enabled = true;
    }
    if (plane_enabled) s.plane.enabled = boolean(*plane_enabled, "plane-enabled");
    if (peel) {
      if (*peel < 0 || *peel > 0xFFFFFFFFLL) throw ValidationError("--peel must be >= 0 (got " + std::to_string(*peel) + ")");
      s.peel_min_depth = static_cast<std::uint32_t>(*peel);
    }
    if (metric) s.quality.metric = parse_metric(*metric);
    if (quality_threshold) {
      s.quality.threshold = *quality_threshold;
      s.quality.enabled = true;
    }
    if (quality_threshold_raw) {
      s.quality.threshold_raw = *quality_threshold_raw;
      s.quality.enabled = true;
    }
    if (quality_enabled) s.quality.enabled = boolean(*quality_enabled, "quality-enabled");
    if (colormap) s.colormap = parse_colormap(*colormap);
    if (mode) {
      s.mode = parse_mode(*mode);
      if (!mode_parameter) s.mode_parameter = default_mode_parameter(s.mode);
    }
    if (mode_parameter) s.mode_parameter = *mode_parameter;
    if (silhouette_alpha) s.silhouette_alpha = *silhouette_alpha;
    if (regularization) s.regularization = *regularization;
    if (irregular) s.irregular.mode = parse_irregular_mode(*irregular);
    if (xray) s.irregular.xray = boolean(*xray, "xray");
    if (include_boundary) s.irregular.include_boundary = boolean(*include_boundary, "include-boundary");
    if (dug) s.dug = ids(*dug, "dug");
    if (undug) s.undug = ids(*undug, "undug");
    if (isolated) {
      if (*isolated == "none")
        s.isolated.reset();
      else
        s.isolated = cell_id(*isolated, "isolated");
    }
    const auto color = [](const std::optional<std::string>& v, Rgb& dst, const char* flag) {
      if (v) dst = rgb(*v, flag);
    };
    color(outer, s.colors.outer, "outer-color");
    color(inner, s.colors.inner, "inner-color");
    color(background, s.colors.background, "background-color");
    color(silhouette, s.colors.silhouette, "silhouette-color");
    color(wireframe, s.colors.wireframe, "wireframe-color");
    color(valence3, s.colors.valence3, "valence3-color");
    color(valence5, s.colors.valence5, "valence5-color");
    color(other, s.colors.other, "other-color");
    if (lighting) s.lighting = parse_lighting(*lighting);
    if (probes) {
      if (*probes < 1 || *probes > (1 << 20)) throw ValidationError("--probes must lie in [1, 1048576]");
      s.ao.probes = static_cast<std::uint32_t>(*probes);
    }
    if (seed) s.ao.seed = *seed;
    if (width) s.width = *width;
    if (height) s.height = *height;
    validate(s);
    return s;
  }

  /// Base status (file or defaults) with the flags applied on top.
  [[nodiscard]] Status resolve(std::ostream& err) const {
    Status base;
    if (status_file) {
      base = run_stage("status", [&] {
        const std::string text = read_file(*status_file);
        const Bytes bytes = to_bytes(text);
        if (is_png(bytes)) {
          auto s = extract_png(bytes);
          if (!s) throw FormatError("'" + *status_file + "' carries no embedded status");
          return *s;
        }
        auto parsed = parse_status(text);
        for (const auto& w : parsed.warnings) err << "warning: " << w << "\n";
        return parsed.status;
      });
    }
    return run_stage("options", [&] { return apply(std::move(base)); });
  }
};

namespace detail {

inline HexMesh load(const std::string& path, std::ostream& err) {
  HexMesh m = run_stage("parse", [&] { return load_mesh_file(path); });
  for (const auto& w : m.warnings) err << "warning: " << path << ": " << w << "\n";
  m.name = std::filesystem::path(path).filename().string();
  return m;
}

inline void emit(const std::string& path, std::string_view data, std::ostream& out) {
  if (path.empty() || path == "-")
    out << data;
  else
    run_stage("write", [&] { write_file(path, data); });
}

inline nlohmann::ordered_json info_report(const HexMesh& mesh) {
  const GMap g = run_stage("connectivity", [&] { return GMap::build(mesh); });
  std::size_t bv = 0, be = 0, bf = 0;
  for (const auto& v : g.vertices()) bv += v.boundary && v.cell_count > 0;
  for (const auto& e : g.edges()) be += e.boundary;
  for (const auto& f : g.faces()) bf += f.boundary;
  std::size_t ie = 0, iv = 0, ibe = 0, ibv = 0;
  const auto irr = irregular_elements(g, true);
  for (const auto& e : irr.edges) ++(e.boundary ? ibe : ie);
  for (const auto& v : irr.vertices) ++(v.boundary ? ibv : iv);
  std::size_t used = 0;
  for (const auto& v : g.vertices()) used += v.cell_count > 0;
  nlohmann::ordered_json j;
  j["mesh"] = mesh.name;
  j["vertices"] = used;
  j["edges"] = g.edges().size();
  j["faces"] = g.faces().size();
  j["cells"] = g.cell_count();
  j["boundary"] = {{"vertices", bv}, {"edges", be}, {"faces", bf}};
  j["max_peel_depth"] = max_depth(peel_depths(g));
  j["irregular"] = {{"edges", ie}, {"vertices", iv}, {"boundary_edges", ibe}, {"boundary_vertices", ibv}};
  return j;
}

inline nlohmann::ordered_json summary_json(const QualityField& field, std::size_t bins) {
  const auto s = summary(field);
  const auto& spec = metric_spec(field.metric);
  nlohmann::ordered_json j;
  j["metric"] = std::string(spec.name);
  j["name"] = std::string(spec.long_name);
  j["cells"] = s.count;
  if (s.empty) {
    j["min"] = j["max"] = j["avg"] = nullptr;
  } else {
    j["min"] = s.min;
    j["max"] = s.max;
    j["avg"] = s.avg;
  }
  if (spec.acceptable)
    j["acceptable"] = {spec.acceptable->lo, spec.acceptable->hi};
  else
    j["acceptable"] = nullptr;
  j["below_acceptable"] = s.below_acceptable;
  j["bins"] = bins;
  return j;
}

/// Exit code for an error, judged by its innermost cause.
inline int classify(const std::exception& e) {
  try {
    rethrow_innermost(e);
    throw;
  } catch (const IoError&) {
    return kIo;
  } catch (const ParseError&) {
    return kParse;
  } catch (const FormatError&) {
    return kParse;
  } catch (const ArchiveError&) {
    return kParse;
  } catch (const StructureError&) {
    return kParse;
  } catch (const ValidationError&) {
    return kValidation;
  } catch (...) {
    return kFailure;
  }
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  using namespace detail;
  CLI::App app{"Hexahedral mesh inspection: reports, surfaces and reproducible renderings", "hexinspect"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "hexinspect 1.0");

  std::string input, output, csv, summary_path, svg, orientation = "vertical";
  std::size_t bins = 100;
  unsigned jobs = 1;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> metric, colormap;

  auto* info = app.add_subcommand("info", "Counts, boundary, peeling depth and singular structure");
  info->add_option("mesh", input, "Mesh file (.mesh or .vtk)")->required();
  info->add_option("--seed", seed, "Accepted for uniformity; unused");

  auto* quality = app.add_subcommand("quality", "Quality histogram (CSV) and summary (JSON)");
  quality->add_option("mesh", input, "Mesh file")->required();
  quality->add_option("--metric", metric, "Metric id")->default_str("SJ");
  quality->add_option("--bins", bins, "Histogram bins")->capture_default_str();
  quality->add_option("--csv", csv, "Histogram CSV path (default: stdout)");
  quality->add_option("--summary", summary_path, "Summary JSON path (default: stdout)");
  quality->add_option("--svg", svg, "Also write the histogram as SVG");
  quality->add_option("--colormap", colormap, "Colormap of the SVG bars");
  quality->add_option("--orientation", orientation, "SVG orientation: vertical or horizontal")->capture_default_str();
  quality->add_option("--seed", seed, "Accepted for uniformity; unused");

  Overrides extract_flags, render_flags, batch_flags;
  auto* extract_cmd = app.add_subcommand("extract", "Write the visible surface as OBJ or PLY");
  extract_cmd->add_option("mesh", input, "Mesh file")->required();
  extract_cmd->add_option("-o,--output", output, "Output .obj or .ply")->required();
  extract_flags.bind(*extract_cmd);

  auto* render_cmd = app.add_subcommand("render", "Render a PNG with the status embedded");
  render_cmd->add_option("mesh", input, "Mesh file")->required();
  render_cmd->add_option("-o,--output", output, "Output .png")->required();
  render_cmd->add_option("--histogram", svg, "Also write the quality histogram SVG");
  render_cmd->add_option("--jobs", jobs, "Worker threads")->capture_default_str();
  render_flags.bind(*render_cmd);

  auto* batch_cmd = app.add_subcommand("batch", "Render every model of a zip archive");
  batch_cmd->add_option("archive", input, "Input .zip")->required();
  batch_cmd->add_option("-o,--output", output, "Output .zip")->required();
  batch_cmd->add_option("--jobs", jobs, "Models rendered in parallel")->capture_default_str();
  batch_flags.bind(*batch_cmd);

  auto* status_cmd = app.add_subcommand("status", "Print the status embedded in a PNG");
  status_cmd->add_option("png", input, "Rendered PNG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (info->parsed()) {
      out << info_report(load(input, err)).dump(2) << "\n";
      return kOk;
    }
    if (quality->parsed()) {
      const Metric m = run_stage("options", [&] { return parse_metric(metric.value_or("SJ")); });
      const Orientation o = run_stage("options", [&] {
        if (orientation == "vertical") return Orientation::Vertical;
        if (orientation == "horizontal") return Orientation::Horizontal;
        throw ValidationError("orientation must be vertical or horizontal");
      });
      const Colormap map = run_stage("options", [&] { return parse_colormap(colormap.value_or("parula")); });
      const HexMesh mesh = load(input, err);
      const QualityField field = run_stage("quality", [&] { return evaluate_metric(mesh, m); });
      const Histogram h = run_stage("quality", [&] { return histogram(field, bins, o); });
      emit(csv, histogram_csv(h), out);
      emit(summary_path, summary_json(field, bins).dump(2) + "\n", out);
      if (!svg.empty()) emit(svg, render_histogram(h, map), out);
      return kOk;
    }
    if (extract_cmd->parsed()) {
      const Status s = extract_flags.resolve(err);
      const std::string ext = run_stage("options", [&] {
        const std::string e = io_detail::extension_of(output);
        if (e != "obj" && e != "ply") throw ValidationError("output must end in .obj or .ply");
        return e;
      });
      const HexMesh mesh = load(input, err);
      const GMap g = run_stage("connectivity", [&] { return GMap::build(mesh); });
      const auto field = run_stage("quality", [&] { return evaluate_metric(mesh, s.quality.metric); });
      const Status r = resolve_threshold(s, field, extract_flags.threshold_source());
      const auto f = run_stage("filters", [&] { return compose(g, filter_params(r), peel_depths(g), field.normalized); });
      ExtractionOptions eo{r.mode, r.mode_parameter, {r.colors.outer, r.colors.inner}, r.colors.wireframe};
      auto surf = run_stage("extract", [&] { return extract(g, f.hidden, eo); });
      if (r.colormap != Colormap::None) apply_cell_colors(surf.surface, apply_colormap(field.normalized, r.colormap));
      emit(output, write_surface(surf.surface, ext == "obj" ? SurfaceFormat::Obj : SurfaceFormat::Ply), out);
      return kOk;
    }
    if (render_cmd->parsed()) {
      const Status s = render_flags.resolve(err);
      const HexMesh mesh = load(input, err);
      const Rendering r = render_mesh(mesh, s, jobs, render_flags.threshold_source());
      emit(output, as_text(r.png), out);
      if (!svg.empty()) emit(svg, histogram_svg(r), out);
      return kOk;
    }
    if (batch_cmd->parsed()) {
      const Status s = batch_flags.resolve(err);
      const Bytes zip = run_stage("read", [&] { return to_bytes(read_file(input)); });
      const BatchResult r = batch(zip, s, jobs, batch_flags.threshold_source());
      emit(output, as_text(r.archive), out);
      for (const auto& e : r.errors) err << "error: " << e << "\n";
      return r.partial() ? kPartial : kOk;
    }
    if (status_cmd->parsed()) {
      const auto s =
          run_stage("status", [&] { return extract_png(to_bytes(read_file(input))); });
      if (!s) {
        err << "hexinspect: '" << input << "' has no embedded status\n";
        return kFailure;
      }
      out << serialize(*s);
      return kOk;
    }
  } catch (const Error& e) {
    err << "hexinspect: error: " << e.what() << "\n";
    return classify(e);
  } catch (const std::exception& e) {
    err << "hexinspect: error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"hexinspect"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace hexinspect::cli
