#pragma once

// The status document: every setting needed to reproduce a rendering, its
// canonical JSON text, a tolerant parser, and PNG embedding.

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "hexinspect/ao.hpp"
#include "hexinspect/colormap.hpp"
#include "hexinspect/errors.hpp"
#include "hexinspect/filters.hpp"
#include "hexinspect/numfmt.hpp"
#include "hexinspect/png.hpp"
#include "hexinspect/quality.hpp"
#include "hexinspect/raster.hpp"
#include "hexinspect/surface.hpp"

namespace hexinspect {

inline constexpr int kStatusSchemaVersion = 1;
inline constexpr std::string_view kStatusKeyword = "hexalab-status";

/// Status text carrying a schema version this build cannot read.
class VersionError : public ValidationError {
 public:
  explicit VersionError(long long found)
      : ValidationError("unsupported status schema version " + std::to_string(found) + " (this build reads " +
                        std::to_string(kStatusSchemaVersion) + ")"),
        found_(found) {}
  [[nodiscard]] long long found() const { return found_; }

 private:
  long long found_;
};

struct QualitySettings {
  Metric metric = Metric::SJ;
  bool enabled = false;
  double threshold = 1.0;      ///< normalized; cells at or above it are hidden
  double threshold_raw = 1.0;  ///< the same threshold in metric units
  friend bool operator==(const QualitySettings&, const QualitySettings&) = default;
};

struct IrregularSettings {
  IrregularMode mode = IrregularMode::Off;
  bool xray = false;
  bool include_boundary = false;
  friend bool operator==(const IrregularSettings&, const IrregularSettings&) = default;
};

struct ColorSettings {
  Rgb outer{1.0, 1.0, 1.0};
  Rgb inner{1.0, 0.85, 0.2};
  Rgb background{1.0, 1.0, 1.0};
  Rgb silhouette{0.6, 0.6, 0.65};
  Rgb wireframe{0.0, 0.0, 0.0};
  Rgb valence3{0.9, 0.1, 0.1};
  Rgb valence5{0.1, 0.7, 0.1};
  Rgb other{0.1, 0.2, 0.9};
  friend bool operator==(const ColorSettings&, const ColorSettings&) = default;
};

struct AoSettings {
  std::uint32_t probes = kDefaultProbeCount;
  std::uint64_t seed = 0;
  friend bool operator==(const AoSettings&, const AoSettings&) = default;
};

struct Status {
  int schema_version = kStatusSchemaVersion;
  std::string mesh;
  Camera camera;
  Plane plane;
  std::uint32_t peel_min_depth = 0;
  QualitySettings quality;
  Colormap colormap = Colormap::None;
  ExtractionMode mode = ExtractionMode::Flat;
  double mode_parameter = 0.25;
  double silhouette_alpha = 0.2;
  int regularization = 0;
  IrregularSettings irregular;
  std::set<CellId> dug;
  std::set<CellId> undug;
  std::optional<CellId> isolated;
  ColorSettings colors;
  Lighting lighting = Lighting::Ao;
  AoSettings ao;
  int width = 800;
  int height = 600;
  friend bool operator==(const Status&, const Status&) = default;
};

/// Domain checks that do not need the mesh.
inline void validate(const Status& s) {
  const auto finite3 = [](const Vec3& v, const char* what) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z))
      throw ValidationError(std::string(what) + " must be finite");
  };
  finite3(s.camera.direction, "camera.direction");
  finite3(s.camera.up, "camera.up");
  finite3(s.camera.target, "camera.target");
  finite3(s.plane.normal, "plane.normal");
  if (norm(s.camera.direction) == 0.0) throw ValidationError("camera.direction must be non-zero");
  if (norm(cross(normalized(s.camera.direction), s.camera.up)) < 1e-9)
    throw ValidationError("camera.up must not be parallel to camera.direction");
  if (!(s.camera.distance >= 0.0) || !std::isfinite(s.camera.distance))
    throw ValidationError("camera.distance must be finite and >= 0");
  if (!(s.camera.fov_deg > 0.0 && s.camera.fov_deg < 180.0)) throw ValidationError("camera.fov_deg must lie in (0, 180)");
  if (std::abs(norm(s.plane.normal) - 1.0) > 1e-9) throw ValidationError("plane.normal must have unit length");
  if (!std::isfinite(s.plane.offset)) throw ValidationError("plane.offset must be finite");
  if (!(s.quality.threshold >= 0.0 && s.quality.threshold <= 1.0))
    throw ValidationError("quality.threshold must lie in [0, 1]");
  if (!std::isfinite(s.quality.threshold_raw)) throw ValidationError("quality.threshold_raw must be finite");
  validate_mode_parameter(s.mode, s.mode_parameter);
  if (!(s.silhouette_alpha >= 0.0 && s.silhouette_alpha <= 1.0))
    throw ValidationError("silhouette_alpha must lie in [0, 1]");
  if (s.regularization < 0 || s.regularization > kMaxRegularization)
    throw ValidationError("regularization must lie in [0, 5]");
  for (const Rgb* c : {&s.colors.outer, &s.colors.inner, &s.colors.background, &s.colors.silhouette,
                       &s.colors.wireframe, &s.colors.valence3, &s.colors.valence5, &s.colors.other})
    for (double v : {c->r, c->g, c->b})
      if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("color components must lie in [0, 1]");
  if (s.ao.probes == 0) throw ValidationError("ao.probes must be at least 1");
  if (s.width <= 0 || s.height <= 0 || s.width > 16384 || s.height > 16384)
    throw ValidationError("image size must lie in [1, 16384]");
}

namespace status_detail {

inline std::string str(std::string_view s) { return nlohmann::json(std::string(s)).dump(-1, ' ', true); }
inline std::string vec(const Vec3& v) {
  return "[" + format_double(v.x) + ", " + format_double(v.y) + ", " + format_double(v.z) + "]";
}
inline std::string rgb(const Rgb& c) {
  return "[" + format_double(c.r) + ", " + format_double(c.g) + ", " + format_double(c.b) + "]";
}
inline std::string ids(const std::set<CellId>& s) {
  std::string out = "[";
  for (auto it = s.begin(); it != s.end(); ++it) out += (it == s.begin() ? "" : ", ") + std::to_string(*it);
  return out + "]";
}
inline std::string boolean(bool b) { return b ? "true" : "false"; }

/// Line-per-key writer with nested objects.
class Writer {
 public:
  void key(std::string_view k, const std::string& value) { item(str(k) + ": " + value); }
  void open(std::string_view k) {
    item(str(k) + ": {");
    first_.push_back(true);
    ++depth_;
  }
  void close() {
    --depth_;
    first_.pop_back();
    out_ += "\n" + indent() + "}";
  }
  std::string finish() { return "{" + out_ + "\n}\n"; }

 private:
  void item(const std::string& text) {
    if (!first_.back()) out_ += ",";
    first_.back() = false;
    out_ += "\n" + indent() + text;
  }
  [[nodiscard]] std::string indent() const { return std::string(2 * (depth_ + 1), ' '); }
  std::string out_;
  std::vector<bool> first_{true};
  int depth_ = 0;
};

}  // namespace status_detail

/// Canonical text: fixed key order, one key per line, shortest round-trip
/// numbers, ASCII only.
inline std::string serialize(const Status& s) {
  using namespace status_detail;
  Writer w;
  w.key("schema_version", std::to_string(s.schema_version));
  w.key("mesh", str(s.mesh));
  w.open("camera");
  w.key("direction", vec(s.camera.direction));
  w.key("up", vec(s.camera.up));
  w.key("target", vec(s.camera.target));
  w.key("distance", format_double(s.camera.distance));
  w.key("fov_deg", format_double(s.camera.fov_deg));
  w.close();
  w.open("plane");
  w.key("enabled", boolean(s.plane.enabled));
  w.key("normal", vec(s.plane.normal));
  w.key("offset", format_double(s.plane.offset));
  w.close();
  w.key("peel_min_depth", std::to_string(s.peel_min_depth));
  w.open("quality");
  w.key("metric", str(metric_name(s.quality.metric)));
  w.key("enabled", boolean(s.quality.enabled));
  w.key("threshold", format_double(s.quality.threshold));
  w.key("threshold_raw", format_double(s.quality.threshold_raw));
  w.close();
  w.key("colormap", str(colormap_name(s.colormap)));
  w.key("mode", str(mode_name(s.mode)));
  w.key("mode_parameter", format_double(s.mode_parameter));
  w.key("silhouette_alpha", format_double(s.silhouette_alpha));
  w.key("regularization", std::to_string(s.regularization));
  w.open("irregular");
  w.key("mode", str(irregular_mode_name(s.irregular.mode)));
  w.key("xray", boolean(s.irregular.xray));
  w.key("include_boundary", boolean(s.irregular.include_boundary));
  w.close();
  w.key("dug", ids(s.dug));
  w.key("undug", ids(s.undug));
  w.key("isolated", s.isolated ? std::to_string(*s.isolated) : "null");
  w.open("colors");
  w.key("outer", rgb(s.colors.outer));
  w.key("inner", rgb(s.colors.inner));
  w.key("background", rgb(s.colors.background));
  w.key("silhouette", rgb(s.colors.silhouette));
  w.key("wireframe", rgb(s.colors.wireframe));
  w.key("valence3", rgb(s.colors.valence3));
  w.key("valence5", rgb(s.colors.valence5));
  w.key("other", rgb(s.colors.other));
  w.close();
  w.key("lighting", str(lighting_name(s.lighting)));
  w.open("ao");
  w.key("probes", std::to_string(s.ao.probes));
  w.key("seed", std::to_string(s.ao.seed));
  w.close();
  w.open("image");
  w.key("width", std::to_string(s.width));
  w.key("height", std::to_string(s.height));
  w.close();
  return w.finish();
}

struct StatusParse {
  Status status;
  std::vector<std::string> warnings;
};

namespace status_detail {

using json = nlohmann::json;

/// Reads fields of one JSON object, recording missing and unknown keys.
class Reader {
 public:
  Reader(const json& obj, std::string path, std::vector<std::string>& warnings)
      : obj_(obj), path_(std::move(path)), warnings_(warnings) {}
  ~Reader() = default;
  Reader(const Reader&) = delete;
  Reader& operator=(const Reader&) = delete;

  /// Calls `read(value)` when `key` is present; otherwise warns and keeps the default.
  template <class F>
  void field(const std::string& key, F&& read) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    if (it == obj_.end()) {
      warnings_.push_back("status: missing '" + where(key) + "', using default");
      return;
    }
    read(*it, where(key));
  }

  void finish() const {
    for (const auto& [k, v] : obj_.items())
      if (!seen_.count(k)) warnings_.push_back("status: ignoring unknown key '" + where(k) + "'");
  }

  [[nodiscard]] std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const json& obj_;
  std::string path_;
  std::vector<std::string>& warnings_;
  std::set<std::string> seen_;
};

inline double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ValidationError("status: '" + where + "' must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ValidationError("status: '" + where + "' must be finite");
  return v;
}

inline long long integer(const json& j, const std::string& where) {
  if (j.is_number_integer()) return j.get<long long>();
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9e15) return static_cast<long long>(v);
  }
  throw ValidationError("status: '" + where + "' must be an integer");
}

inline long long nonnegative(const json& j, const std::string& where) {
  const long long v = integer(j, where);
  if (v < 0) throw ValidationError("status: '" + where + "' must be >= 0 (got " + std::to_string(v) + ")");
  return v;
}

inline bool boolean(const json& j, const std::string& where) {
  if (!j.is_boolean()) throw ValidationError("status: '" + where + "' must be true or false");
  return j.get<bool>();
}

inline std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) throw ValidationError("status: '" + where + "' must be a string");
  return j.get<std::string>();
}

inline std::array<double, 3> triple(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw ValidationError("status: '" + where + "' must be an array of 3 numbers");
  return {number(j[0], where), number(j[1], where), number(j[2], where)};
}

inline Vec3 vec(const json& j, const std::string& where) {
  const auto t = triple(j, where);
  return {t[0], t[1], t[2]};
}

inline Rgb rgb(const json& j, const std::string& where) {
  const auto t = triple(j, where);
  return {t[0], t[1], t[2]};
}

inline std::set<CellId> ids(const json& j, const std::string& where) {
  if (!j.is_array()) throw ValidationError("status: '" + where + "' must be an array of cell ids");
  std::set<CellId> out;
  for (const auto& e : j) {
    const long long v = nonnegative(e, where);
    if (v >= kInvalid) throw ValidationError("status: '" + where + "' cell id too large");
    out.insert(static_cast<CellId>(v));
  }
  return out;
}

template <class F>
void object(Reader& parent, const std::string& key, std::vector<std::string>& warnings, F&& body) {
  parent.field(key, [&](const json& j, const std::string& where) {
    if (!j.is_object()) throw ValidationError("status: '" + where + "' must be an object");
    Reader r(j, where, warnings);
    body(r);
    r.finish();
  });
}

template <class T, class P>
T choice(const json& j, const std::string& where, P&& parse) {
  try {
    return parse(text(j, where));
  } catch (const ValidationError& e) {
    throw ValidationError("status: '" + where + "': " + e.what());
  }
}

}  // namespace status_detail

/// Tolerant parse: unknown keys are ignored and missing keys take defaults,
/// each with a warning. Malformed JSON, bad values and foreign schema
/// versions are errors.
inline StatusParse parse_status(std::string_view doc) {
  using namespace status_detail;
  json root;
  try {
    root = json::parse(doc);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("status: malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw FormatError("status: top level must be a JSON object");
  StatusParse out;
  Status& s = out.status;
  auto& w = out.warnings;
  Reader r(root, "", w);
  r.field("schema_version", [&](const json& j, const std::string& at) {
    const long long v = integer(j, at);
    if (v != kStatusSchemaVersion) throw VersionError(v);
  });
  r.field("mesh", [&](const json& j, const std::string& at) { s.mesh = text(j, at); });
  object(r, "camera", w, [&](Reader& c) {
    c.field("direction", [&](const json& j, const std::string& at) { s.camera.direction = vec(j, at); });
    c.field("up", [&](const json& j, const std::string& at) { s.camera.up = vec(j, at); });
    c.field("target", [&](const json& j, const std::string& at) { s.camera.target = vec(j, at); });
    c.field("distance", [&](const json& j, const std::string& at) { s.camera.distance = number(j, at); });
    c.field("fov_deg", [&](const json& j, const std::string& at) { s.camera.fov_deg = number(j, at); });
  });
  object(r, "plane", w, [&](Reader& p) {
    p.field("enabled", [&](const json& j, const std::string& at) { s.plane.enabled = boolean(j, at); });
    p.field("normal", [&](const json& j, const std::string& at) {
      Vec3 n = vec(j, at);
      if (norm(n) == 0.0) throw ValidationError("status: '" + at + "' must be non-zero");
      if (std::abs(norm(n) - 1.0) > 1e-9) {
        w.push_back("status: '" + at + "' rescaled to unit length");
        n = normalized(n);
      }
      s.plane.normal = n;
    });
    p.field("offset", [&](const json& j, const std::string& at) { s.plane.offset = number(j, at); });
  });
  r.field("peel_min_depth", [&](const json& j, const std::string& at) {
    const long long v = nonnegative(j, at);
    if (v > 0xFFFFFFFFLL) throw ValidationError("status: '" + at + "' too large");
    s.peel_min_depth = static_cast<std::uint32_t>(v);
  });
  object(r, "quality", w, [&](Reader& q) {
    q.field("metric", [&](const json& j, const std::string& at) {
      s.quality.metric = choice<Metric>(j, at, [](const std::string& t) { return parse_metric(t); });
    });
    q.field("enabled", [&](const json& j, const std::string& at) { s.quality.enabled = boolean(j, at); });
    q.field("threshold", [&](const json& j, const std::string& at) { s.quality.threshold = number(j, at); });
    q.field("threshold_raw", [&](const json& j, const std::string& at) { s.quality.threshold_raw = number(j, at); });
  });
  r.field("colormap", [&](const json& j, const std::string& at) {
    s.colormap = choice<Colormap>(j, at, [](const std::string& t) { return parse_colormap(t); });
  });
  bool has_parameter = false;
  r.field("mode", [&](const json& j, const std::string& at) {
    s.mode = choice<ExtractionMode>(j, at, [](const std::string& t) { return parse_mode(t); });
  });
  r.field("mode_parameter", [&](const json& j, const std::string& at) {
    s.mode_parameter = number(j, at);
    has_parameter = true;
  });
  if (!has_parameter) s.mode_parameter = default_mode_parameter(s.mode);
  r.field("silhouette_alpha", [&](const json& j, const std::string& at) { s.silhouette_alpha = number(j, at); });
  r.field("regularization", [&](const json& j, const std::string& at) {
    s.regularization = static_cast<int>(std::clamp<long long>(integer(j, at), -1, kMaxRegularization + 1));
  });
  object(r, "irregular", w, [&](Reader& i) {
    i.field("mode", [&](const json& j, const std::string& at) {
      s.irregular.mode = choice<IrregularMode>(j, at, [](const std::string& t) { return parse_irregular_mode(t); });
    });
    i.field("xray", [&](const json& j, const std::string& at) { s.irregular.xray = boolean(j, at); });
    i.field("include_boundary",
            [&](const json& j, const std::string& at) { s.irregular.include_boundary = boolean(j, at); });
  });
  r.field("dug", [&](const json& j, const std::string& at) { s.dug = ids(j, at); });
  r.field("undug", [&](const json& j, const std::string& at) { s.undug = ids(j, at); });
  r.field("isolated", [&](const json& j, const std::string& at) {
    if (j.is_null()) {
      s.isolated.reset();
      return;
    }
    const long long v = nonnegative(j, at);
    if (v >= kInvalid) throw ValidationError("status: '" + at + "' cell id too large");
    s.isolated = static_cast<CellId>(v);
  });
  object(r, "colors", w, [&](Reader& c) {
    const auto color = [&](const char* key, Rgb& dst) {
      c.field(key, [&](const json& j, const std::string& at) { dst = rgb(j, at); });
    };
    color("outer", s.colors.outer);
    color("inner", s.colors.inner);
    color("background", s.colors.background);
    color("silhouette", s.colors.silhouette);
    color("wireframe", s.colors.wireframe);
    color("valence3", s.colors.valence3);
    color("valence5", s.colors.valence5);
    color("other", s.colors.other);
  });
  r.field("lighting", [&](const json& j, const std::string& at) {
    s.lighting = choice<Lighting>(j, at, [](const std::string& t) { return parse_lighting(t); });
  });
  object(r, "ao", w, [&](Reader& a) {
    a.field("probes", [&](const json& j, const std::string& at) {
      const long long v = nonnegative(j, at);
      if (v < 1 || v > (1 << 20)) throw ValidationError("status: '" + at + "' must lie in [1, 1048576]");
      s.ao.probes = static_cast<std::uint32_t>(v);
    });
    a.field("seed", [&](const json& j, const std::string& at) {
      if (j.is_number_unsigned()) {
        s.ao.seed = j.get<std::uint64_t>();
        return;
      }
      s.ao.seed = static_cast<std::uint64_t>(nonnegative(j, at));
    });
  });
  object(r, "image", w, [&](Reader& i) {
    i.field("width", [&](const json& j, const std::string& at) {
      s.width = static_cast<int>(std::clamp<long long>(integer(j, at), -1, 1 << 20));
    });
    i.field("height", [&](const json& j, const std::string& at) {
      s.height = static_cast<int>(std::clamp<long long>(integer(j, at), -1, 1 << 20));
    });
  });
  r.finish();
  try {
    validate(s);
  } catch (const VersionError&) {
    throw;
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    throw ValidationError(msg.rfind("status:", 0) == 0 ? msg : "status: " + msg);
  }
  return out;
}

/// Filter parameters described by the status (quality threshold as stored).
inline FilterParams filter_params(const Status& s) {
  FilterParams p;
  p.plane = s.plane;
  p.peel_min_depth = s.peel_min_depth;
  p.quality_threshold = s.quality.enabled ? s.quality.threshold : kQualityThresholdOff;
  p.regularization = s.regularization;
  p.dug = s.dug;
  p.undug = s.undug;
  p.isolated = s.isolated;
  return p;
}

/// Which of the two stored thresholds is authoritative.
enum class ThresholdSource {
  Auto,        ///< the raw value when the two disagree and the metric is invertible
  Raw,         ///< the raw value whenever the metric is invertible
  Normalized,  ///< always the normalized value
};

/// Reconciles the two threshold fields against a mesh's quality field; the
/// raw mirror is then rewritten from the chosen normalized value.
inline Status resolve_threshold(Status s, const QualityField& field, ThresholdSource source = ThresholdSource::Auto) {
  if (source != ThresholdSource::Normalized && invertible(field.metric, field.extrema)) {
    const double from_raw = field.to_normalized(s.quality.threshold_raw);
    if (source == ThresholdSource::Raw || std::abs(from_raw - s.quality.threshold) > 1e-12) s.quality.threshold = from_raw;
  }
  s.quality.threshold_raw = field.to_raw(s.quality.threshold);
  return s;
}

inline Bytes embed_png(std::span<const std::uint8_t> png, const Status& s) {
  return embed_text(png, kStatusKeyword, serialize(s));
}

/// The embedded status, or nothing for a PNG without one. A chunk that does
/// not parse is an error.
inline std::optional<Status> extract_png(std::span<const std::uint8_t> png) {
  const auto text = extract_text(png, kStatusKeyword);
  if (!text) return std::nullopt;
  return parse_status(*text).status;
}

}  // namespace hexinspect
