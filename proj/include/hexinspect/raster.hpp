#pragma once

// Headless z-buffer rasterizer for extracted scenes: opaque surface, alpha
// wireframe, translucent silhouette and optional x-ray irregular overlay.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "hexinspect/errors.hpp"
#include "hexinspect/surface.hpp"

namespace hexinspect {

struct Camera {
  Vec3 direction{-1, -1, -1};  ///< eye toward target; normalized on use
  Vec3 up{0, 1, 0};
  Vec3 target{0, 0, 0};
  double distance = 0.0;  ///< 0 frames the scene automatically
  double fov_deg = 35.0;
  friend bool operator==(const Camera&, const Camera&) = default;
};

enum class Lighting { Ao, Direct };

inline std::string_view lighting_name(Lighting l) { return l == Lighting::Ao ? "ao" : "direct"; }

inline Lighting parse_lighting(std::string_view s) {
  if (s == "ao") return Lighting::Ao;
  if (s == "direct") return Lighting::Direct;
  throw ValidationError("unknown lighting '" + std::string(s) + "' (ao|direct)");
}

struct RenderOptions {
  Lighting lighting = Lighting::Ao;
  Rgb background{1, 1, 1};
  Rgb silhouette{0.6, 0.6, 0.65};
  double silhouette_alpha = 0.2;
  int width = 800;
  int height = 600;
};

struct Scene {
  SurfaceMesh surface;
  Wireframe wireframe;
  SurfaceMesh silhouette;
  IrregularGeometry irregular;
};

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgba;

  [[nodiscard]] std::array<std::uint8_t, 4> pixel(int x, int y) const {
    const auto* p = &rgba[4 * (static_cast<std::size_t>(y) * width + x)];
    return {p[0], p[1], p[2], p[3]};
  }
};

/// Camera with the target and distance resolved against `bounds` when the
/// distance is 0: the target moves to the box center and the eye backs off
/// until the bounding sphere fits the vertical field of view.
inline Camera frame(Camera c, const Aabb& bounds) {
  if (c.distance > 0.0 || bounds.empty()) {
    if (!(c.distance > 0.0)) c.distance = 1.0;
    return c;
  }
  const double radius = std::max(0.5 * bounds.diagonal(), 1e-9);
  const double half = 0.5 * c.fov_deg * 3.14159265358979323846 / 180.0;
  c.target = bounds.center();
  c.distance = 1.05 * radius / std::sin(half);
  return c;
}

namespace raster_detail {

inline std::uint8_t to_byte(double c) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(std::isnan(c) ? 0.0 : c, 0.0, 1.0) * 255.0));
}

inline std::uint32_t pack(const Rgb& c) {
  return (static_cast<std::uint32_t>(to_byte(c.r)) << 16) | (static_cast<std::uint32_t>(to_byte(c.g)) << 8) |
         to_byte(c.b);
}

inline Rgb unpack(std::uint32_t p) {
  return {((p >> 16) & 0xFF) / 255.0, ((p >> 8) & 0xFF) / 255.0, (p & 0xFF) / 255.0};
}

inline Rgb mix(const Rgb& a, const Rgb& b, double t) { return a * (1.0 - t) + b * t; }

struct ViewVertex {
  Vec3 v;  ///< view space: x right, y up, z depth
  Rgb color;
};

class Projector {
 public:
  Projector(const Camera& cam, int width, int height) : w_(width), h_(height) {
    f_ = normalized(cam.direction);
    if (norm2(f_) == 0.0) throw ValidationError("camera direction must be non-zero");
    r_ = cross(f_, cam.up);
    if (norm(r_) < 1e-12) throw ValidationError("camera up must not be parallel to the view direction");
    r_ = normalized(r_);
    u_ = cross(r_, f_);
    eye_ = cam.target - f_ * cam.distance;
    if (!(cam.fov_deg > 0.0 && cam.fov_deg < 180.0)) throw ValidationError("field of view must lie in (0, 180)");
    focal_ = 0.5 * height / std::tan(0.5 * cam.fov_deg * 3.14159265358979323846 / 180.0);
    near_ = 1e-3 * cam.distance;
  }

  [[nodiscard]] Vec3 view(const Vec3& p) const {
    const Vec3 d = p - eye_;
    return {dot(d, r_), dot(d, u_), dot(d, f_)};
  }
  [[nodiscard]] double sx(const Vec3& v) const { return 0.5 * w_ + v.x / v.z * focal_; }
  [[nodiscard]] double sy(const Vec3& v) const { return 0.5 * h_ - v.y / v.z * focal_; }
  [[nodiscard]] double near_plane() const { return near_; }
  [[nodiscard]] const Vec3& forward() const { return f_; }

 private:
  int w_, h_;
  Vec3 f_, r_, u_, eye_;
  double focal_ = 1.0, near_ = 1e-3;
};

/// Clips a convex polygon against z >= near.
inline std::vector<ViewVertex> clip_near(const std::vector<ViewVertex>& in, double near) {
  std::vector<ViewVertex> out;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const auto& a = in[i];
    const auto& b = in[(i + 1) % in.size()];
    const bool ia = a.v.z >= near, ib = b.v.z >= near;
    if (ia) out.push_back(a);
    if (ia != ib) {
      const double t = (near - a.v.z) / (b.v.z - a.v.z);
      out.push_back({lerp(a.v, b.v, t), mix(a.color, b.color, t)});
    }
  }
  return out;
}

struct FrameBuffer {
  int w, h;
  std::vector<double> depth;
  std::vector<std::uint32_t> color;
  FrameBuffer(int width, int height, std::uint32_t clear)
      : w(width), h(height), depth(static_cast<std::size_t>(width) * height, std::numeric_limits<double>::infinity()),
        color(static_cast<std::size_t>(width) * height, clear) {}

  /// Nearest fragment wins; equal depths keep the smaller packed color, so
  /// the result does not depend on drawing order.
  void write(std::size_t i, double z, std::uint32_t c) {
    if (z < depth[i] || (z == depth[i] && c < color[i])) {
      depth[i] = z;
      color[i] = c;
    }
  }
};

/// Rasterizes one view-space triangle (already near-clipped) with
/// perspective-correct color interpolation.
inline void fill(FrameBuffer& fb, const Projector& pr, const ViewVertex& a, const ViewVertex& b, const ViewVertex& c) {
  const double x0 = pr.sx(a.v), y0 = pr.sy(a.v), x1 = pr.sx(b.v), y1 = pr.sy(b.v), x2 = pr.sx(c.v), y2 = pr.sy(c.v);
  const double area = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0);
  if (!(std::abs(area) > 0.0) || !std::isfinite(area)) return;
  const auto bound = [](double v, int hi) { return static_cast<int>(std::clamp(v, -1.0, hi + 1.0)); };
  const int xmin = std::max(0, bound(std::floor(std::min({x0, x1, x2})), fb.w));
  const int xmax = std::min(fb.w - 1, bound(std::ceil(std::max({x0, x1, x2})), fb.w));
  const int ymin = std::max(0, bound(std::floor(std::min({y0, y1, y2})), fb.h));
  const int ymax = std::min(fb.h - 1, bound(std::ceil(std::max({y0, y1, y2})), fb.h));
  const double iz0 = 1.0 / a.v.z, iz1 = 1.0 / b.v.z, iz2 = 1.0 / c.v.z;
  for (int y = ymin; y <= ymax; ++y)
    for (int x = xmin; x <= xmax; ++x) {
      const double px = x + 0.5, py = y + 0.5;
      double w0 = ((x1 - px) * (y2 - py) - (x2 - px) * (y1 - py)) / area;
      double w1 = ((x2 - px) * (y0 - py) - (x0 - px) * (y2 - py)) / area;
      double w2 = 1.0 - w0 - w1;
      if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
      const double iz = w0 * iz0 + w1 * iz1 + w2 * iz2;
      const double z = 1.0 / iz;
      w0 *= iz0 * z;
      w1 *= iz1 * z;
      w2 = 1.0 - w0 - w1;
      const Rgb col = a.color * w0 + b.color * w1 + c.color * w2;
      fb.write(static_cast<std::size_t>(y) * fb.w + x, z, pack(col));
    }
}

inline void fill_polygon(FrameBuffer& fb, const Projector& pr, std::vector<ViewVertex> poly) {
  poly = clip_near(poly, pr.near_plane());
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) fill(fb, pr, poly[0], poly[k], poly[k + 1]);
}

/// Shaded per-vertex colors of every triangle corner; flat surfaces get one
/// color per polygon (the mean of its corners).
inline std::vector<std::array<Rgb, 3>> shade(const SurfaceMesh& s, const Projector& pr, Lighting lighting) {
  const auto lit = [&](std::uint32_t v) {
    if (lighting == Lighting::Ao) return s.colors[v] * (s.ao.empty() ? 1.0 : s.ao[v]);
    return s.colors[v] * std::max(0.0, -dot(s.normals[v], pr.forward()));
  };
  std::vector<std::array<Rgb, 3>> out(s.triangles.size());
  if (s.shading == Shading::Smooth) {
    for (std::size_t t = 0; t < s.triangles.size(); ++t)
      for (int k = 0; k < 3; ++k) out[t][k] = lit(s.triangles[t][k]);
    return out;
  }
  std::vector<Rgb> sum(s.polygon_count);
  std::vector<int> n(s.polygon_count, 0);
  // Each distinct corner counts once.
  std::vector<std::vector<std::uint32_t>> corners(s.polygon_count);
  for (std::size_t t = 0; t < s.triangles.size(); ++t) {
    auto& c = corners[s.sources[t].polygon];
    for (auto v : s.triangles[t])
      if (std::find(c.begin(), c.end(), v) == c.end()) c.push_back(v);
  }
  for (std::size_t p = 0; p < corners.size(); ++p) {
    for (auto v : corners[p]) sum[p] = sum[p] + lit(v);
    n[p] = static_cast<int>(corners[p].size());
  }
  for (std::size_t t = 0; t < s.triangles.size(); ++t) {
    const auto p = s.sources[t].polygon;
    const Rgb c = n[p] > 0 ? sum[p] * (1.0 / n[p]) : Rgb{};
    out[t] = {c, c, c};
  }
  return out;
}

inline void fill_mesh(FrameBuffer& fb, const Projector& pr, const SurfaceMesh& s,
                      const std::vector<std::array<Rgb, 3>>& colors) {
  for (std::size_t t = 0; t < s.triangles.size(); ++t) {
    std::vector<ViewVertex> poly;
    for (int k = 0; k < 3; ++k) poly.push_back({pr.view(s.positions[s.triangles[t][k]]), colors[t][k]});
    fill_polygon(fb, pr, std::move(poly));
  }
}

struct LineStyle {
  bool depth_test = true;
  double bias = 0.0;
  int thickness = 1;
};

/// DDA line with per-sample perspective depth, alpha-blended into `image`.
inline void draw_line(std::vector<Rgb>& image, const FrameBuffer& fb, const Projector& pr, const WireSegment& s,
                      const LineStyle& style) {
  Vec3 a = pr.view(s.a), b = pr.view(s.b);
  const double near = pr.near_plane();
  if (a.z < near && b.z < near) return;
  if (a.z < near) a = lerp(a, b, (near - a.z) / (b.z - a.z));
  if (b.z < near) b = lerp(b, a, (near - b.z) / (a.z - b.z));
  const double x0 = pr.sx(a), y0 = pr.sy(a), x1 = pr.sx(b), y1 = pr.sy(b);
  const double dx = x1 - x0, dy = y1 - y0;
  const double len = std::max(std::abs(dx), std::abs(dy));
  if (!std::isfinite(len) || len > 1e6) return;
  const int steps = static_cast<int>(std::ceil(len));
  const bool x_major = std::abs(dx) >= std::abs(dy);
  for (int i = 0; i <= steps; ++i) {
    const double t = steps == 0 ? 0.0 : static_cast<double>(i) / steps;
    const int px = static_cast<int>(std::floor(x0 + dx * t)), py = static_cast<int>(std::floor(y0 + dy * t));
    const double iz = (1.0 - t) / a.z + t / b.z;
    const double z = 1.0 / iz;
    for (int o = -(style.thickness / 2); o <= (style.thickness - 1) / 2; ++o) {
      const int qx = x_major ? px : px + o, qy = x_major ? py + o : py;
      if (qx < 0 || qy < 0 || qx >= fb.w || qy >= fb.h) continue;
      const std::size_t idx = static_cast<std::size_t>(qy) * fb.w + qx;
      if (style.depth_test && z - style.bias > fb.depth[idx]) continue;
      image[idx] = mix(image[idx], s.color, std::clamp(s.opacity, 0.0, 1.0));
    }
  }
}

}  // namespace raster_detail

/// Renders the scene. The camera must already be framed (see `frame`).
inline Image render(const Scene& scene, const Camera& camera, const RenderOptions& o) {
  using namespace raster_detail;
  if (o.width <= 0 || o.height <= 0) throw ValidationError("image size must be positive");
  if (!(o.silhouette_alpha >= 0.0 && o.silhouette_alpha <= 1.0))
    throw ValidationError("silhouette alpha must lie in [0, 1]");
  const Projector pr(camera, o.width, o.height);
  const std::uint32_t bg = pack(o.background);

  FrameBuffer fb(o.width, o.height, bg);
  fill_mesh(fb, pr, scene.surface, shade(scene.surface, pr, o.lighting));
  if (!scene.irregular.xray) fill_mesh(fb, pr, scene.irregular.faces, shade(scene.irregular.faces, pr, o.lighting));

  std::vector<Rgb> image(fb.color.size());
  for (std::size_t i = 0; i < image.size(); ++i) image[i] = unpack(fb.color[i]);

  if (o.silhouette_alpha > 0.0 && !scene.silhouette.empty()) {
    FrameBuffer sil(o.width, o.height, 0);
    std::vector<std::array<Rgb, 3>> flat(scene.silhouette.triangles.size(), {o.silhouette, o.silhouette, o.silhouette});
    fill_mesh(sil, pr, scene.silhouette, flat);
    for (std::size_t i = 0; i < image.size(); ++i)
      if (sil.depth[i] < fb.depth[i]) image[i] = mix(image[i], o.silhouette, o.silhouette_alpha);
  }

  const double bias = 2e-3 * camera.distance;
  for (const auto& s : scene.wireframe.segments) draw_line(image, fb, pr, s, {true, bias, 1});

  if (scene.irregular.xray) {
    FrameBuffer xr(o.width, o.height, 0);
    fill_mesh(xr, pr, scene.irregular.faces, shade(scene.irregular.faces, pr, o.lighting));
    for (std::size_t i = 0; i < image.size(); ++i)
      if (std::isfinite(xr.depth[i])) image[i] = unpack(xr.color[i]);
  }
  for (const auto& s : scene.irregular.lines.segments)
    draw_line(image, fb, pr, s, {!scene.irregular.xray, bias, 3});

  Image out{o.width, o.height, std::vector<std::uint8_t>(image.size() * 4)};
  for (std::size_t i = 0; i < image.size(); ++i) {
    out.rgba[4 * i + 0] = to_byte(image[i].r);
    out.rgba[4 * i + 1] = to_byte(image[i].g);
    out.rgba[4 * i + 2] = to_byte(image[i].b);
    out.rgba[4 * i + 3] = 255;
  }
  return out;
}

}  // namespace hexinspect
