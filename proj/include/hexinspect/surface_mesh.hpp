#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hexinspect/geometry.hpp"
#include "hexinspect/hex_mesh.hpp"

namespace hexinspect {

enum class Shading { Flat, Smooth };

struct TriangleSource {
  CellId cell = kInvalid;
  std::uint32_t face = kInvalid;     ///< global face id (GMap) the polygon lies on
  std::uint32_t polygon = kInvalid;  ///< index of the emitted polygon (quad or triangle)
};

/// Indexed triangle mesh extracted for rendering. All per-vertex arrays have
/// `positions.size()` entries; `ao` is empty until lighting has been computed.
struct SurfaceMesh {
  std::vector<Vec3> positions;
  std::vector<Vec3> normals;
  std::vector<Rgb> colors;
  std::vector<double> ao;
  std::vector<CellId> vertex_cell;
  std::vector<std::array<std::uint32_t, 3>> triangles;
  std::vector<TriangleSource> sources;
  std::size_t polygon_count = 0;
  Shading shading = Shading::Flat;

  [[nodiscard]] bool empty() const { return triangles.empty(); }
  [[nodiscard]] std::size_t vertex_count() const { return positions.size(); }

  std::uint32_t add_vertex(const Vec3& p, const Vec3& n, const Rgb& c, CellId cell) {
    positions.push_back(p);
    normals.push_back(n);
    colors.push_back(c);
    vertex_cell.push_back(cell);
    return static_cast<std::uint32_t>(positions.size() - 1);
  }

  /// Quad split along the (v0, v2) diagonal.
  void add_quad(std::array<std::uint32_t, 4> q, CellId cell, std::uint32_t face) {
    const auto poly = static_cast<std::uint32_t>(polygon_count++);
    triangles.push_back({q[0], q[1], q[2]});
    triangles.push_back({q[0], q[2], q[3]});
    sources.push_back({cell, face, poly});
    sources.push_back({cell, face, poly});
  }

  void add_triangle(std::array<std::uint32_t, 3> t, CellId cell, std::uint32_t face) {
    const auto poly = static_cast<std::uint32_t>(polygon_count++);
    triangles.push_back(t);
    sources.push_back({cell, face, poly});
  }

  [[nodiscard]] Aabb bounds() const {
    Aabb b;
    for (const auto& p : positions) b.expand(p);
    return b;
  }

  /// Appends `other`, re-indexing its triangles and polygons.
  void append(const SurfaceMesh& other) {
    const auto base = static_cast<std::uint32_t>(positions.size());
    const auto poly_base = static_cast<std::uint32_t>(polygon_count);
    positions.insert(positions.end(), other.positions.begin(), other.positions.end());
    normals.insert(normals.end(), other.normals.begin(), other.normals.end());
    colors.insert(colors.end(), other.colors.begin(), other.colors.end());
    vertex_cell.insert(vertex_cell.end(), other.vertex_cell.begin(), other.vertex_cell.end());
    if (!ao.empty() || !other.ao.empty()) {
      ao.resize(base, 1.0);
      if (other.ao.empty())
        ao.resize(positions.size(), 1.0);
      else
        ao.insert(ao.end(), other.ao.begin(), other.ao.end());
    }
    for (const auto& t : other.triangles) triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
    for (auto s : other.sources) {
      s.polygon += poly_base;
      sources.push_back(s);
    }
    polygon_count += other.polygon_count;
  }
};

struct WireSegment {
  Vec3 a, b;
  double opacity = 1.0;
  Rgb color;
};

struct Wireframe {
  std::vector<WireSegment> segments;
  [[nodiscard]] bool empty() const { return segments.empty(); }
};

}  // namespace hexinspect
