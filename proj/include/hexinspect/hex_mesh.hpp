#pragma once

// Raw hexahedral mesh and the fixed corner/face/edge tables every module shares.
//
// Canonical corner order (VTK hexahedron convention):
//
//        7-------6
//       /|      /|
//      4-------5 |
//      | 3-----|-2
//      |/      |/
//      0-------1
//
// v0..v3 is the bottom quad, v4..v7 the top quad with v(i+4) above v(i). A
// positively oriented cell has triple(v1-v0, v3-v0, v4-v0) > 0.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hexinspect/geometry.hpp"

namespace hexinspect {

using VertexId = std::uint32_t;
using CellId = std::uint32_t;
using Cell = std::array<VertexId, 8>;

inline constexpr std::uint32_t kInvalid = 0xFFFFFFFFu;

/// Local faces, each listed counter-clockwise when seen from outside the cell.
inline constexpr std::array<std::array<int, 4>, 6> kHexFaces{{
    {0, 3, 2, 1},  // bottom (-z)
    {4, 5, 6, 7},  // top    (+z)
    {0, 1, 5, 4},  // front  (-y)
    {1, 2, 6, 5},  // right  (+x)
    {2, 3, 7, 6},  // back   (+y)
    {3, 0, 4, 7},  // left   (-x)
}};

constexpr std::array<const char*, 6> kHexFaceNames{"bottom", "top", "front", "right", "back", "left"};

inline constexpr std::array<std::array<int, 2>, 12> kHexEdges{{
    {0, 1}, {1, 2}, {2, 3}, {3, 0},
    {4, 5}, {5, 6}, {6, 7}, {7, 4},
    {0, 4}, {1, 5}, {2, 6}, {3, 7},
}};

/// For every corner: the three corners reached along its incident edges, ordered
/// so that (n0-c, n1-c, n2-c) is right-handed in a positive cell.
inline constexpr std::array<std::array<int, 3>, 8> kCornerNeighbors{{
    {1, 3, 4}, {2, 0, 5}, {3, 1, 6}, {0, 2, 7},
    {7, 5, 0}, {4, 6, 1}, {5, 7, 2}, {6, 4, 3},
}};

/// Local edge index joining corners a and b, or -1.
constexpr int local_edge(int a, int b) {
  for (int e = 0; e < 12; ++e) {
    if ((kHexEdges[e][0] == a && kHexEdges[e][1] == b) || (kHexEdges[e][0] == b && kHexEdges[e][1] == a))
      return e;
  }
  return -1;
}

struct HexMesh {
  std::vector<Vec3> vertices;
  std::vector<Cell> cells;
  std::string name;
  /// Non-fatal import notes (skipped sections, no hexahedra, ...).
  std::vector<std::string> warnings;

  [[nodiscard]] std::size_t vertex_count() const { return vertices.size(); }
  [[nodiscard]] std::size_t cell_count() const { return cells.size(); }

  [[nodiscard]] std::array<Vec3, 8> corners(CellId c) const {
    std::array<Vec3, 8> p;
    for (int i = 0; i < 8; ++i) p[i] = vertices[cells[c][i]];
    return p;
  }

  [[nodiscard]] Vec3 barycenter(CellId c) const {
    Vec3 s;
    for (VertexId v : cells[c]) s += vertices[v];
    return s / 8.0;
  }

  [[nodiscard]] Aabb bounds() const {
    Aabb b;
    for (const auto& p : vertices) b.expand(p);
    return b;
  }
};

/// Orientation of the corner tetrahedron at v0.
inline double corner_orientation(const std::array<Vec3, 8>& p) {
  return triple(p[1] - p[0], p[3] - p[0], p[4] - p[0]);
}

/// Structured nx*ny*nz grid of unit cells starting at `origin`, cells in x-fastest order.
inline HexMesh make_grid(int nx, int ny, int nz, double spacing = 1.0, Vec3 origin = {}) {
  HexMesh m;
  m.name = "grid" + std::to_string(nx) + "x" + std::to_string(ny) + "x" + std::to_string(nz);
  const auto vid = [&](int i, int j, int k) {
    return static_cast<VertexId>(i + (nx + 1) * (j + (ny + 1) * k));
  };
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i)
        m.vertices.push_back(origin + Vec3{i * spacing, j * spacing, k * spacing});
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        m.cells.push_back({vid(i, j, k), vid(i + 1, j, k), vid(i + 1, j + 1, k), vid(i, j + 1, k),
                           vid(i, j, k + 1), vid(i + 1, j, k + 1), vid(i + 1, j + 1, k + 1),
                           vid(i, j + 1, k + 1)});
  return m;
}

}  // namespace hexinspect
