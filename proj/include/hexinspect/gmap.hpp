#pragma once

// Generalized-map connectivity over a hexahedral cell soup.
//
// Every cell owns 48 darts: 6 faces x 4 face edges x 2 edge endpoints. Dart
// `48*c + 8*f + 2*k + j` sits in cell c, local face f (kHexFaces order), on the
// face's k-th edge (corners f[k], f[k+1]) at endpoint j. The four involutions
// swap, in turn, the vertex, the edge, the face, and the cell; alpha3 is kInvalid
// on the mesh boundary.

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hexinspect/errors.hpp"
#include "hexinspect/hex_mesh.hpp"
#include "json.hpp"

namespace hexinspect {

using DartId = std::uint32_t;
using EdgeId = std::uint32_t;
using FaceId = std::uint32_t;

/// One byte per cell; nonzero = hidden.
using CellFlags = std::vector<std::uint8_t>;

struct Dart {
  CellId cell = kInvalid;
  FaceId face = kInvalid;
  EdgeId edge = kInvalid;
  VertexId vertex = kInvalid;
  std::array<DartId, 4> alpha{kInvalid, kInvalid, kInvalid, kInvalid};
};

struct GVertex {
  Vec3 position;
  std::uint32_t cell_count = 0;
  bool boundary = false;
};

struct GEdge {
  std::array<VertexId, 2> vertices{};
  std::uint32_t cell_count = 0;
  bool boundary = false;
};

struct GFace {
  /// Corners as seen (outward) from `cells[0]`.
  std::array<VertexId, 4> vertices{};
  std::array<CellId, 2> cells{kInvalid, kInvalid};
  std::array<std::uint8_t, 2> local{0, 0};  ///< local face index inside cells[i]
  bool boundary = true;

  [[nodiscard]] int cell_count() const { return cells[1] == kInvalid ? 1 : 2; }
};

struct GCell {
  Cell vertices{};
  std::array<FaceId, 6> faces{};
  std::array<EdgeId, 12> edges{};
};

namespace gmap_detail {

struct LocalDart {
  int face, edge_in_face, end;
  int corner;      ///< cell corner of the dart's vertex
  int cell_edge;   ///< local cell edge (kHexEdges)
  int alpha2;      ///< local dart index in the same cell
};

constexpr std::array<LocalDart, 48> make_local_darts() {
  std::array<LocalDart, 48> d{};
  for (int f = 0; f < 6; ++f)
    for (int k = 0; k < 4; ++k)
      for (int j = 0; j < 2; ++j) {
        const int a = kHexFaces[f][k], b = kHexFaces[f][(k + 1) % 4];
        d[f * 8 + k * 2 + j] = {f, k, j, j == 0 ? a : b, local_edge(a, b), -1};
      }
  for (int i = 0; i < 48; ++i)
    for (int o = 0; o < 48; ++o)
      if (d[o].face != d[i].face && d[o].cell_edge == d[i].cell_edge && d[o].corner == d[i].corner) d[i].alpha2 = o;
  return d;
}

inline constexpr std::array<LocalDart, 48> kLocalDarts = make_local_darts();

template <std::size_t N>
std::array<VertexId, N> sorted_key(std::array<VertexId, N> k) {
  std::sort(k.begin(), k.end());
  return k;
}

}  // namespace gmap_detail

class GMap {
 public:
  static GMap build(const HexMesh& mesh) {
    using gmap_detail::kLocalDarts;
    GMap g;
    const auto nc = static_cast<CellId>(mesh.cells.size());
    g.vertices_.resize(mesh.vertices.size());
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) g.vertices_[v].position = mesh.vertices[v];
    g.cells_.resize(nc);

    std::map<std::array<VertexId, 2>, EdgeId> edge_ids;
    std::map<std::array<VertexId, 4>, FaceId> face_ids;
    std::vector<std::uint32_t> vertex_stamp(mesh.vertices.size(), kInvalid);

    for (CellId c = 0; c < nc; ++c) {
      const Cell& cv = mesh.cells[c];
      for (VertexId v : cv) {
        if (v >= mesh.vertices.size()) throw StructureError("cell " + std::to_string(c) + " references missing vertex");
        if (vertex_stamp[v] != c) {
          vertex_stamp[v] = c;
          ++g.vertices_[v].cell_count;
        }
      }
      GCell& gc = g.cells_[c];
      gc.vertices = cv;
      for (int e = 0; e < 12; ++e) {
        const auto key = gmap_detail::sorted_key<2>({cv[kHexEdges[e][0]], cv[kHexEdges[e][1]]});
        auto [it, inserted] = edge_ids.try_emplace(key, static_cast<EdgeId>(g.edges_.size()));
        if (inserted) g.edges_.push_back({{cv[kHexEdges[e][0]], cv[kHexEdges[e][1]]}, 0, false});
        ++g.edges_[it->second].cell_count;
        gc.edges[e] = it->second;
      }
      for (int f = 0; f < 6; ++f) {
        std::array<VertexId, 4> fv{};
        for (int k = 0; k < 4; ++k) fv[k] = cv[kHexFaces[f][k]];
        auto [it, inserted] = face_ids.try_emplace(gmap_detail::sorted_key<4>(fv), static_cast<FaceId>(g.faces_.size()));
        if (inserted) {
          GFace face;
          face.vertices = fv;
          face.cells[0] = c;
          face.local[0] = static_cast<std::uint8_t>(f);
          g.faces_.push_back(face);
        } else {
          GFace& face = g.faces_[it->second];
          if (face.cells[1] != kInvalid || face.cells[0] == c) {
            std::string ids;
            for (VertexId v : face.vertices) ids += " " + std::to_string(v);
            throw StructureError("non-manifold face {" + ids + " } shared by more than two cells (cell " +
                                 std::to_string(c) + ")");
          }
          face.cells[1] = c;
          face.local[1] = static_cast<std::uint8_t>(f);
          face.boundary = false;
        }
        gc.faces[f] = it->second;
      }
    }

    for (const GFace& f : g.faces_) {
      if (!f.boundary) continue;
      for (VertexId v : f.vertices) g.vertices_[v].boundary = true;
      const GCell& gc = g.cells_[f.cells[0]];
      for (int k = 0; k < 4; ++k) {
        const int le = local_edge(kHexFaces[f.local[0]][k], kHexFaces[f.local[0]][(k + 1) % 4]);
        g.edges_[gc.edges[le]].boundary = true;
      }
    }

    g.darts_.resize(static_cast<std::size_t>(nc) * 48);
    for (CellId c = 0; c < nc; ++c) {
      const GCell& gc = g.cells_[c];
      const DartId base = c * 48;
      for (int i = 0; i < 48; ++i) {
        const auto& ld = kLocalDarts[i];
        Dart& d = g.darts_[base + i];
        d.cell = c;
        d.face = gc.faces[ld.face];
        d.edge = gc.edges[ld.cell_edge];
        d.vertex = gc.vertices[ld.corner];
        d.alpha[0] = base + (i ^ 1);
        d.alpha[1] = ld.end == 1 ? base + ld.face * 8 + ((ld.edge_in_face + 1) % 4) * 2
                                 : base + ld.face * 8 + ((ld.edge_in_face + 3) % 4) * 2 + 1;
        d.alpha[2] = base + static_cast<DartId>(ld.alpha2);
      }
    }
    for (const GFace& f : g.faces_) {
      if (f.boundary) continue;
      const DartId a0 = f.cells[0] * 48 + f.local[0] * 8u;
      const DartId b0 = f.cells[1] * 48 + f.local[1] * 8u;
      for (DartId a = a0; a < a0 + 8; ++a)
        for (DartId b = b0; b < b0 + 8; ++b)
          if (g.darts_[a].vertex == g.darts_[b].vertex && g.darts_[a].edge == g.darts_[b].edge) {
            g.darts_[a].alpha[3] = b;
            g.darts_[b].alpha[3] = a;
          }
    }
    return g;
  }

  [[nodiscard]] const std::vector<Dart>& darts() const { return darts_; }
  [[nodiscard]] const std::vector<GVertex>& vertices() const { return vertices_; }
  [[nodiscard]] const std::vector<GEdge>& edges() const { return edges_; }
  [[nodiscard]] const std::vector<GFace>& faces() const { return faces_; }
  [[nodiscard]] const std::vector<GCell>& cells() const { return cells_; }

  [[nodiscard]] std::size_t cell_count() const { return cells_.size(); }
  [[nodiscard]] Vec3 position(VertexId v) const { return vertices_[v].position; }

  [[nodiscard]] std::array<Vec3, 8> corners(CellId c) const {
    std::array<Vec3, 8> p;
    for (int i = 0; i < 8; ++i) p[i] = vertices_[cells_[c].vertices[i]].position;
    return p;
  }

  [[nodiscard]] Vec3 barycenter(CellId c) const {
    Vec3 s;
    for (VertexId v : cells_[c].vertices) s += vertices_[v].position;
    return s / 8.0;
  }

  /// The cell across local face `f` of `c`, or kInvalid on the boundary.
  [[nodiscard]] CellId neighbor(CellId c, int f) const {
    const GFace& face = faces_[cells_[c].faces[f]];
    if (face.boundary) return kInvalid;
    return face.cells[0] == c ? face.cells[1] : face.cells[0];
  }

  /// Corners of local face `f` of `c`, outward from c.
  [[nodiscard]] std::array<VertexId, 4> face_vertices(CellId c, int f) const {
    std::array<VertexId, 4> v{};
    for (int k = 0; k < 4; ++k) v[k] = cells_[c].vertices[kHexFaces[f][k]];
    return v;
  }

  [[nodiscard]] Aabb bounds() const {
    Aabb b;
    for (const auto& v : vertices_) b.expand(v.position);
    return b;
  }

  /// Cells incident to each vertex (CSR layout, ascending cell ids).
  struct VertexCells {
    std::vector<std::uint32_t> offsets;
    std::vector<CellId> cells;
    [[nodiscard]] std::span<const CellId> of(VertexId v) const {
      return {cells.data() + offsets[v], cells.data() + offsets[v + 1]};
    }
  };

  [[nodiscard]] VertexCells vertex_cells() const {
    VertexCells vc;
    vc.offsets.assign(vertices_.size() + 1, 0);
    for (const auto& c : cells_)
      for (VertexId v : c.vertices) ++vc.offsets[v + 1];
    for (std::size_t i = 0; i < vertices_.size(); ++i) vc.offsets[i + 1] += vc.offsets[i];
    vc.cells.resize(vc.offsets.back());
    std::vector<std::uint32_t> fill(vc.offsets.begin(), vc.offsets.end() - 1);
    for (CellId c = 0; c < cells_.size(); ++c)
      for (VertexId v : cells_[c].vertices) vc.cells[fill[v]++] = c;
    return vc;
  }

 private:
  std::vector<Dart> darts_;
  std::vector<GVertex> vertices_;
  std::vector<GEdge> edges_;
  std::vector<GFace> faces_;
  std::vector<GCell> cells_;
};

/// Hop distance to the original boundary over face-to-face adjacency; cells
/// with a boundary face have depth 0.
inline std::vector<std::uint32_t> peel_depths(const GMap& g) {
  const auto n = g.cell_count();
  std::vector<std::uint32_t> depth(n, kInvalid);
  std::deque<CellId> queue;
  for (CellId c = 0; c < n; ++c) {
    for (int f = 0; f < 6; ++f)
      if (g.faces()[g.cells()[c].faces[f]].boundary) {
        depth[c] = 0;
        queue.push_back(c);
        break;
      }
  }
  while (!queue.empty()) {
    const CellId c = queue.front();
    queue.pop_front();
    for (int f = 0; f < 6; ++f) {
      const CellId o = g.neighbor(c, f);
      if (o != kInvalid && depth[o] == kInvalid) {
        depth[o] = depth[c] + 1;
        queue.push_back(o);
      }
    }
  }
  return depth;
}

inline std::uint32_t max_depth(const std::vector<std::uint32_t>& depths) {
  std::uint32_t m = 0;
  for (auto d : depths)
    if (d != kInvalid) m = std::max(m, d);
  return m;
}

struct IrregularEdge {
  EdgeId edge;
  std::uint32_t valence;
  bool boundary;
};

struct IrregularVertex {
  VertexId vertex;
  std::uint32_t cell_count;
  bool boundary;
};

struct IrregularStructure {
  std::vector<IrregularEdge> edges;
  std::vector<IrregularVertex> vertices;
  [[nodiscard]] bool empty() const { return edges.empty() && vertices.empty(); }
};

/// Interior edges of valence != 4 and interior vertices with != 8 cells; with
/// `include_boundary`, also boundary edges of valence != 2 and boundary
/// vertices with != 4 cells.
inline IrregularStructure irregular_elements(const GMap& g, bool include_boundary = false) {
  IrregularStructure s;
  for (EdgeId e = 0; e < g.edges().size(); ++e) {
    const GEdge& ge = g.edges()[e];
    const std::uint32_t regular = ge.boundary ? 2 : 4;
    if (ge.cell_count != regular && (!ge.boundary || include_boundary)) s.edges.push_back({e, ge.cell_count, ge.boundary});
  }
  for (VertexId v = 0; v < g.vertices().size(); ++v) {
    const GVertex& gv = g.vertices()[v];
    if (gv.cell_count == 0) continue;  // unreferenced vertex
    const std::uint32_t regular = gv.boundary ? 4 : 8;
    if (gv.cell_count != regular && (!gv.boundary || include_boundary))
      s.vertices.push_back({v, gv.cell_count, gv.boundary});
  }
  return s;
}

struct BoundaryFace {
  FaceId face;
  CellId cell;           ///< the visible incident cell
  std::uint8_t local;    ///< local face index inside `cell`
};

/// Faces with exactly one visible incident cell, in face-id order.
inline std::vector<BoundaryFace> current_boundary_faces(const GMap& g, const CellFlags& hidden) {
  std::vector<BoundaryFace> out;
  for (FaceId f = 0; f < g.faces().size(); ++f) {
    const GFace& face = g.faces()[f];
    const bool v0 = !hidden[face.cells[0]];
    const bool v1 = face.cells[1] != kInvalid && !hidden[face.cells[1]];
    if (v0 == v1) continue;
    if (v0)
      out.push_back({f, face.cells[0], face.local[0]});
    else
      out.push_back({f, face.cells[1], face.local[1]});
  }
  return out;
}

/// Element tables as JSON, for debugging and external oracles.
inline nlohmann::ordered_json gmap_to_json(const GMap& g) {
  nlohmann::ordered_json j;
  j["counts"] = {{"vertices", g.vertices().size()}, {"edges", g.edges().size()}, {"faces", g.faces().size()},
                 {"cells", g.cells().size()}, {"darts", g.darts().size()}};
  auto& edges = j["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : g.edges()) edges.push_back({{"v", e.vertices}, {"cells", e.cell_count}, {"boundary", e.boundary}});
  auto& faces = j["faces"] = nlohmann::ordered_json::array();
  for (const auto& f : g.faces()) {
    nlohmann::ordered_json cells = nlohmann::ordered_json::array({f.cells[0]});
    if (f.cells[1] != kInvalid) cells.push_back(f.cells[1]);
    faces.push_back({{"v", f.vertices}, {"cells", cells}, {"boundary", f.boundary}});
  }
  auto& cells = j["cells"] = nlohmann::ordered_json::array();
  for (const auto& c : g.cells()) cells.push_back({{"v", c.vertices}, {"faces", c.faces}, {"edges", c.edges}});
  return j;
}

}  // namespace hexinspect
