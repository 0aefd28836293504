#pragma once

// Boundary-surface extraction in flat, fissure and rounded modes, plus the
// darkness-coded wireframe, the silhouette, irregular-structure geometry and
// ray picking.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "hexinspect/bvh.hpp"
#include "hexinspect/errors.hpp"
#include "hexinspect/filters.hpp"
#include "hexinspect/gmap.hpp"
#include "hexinspect/surface_mesh.hpp"

namespace hexinspect {

enum class ExtractionMode { Flat, Fissure, Rounded };

inline std::string_view mode_name(ExtractionMode m) {
  switch (m) {
    case ExtractionMode::Flat: return "flat";
    case ExtractionMode::Fissure: return "fissure";
    case ExtractionMode::Rounded: return "rounded";
  }
  return "flat";
}

inline ExtractionMode parse_mode(std::string_view s) {
  if (s == "flat") return ExtractionMode::Flat;
  if (s == "fissure") return ExtractionMode::Fissure;
  if (s == "rounded") return ExtractionMode::Rounded;
  throw ValidationError("unknown visualization mode '" + std::string(s) + "' (flat|fissure|rounded)");
}

/// Default mode parameter: wireframe opacity step, gap fraction, round radius fraction.
inline double default_mode_parameter(ExtractionMode m) {
  switch (m) {
    case ExtractionMode::Flat: return 0.25;
    case ExtractionMode::Fissure: return 0.1;
    case ExtractionMode::Rounded: return 0.2;
  }
  return 0.25;
}

inline void validate_mode_parameter(ExtractionMode m, double p) {
  if (m == ExtractionMode::Flat) {
    if (!(p > 0.0 && p <= 1.0)) throw ValidationError("flat mode parameter (wireframe opacity) must lie in (0, 1]");
  } else if (!(p > 0.0 && p < 0.5)) {
    throw ValidationError(std::string(mode_name(m)) + " mode parameter must lie in (0, 0.5)");
  }
}

struct SurfaceColors {
  Rgb outer{1.0, 1.0, 1.0};
  Rgb inner{1.0, 0.85, 0.2};
};

/// Vertices lying on a face that separates a visible cell from a hidden cell or the outside.
inline std::vector<std::uint8_t> exposed_vertices(const GMap& g, const CellFlags& hidden) {
  std::vector<std::uint8_t> ex(g.vertices().size(), 0);
  for (const auto& bf : current_boundary_faces(g, hidden))
    for (VertexId v : g.faces()[bf.face].vertices) ex[v] = 1;
  return ex;
}

namespace surface_detail {

inline Vec3 quad_normal(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return normalized(cross(c - a, d - b));
}

inline Vec3 cell_face_normal(const GMap& g, CellId c, int f) {
  const auto v = g.face_vertices(c, f);
  return quad_normal(g.position(v[0]), g.position(v[1]), g.position(v[2]), g.position(v[3]));
}

inline bool visible_cell(const CellFlags& hidden, CellId c) { return c != kInvalid && !hidden[c]; }

}  // namespace surface_detail

struct FlatSurface {
  SurfaceMesh surface;
  Wireframe wireframe;
};

/// One quad per current-boundary face, with flat shading and the wireframe
/// whose opacity grows with the number of visible cells at each edge.
inline FlatSurface extract_flat(const GMap& g, const CellFlags& hidden, double alpha0 = 0.25,
                                const SurfaceColors& colors = {}, Rgb wire_color = {0, 0, 0}) {
  FlatSurface out;
  SurfaceMesh& s = out.surface;
  s.shading = Shading::Flat;
  const auto faces = current_boundary_faces(g, hidden);
  std::vector<std::uint8_t> edge_on_surface(g.edges().size(), 0);
  for (const auto& bf : faces) {
    const auto v = g.face_vertices(bf.cell, bf.local);
    const Vec3 n = surface_detail::cell_face_normal(g, bf.cell, bf.local);
    const Rgb col = g.faces()[bf.face].boundary ? colors.outer : colors.inner;
    std::array<std::uint32_t, 4> q{};
    for (int k = 0; k < 4; ++k) q[k] = s.add_vertex(g.position(v[k]), n, col, bf.cell);
    s.add_quad(q, bf.cell, bf.face);
    const auto& cell = g.cells()[bf.cell];
    for (int k = 0; k < 4; ++k)
      edge_on_surface[cell.edges[local_edge(kHexFaces[bf.local][k], kHexFaces[bf.local][(k + 1) % 4])]] = 1;
  }
  std::vector<std::uint32_t> visible_at_edge(g.edges().size(), 0);
  for (CellId c = 0; c < g.cell_count(); ++c)
    if (!hidden[c])
      for (EdgeId e : g.cells()[c].edges) ++visible_at_edge[e];
  for (EdgeId e = 0; e < g.edges().size(); ++e) {
    if (!edge_on_surface[e]) continue;
    const auto& ge = g.edges()[e];
    const double opacity = std::min(1.0, alpha0 * static_cast<double>(visible_at_edge[e]));
    out.wireframe.segments.push_back({g.position(ge.vertices[0]), g.position(ge.vertices[1]), opacity, wire_color});
  }
  return out;
}

/// Visible cells touching an exposed vertex, each face with an exposed vertex
/// emitted with its exposed corners pulled toward the cell barycenter by `gap`.
inline SurfaceMesh extract_fissure(const GMap& g, const CellFlags& hidden, double gap = 0.1,
                                   const SurfaceColors& colors = {}) {
  SurfaceMesh s;
  s.shading = Shading::Flat;
  const auto ex = exposed_vertices(g, hidden);
  for (CellId c = 0; c < g.cell_count(); ++c) {
    if (hidden[c]) continue;
    const auto& cell = g.cells()[c];
    bool any = false;
    for (VertexId v : cell.vertices) any = any || ex[v];
    if (!any) continue;
    const Vec3 b = g.barycenter(c);
    std::array<Vec3, 8> p{};
    for (int i = 0; i < 8; ++i) {
      const Vec3 o = g.position(cell.vertices[i]);
      p[i] = ex[cell.vertices[i]] ? o + (b - o) * gap : o;
    }
    for (int f = 0; f < 6; ++f) {
      const auto& lf = kHexFaces[f];
      if (!(ex[cell.vertices[lf[0]]] || ex[cell.vertices[lf[1]]] || ex[cell.vertices[lf[2]]] ||
            ex[cell.vertices[lf[3]]]))
        continue;
      const Vec3 n = surface_detail::quad_normal(p[lf[0]], p[lf[1]], p[lf[2]], p[lf[3]]);
      const Rgb col = g.faces()[cell.faces[f]].boundary ? colors.outer : colors.inner;
      std::array<std::uint32_t, 4> q{};
      for (int k = 0; k < 4; ++k) q[k] = s.add_vertex(p[lf[k]], n, col, c);
      s.add_quad(q, c, cell.faces[f]);
    }
  }
  return s;
}

namespace surface_detail {

// Corner -> lattice bits (x, y, z) of the VTK hexahedron.
inline constexpr std::array<std::array<int, 3>, 8> kCornerBits{{
    {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}}};

inline Vec3 trilinear(const std::array<Vec3, 8>& x, double u, double v, double w) {
  Vec3 p;
  for (int i = 0; i < 8; ++i) {
    const auto& b = kCornerBits[i];
    p += x[i] * ((b[0] ? u : 1 - u) * (b[1] ? v : 1 - v) * (b[2] ? w : 1 - w));
  }
  return p;
}

/// Point at bilinear parameters (r, r) from face corner `v` (neighbors a, b,
/// opposite o). Symmetric in a and b so both cells sharing the face get
/// bit-identical results.
inline Vec3 face_point(const Vec3& v, const Vec3& a, const Vec3& b, const Vec3& o, double r) {
  return v * ((1 - r) * (1 - r)) + (a + b) * (r * (1 - r)) + o * (r * r);
}

}  // namespace surface_detail

/// Rounded cells: each cell face becomes a 3x3 grid of sub-faces whose edge and
/// corner rows are chamfered inward; sub-faces touching unexposed corners are
/// dropped or collapsed onto the original corner.
inline SurfaceMesh extract_rounded(const GMap& g, const CellFlags& hidden, double r = 0.2,
                                   const SurfaceColors& colors = {}) {
  using namespace surface_detail;
  SurfaceMesh s;
  s.shading = Shading::Smooth;
  const auto ex = exposed_vertices(g, hidden);
  const double lo = r / 2, hi = 1 - r / 2;

  for (CellId c = 0; c < g.cell_count(); ++c) {
    if (hidden[c]) continue;
    const auto& cell = g.cells()[c];
    std::array<bool, 8> cx{};
    bool any = false;
    for (int i = 0; i < 8; ++i) any = (cx[i] = ex[cell.vertices[i]] != 0) || any;
    if (!any) continue;
    const auto x = g.corners(c);

    std::array<Vec3, 6> fn{};
    std::array<bool, 6> outer{};
    for (int f = 0; f < 6; ++f) {
      fn[f] = cell_face_normal(g, c, f);
      outer[f] = g.faces()[cell.faces[f]].boundary;
    }
    // Faces incident to each corner and each edge.
    std::array<std::array<int, 3>, 8> corner_faces{};
    std::array<int, 8> ncf{};
    std::array<std::array<int, 2>, 12> edge_faces{};
    std::array<int, 12> nef{};
    for (int f = 0; f < 6; ++f)
      for (int k = 0; k < 4; ++k) {
        const int a = kHexFaces[f][k], b = kHexFaces[f][(k + 1) % 4];
        corner_faces[a][ncf[a]++] = f;
        const int e = local_edge(a, b);
        edge_faces[e][nef[e]++] = f;
      }
    const auto blend = [&](std::initializer_list<int> faces) {
      Vec3 n;
      bool out = false;
      for (int f : faces) {
        n += fn[f];
        out = out || outer[f];
      }
      return std::pair{normalized(n), out ? colors.outer : colors.inner};
    };

    std::array<std::uint32_t, 8> corner_id, orig_id;
    std::array<std::array<std::uint32_t, 2>, 12> edge_id;  // [edge][near which endpoint]
    std::array<std::array<std::uint32_t, 4>, 6> face_id;   // [face][near which face corner]
    corner_id.fill(kInvalid);
    orig_id.fill(kInvalid);
    for (auto& e : edge_id) e.fill(kInvalid);
    for (auto& f : face_id) f.fill(kInvalid);

    const auto corner_vertex = [&](int i) {
      if (corner_id[i] == kInvalid) {
        const auto& b = kCornerBits[i];
        const auto [n, col] = blend({corner_faces[i][0], corner_faces[i][1], corner_faces[i][2]});
        corner_id[i] = s.add_vertex(trilinear(x, b[0] ? hi : lo, b[1] ? hi : lo, b[2] ? hi : lo), n, col, c);
      }
      return corner_id[i];
    };
    const auto original_vertex = [&](int i) {
      if (orig_id[i] == kInvalid) {
        const auto [n, col] = blend({corner_faces[i][0], corner_faces[i][1], corner_faces[i][2]});
        orig_id[i] = s.add_vertex(x[i], n, col, c);
      }
      return orig_id[i];
    };
    const auto edge_vertex = [&](int from, int to) {
      const int e = local_edge(from, to);
      const int side = kHexEdges[e][0] == from ? 0 : 1;
      if (edge_id[e][side] == kInvalid) {
        const auto& bf = kCornerBits[from];
        const auto& bt = kCornerBits[to];
        std::array<double, 3> t{};
        for (int a = 0; a < 3; ++a) {
          if (bf[a] != bt[a])
            t[a] = bf[a] ? 1 - r : r;
          else
            t[a] = bf[a] ? hi : lo;
        }
        const auto [n, col] = blend({edge_faces[e][0], edge_faces[e][1]});
        edge_id[e][side] = s.add_vertex(trilinear(x, t[0], t[1], t[2]), n, col, c);
      }
      return edge_id[e][side];
    };
    const auto face_vertex = [&](int f, int k) {
      if (face_id[f][k] == kInvalid) {
        const auto& lf = kHexFaces[f];
        const Vec3 p = face_point(x[lf[k]], x[lf[(k + 1) % 4]], x[lf[(k + 3) % 4]], x[lf[(k + 2) % 4]], r);
        face_id[f][k] = s.add_vertex(p, fn[f], outer[f] ? colors.outer : colors.inner, c);
      }
      return face_id[f][k];
    };

    for (int f = 0; f < 6; ++f) {
      const auto& lf = kHexFaces[f];
      // Lattice point (a, b) in 0..3 on this face; a runs toward lf[1], b toward lf[3].
      const auto near_corner = [](int a, int b) {
        static constexpr int k[2][2] = {{0, 3}, {1, 2}};
        return k[a >= 2][b >= 2];
      };
      const auto lattice = [&](int a, int b) -> std::uint32_t {
        const int k = near_corner(a, b);
        const bool ea = a == 0 || a == 3, eb = b == 0 || b == 3;
        if (!cx[lf[k]]) return original_vertex(lf[k]);
        if (ea && eb) return corner_vertex(lf[k]);
        if (!ea && !eb) return face_vertex(f, k);
        // On a face edge: from corner lf[k] toward the neighbor along that edge.
        const bool along_a = eb;  // b extreme -> edge runs in the a direction
        const int toward = along_a ? ((k == 0 || k == 3) ? (k == 0 ? 1 : 2) : (k == 1 ? 0 : 3))
                                   : ((k == 0 || k == 1) ? (k == 0 ? 3 : 2) : (k == 3 ? 0 : 1));
        return edge_vertex(lf[k], lf[toward]);
      };
      for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) {
          const std::array<std::array<int, 2>, 4> pts{{{i, j}, {i + 1, j}, {i + 1, j + 1}, {i, j + 1}}};
          bool emit = false;
          if (i == 1 && j == 1) {
            emit = cx[lf[0]] && cx[lf[1]] && cx[lf[2]] && cx[lf[3]];
          } else {
            for (const auto& p : pts) emit = emit || cx[lf[near_corner(p[0], p[1])]];
          }
          if (!emit) continue;
          std::array<std::uint32_t, 4> q{};
          for (int k = 0; k < 4; ++k) q[k] = lattice(pts[k][0], pts[k][1]);
          // Collapse repeated (original-corner) vertices.
          std::array<std::uint32_t, 4> u{};
          int n = 0;
          for (int k = 0; k < 4; ++k)
            if (n == 0 || q[k] != u[n - 1]) u[n++] = q[k];
          if (n > 1 && u[n - 1] == u[0]) --n;
          if (n == 4)
            s.add_quad(u, c, cell.faces[f]);
          else if (n == 3)
            s.add_triangle({u[0], u[1], u[2]}, c, cell.faces[f]);
        }
    }
  }
  return s;
}

/// Original boundary faces of hidden cells.
inline SurfaceMesh silhouette_mesh(const GMap& g, const CellFlags& hidden, Rgb color = {0.6, 0.6, 0.65}) {
  SurfaceMesh s;
  s.shading = Shading::Flat;
  for (FaceId f = 0; f < g.faces().size(); ++f) {
    const GFace& face = g.faces()[f];
    if (!face.boundary || !hidden[face.cells[0]]) continue;
    const auto v = g.face_vertices(face.cells[0], face.local[0]);
    const Vec3 n = surface_detail::cell_face_normal(g, face.cells[0], face.local[0]);
    std::array<std::uint32_t, 4> q{};
    for (int k = 0; k < 4; ++k) q[k] = s.add_vertex(g.position(v[k]), n, color, face.cells[0]);
    s.add_quad(q, face.cells[0], f);
  }
  return s;
}

enum class IrregularMode { Off, Wire, Barbed, Paper };

inline std::string_view irregular_mode_name(IrregularMode m) {
  switch (m) {
    case IrregularMode::Off: return "off";
    case IrregularMode::Wire: return "wire";
    case IrregularMode::Barbed: return "barbed";
    case IrregularMode::Paper: return "paper";
  }
  return "off";
}

inline IrregularMode parse_irregular_mode(std::string_view s) {
  if (s == "off") return IrregularMode::Off;
  if (s == "wire") return IrregularMode::Wire;
  if (s == "barbed") return IrregularMode::Barbed;
  if (s == "paper") return IrregularMode::Paper;
  throw ValidationError("unknown irregular mode '" + std::string(s) + "' (off|wire|barbed|paper)");
}

struct ValenceColors {
  Rgb valence3{0.9, 0.1, 0.1};
  Rgb valence5{0.1, 0.7, 0.1};
  Rgb other{0.1, 0.2, 0.9};
  [[nodiscard]] Rgb of(std::uint32_t valence) const {
    return valence == 3 ? valence3 : (valence == 5 ? valence5 : other);
  }
};

struct IrregularGeometry {
  Wireframe lines;
  SurfaceMesh faces;  ///< paper mode only; two-sided
  bool xray = false;
  [[nodiscard]] bool empty() const { return lines.empty() && faces.empty(); }
};

inline constexpr double kPaperInset = 0.15;

/// Irregular edges touching at least one visible cell, colored by valence.
inline IrregularGeometry irregular_geometry(const GMap& g, const CellFlags& hidden, IrregularMode mode, bool xray,
                                            bool include_boundary = false, const ValenceColors& colors = {}) {
  IrregularGeometry out;
  out.xray = xray;
  if (mode == IrregularMode::Off) return out;
  const auto irr = irregular_elements(g, include_boundary);
  if (irr.edges.empty()) return out;

  std::vector<std::uint8_t> edge_visible(g.edges().size(), 0);
  for (CellId c = 0; c < g.cell_count(); ++c)
    if (!hidden[c])
      for (EdgeId e : g.cells()[c].edges) edge_visible[e] = 1;

  std::vector<std::uint8_t> used(g.edges().size(), 0);
  std::vector<Rgb> vertex_color(g.vertices().size());
  std::vector<std::uint8_t> barb_root(g.vertices().size(), 0);
  std::vector<std::uint8_t> is_irregular(g.edges().size(), 0);
  for (const auto& ie : irr.edges) {
    if (!edge_visible[ie.edge]) continue;
    const auto& ge = g.edges()[ie.edge];
    const Rgb col = colors.of(ie.valence);
    out.lines.segments.push_back({g.position(ge.vertices[0]), g.position(ge.vertices[1]), 1.0, col});
    used[ie.edge] = 1;
    is_irregular[ie.edge] = 1;
    for (VertexId v : ge.vertices)
      if (!barb_root[v]) {
        barb_root[v] = 1;
        vertex_color[v] = col;
      }
  }
  if (mode == IrregularMode::Wire) return out;

  for (EdgeId e = 0; e < g.edges().size(); ++e) {
    if (used[e] || !edge_visible[e]) continue;
    const auto& ge = g.edges()[e];
    const int root = barb_root[ge.vertices[0]] ? 0 : (barb_root[ge.vertices[1]] ? 1 : -1);
    if (root < 0) continue;
    out.lines.segments.push_back(
        {g.position(ge.vertices[0]), g.position(ge.vertices[1]), 1.0, vertex_color[ge.vertices[root]]});
  }
  if (mode == IrregularMode::Barbed) return out;

  SurfaceMesh& s = out.faces;
  s.shading = Shading::Flat;
  for (const auto& ie : irr.edges) {
    if (!is_irregular[ie.edge]) continue;
    const auto& ge = g.edges()[ie.edge];
    const Rgb col = colors.of(ie.valence);
    for (FaceId f = 0; f < g.faces().size(); ++f) {
      const GFace& face = g.faces()[f];
      int hits = 0;
      for (VertexId v : face.vertices) hits += v == ge.vertices[0] || v == ge.vertices[1];
      if (hits != 2) continue;
      // Both endpoints must be consecutive corners of the quad.
      bool consecutive = false;
      for (int k = 0; k < 4; ++k) {
        const VertexId a = face.vertices[k], b = face.vertices[(k + 1) % 4];
        consecutive = consecutive || (std::minmax(a, b) == std::minmax(ge.vertices[0], ge.vertices[1]));
      }
      if (!consecutive) continue;
      if (!surface_detail::visible_cell(hidden, face.cells[0]) && !surface_detail::visible_cell(hidden, face.cells[1]))
        continue;
      std::array<Vec3, 4> p{};
      Vec3 centroid;
      for (int k = 0; k < 4; ++k) centroid += (p[k] = g.position(face.vertices[k]));
      centroid = centroid / 4.0;
      for (auto& q : p) q = centroid + (q - centroid) * (1.0 - kPaperInset);
      const Vec3 n = surface_detail::quad_normal(p[0], p[1], p[2], p[3]);
      const CellId owner = face.cells[0];
      std::array<std::uint32_t, 4> front{}, back{};
      for (int k = 0; k < 4; ++k) front[k] = s.add_vertex(p[k], n, col, owner);
      for (int k = 0; k < 4; ++k) back[k] = s.add_vertex(p[3 - k], -n, col, owner);
      s.add_quad(front, owner, f);
      s.add_quad(back, owner, f);
    }
  }
  return out;
}

struct PickResult {
  CellId cell;
  FaceId face;
  double t;
};

/// Nearest surface triangle hit by the ray.
inline std::optional<PickResult> pick(const SurfaceMesh& s, const Bvh& bvh, const Ray& ray) {
  const auto hit = bvh.closest(ray);
  if (!hit) return std::nullopt;
  const auto& src = s.sources[hit->triangle];
  return PickResult{src.cell, src.face, hit->t};
}

inline std::optional<PickResult> pick(const SurfaceMesh& s, const Ray& ray) {
  return pick(s, Bvh(s.positions, s.triangles), ray);
}

/// Undirected edges used by an odd number of triangles after merging
/// vertices with identical positions; zero for a closed surface.
inline std::size_t open_edge_count(const SurfaceMesh& s) {
  std::map<std::tuple<double, double, double>, std::uint32_t> weld;
  std::vector<std::uint32_t> id(s.positions.size());
  for (std::size_t i = 0; i < s.positions.size(); ++i) {
    const auto& p = s.positions[i];
    id[i] = weld.try_emplace({p.x, p.y, p.z}, static_cast<std::uint32_t>(weld.size())).first->second;
  }
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> count;
  for (const auto& t : s.triangles)
    for (int k = 0; k < 3; ++k) ++count[std::minmax(id[t[k]], id[t[(k + 1) % 3]])];
  std::size_t open = 0;
  for (const auto& [e, n] : count) open += n % 2;
  return open;
}

/// Recolors every vertex from a per-cell color table.
inline void apply_cell_colors(SurfaceMesh& s, const std::vector<Rgb>& cell_colors) {
  for (std::size_t i = 0; i < s.positions.size(); ++i) s.colors[i] = cell_colors[s.vertex_cell[i]];
}

struct ExtractionOptions {
  ExtractionMode mode = ExtractionMode::Flat;
  double parameter = 0.25;
  SurfaceColors colors;
  Rgb wire_color{0, 0, 0};
};

/// The surface for the chosen mode; the wireframe is produced in flat mode only.
inline FlatSurface extract(const GMap& g, const CellFlags& hidden, const ExtractionOptions& o) {
  validate_mode_parameter(o.mode, o.parameter);
  switch (o.mode) {
    case ExtractionMode::Flat: return extract_flat(g, hidden, o.parameter, o.colors, o.wire_color);
    case ExtractionMode::Fissure: return {extract_fissure(g, hidden, o.parameter, o.colors), {}};
    case ExtractionMode::Rounded: return {extract_rounded(g, hidden, o.parameter, o.colors), {}};
  }
  return {};
}

}  // namespace hexinspect
