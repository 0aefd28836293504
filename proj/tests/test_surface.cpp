#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "hexinspect/surface.hpp"
#include "test_support.hpp"

using namespace hexinspect;
using namespace testing_support;

namespace {

/// Brute-force current boundary: (cell, local face) of visible cells whose
/// face is unshared or shared with a hidden cell.
std::vector<std::pair<CellId, int>> boundary_oracle(const HexMesh& m, const CellFlags& hidden) {
  std::map<std::array<VertexId, 4>, std::vector<CellId>> owners;
  for (CellId c = 0; c < m.cell_count(); ++c)
    for (int f = 0; f < 6; ++f) owners[face_key(m.cells[c], f)].push_back(c);
  std::vector<std::pair<CellId, int>> out;
  for (CellId c = 0; c < m.cell_count(); ++c) {
    if (hidden[c]) continue;
    for (int f = 0; f < 6; ++f) {
      bool covered = false;
      for (CellId o : owners[face_key(m.cells[c], f)]) covered = covered || (o != c && !hidden[o]);
      if (!covered) out.emplace_back(c, f);
    }
  }
  return out;
}

std::vector<std::uint8_t> exposed_oracle(const HexMesh& m, const CellFlags& hidden) {
  std::vector<std::uint8_t> ex(m.vertex_count(), 0);
  for (const auto& [c, f] : boundary_oracle(m, hidden))
    for (int k : kHexFaces[f]) ex[m.cells[c][k]] = 1;
  return ex;
}

/// Polygon counts predicted from vertex exposure alone.
struct CountOracle {
  std::size_t fissure = 0;
  std::size_t rounded = 0;
};

CountOracle count_oracle(const HexMesh& m, const CellFlags& hidden) {
  const auto ex = exposed_oracle(m, hidden);
  CountOracle o;
  for (CellId c = 0; c < m.cell_count(); ++c) {
    if (hidden[c]) continue;
    bool any = false;
    for (VertexId v : m.cells[c]) any = any || ex[v];
    if (!any) continue;
    for (int f = 0; f < 6; ++f) {
      std::array<bool, 4> e{};
      int n = 0;
      for (int k = 0; k < 4; ++k) n += (e[k] = ex[m.cells[c][kHexFaces[f][k]]] != 0);
      if (n == 0) continue;
      ++o.fissure;
      o.rounded += static_cast<std::size_t>(n);  // corner patches
      for (int k = 0; k < 4; ++k) o.rounded += (e[k] || e[(k + 1) % 4]) ? 1 : 0;  // edge strips
      o.rounded += n == 4 ? 1 : 0;  // centre
    }
  }
  return o;
}

/// Odd-multiplicity edges after merging exactly coincident positions.
std::size_t open_edges_oracle(const SurfaceMesh& s) {
  std::vector<std::uint32_t> id(s.positions.size());
  std::vector<Vec3> unique;
  std::map<std::array<double, 3>, std::uint32_t> index;
  for (std::size_t i = 0; i < s.positions.size(); ++i) {
    const auto& p = s.positions[i];
    auto [it, fresh] = index.emplace(std::array<double, 3>{p.x, p.y, p.z}, static_cast<std::uint32_t>(unique.size()));
    if (fresh) unique.push_back(p);
    id[i] = it->second;
  }
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> uses;
  for (const auto& t : s.triangles)
    for (int k = 0; k < 3; ++k) {
      auto a = id[t[k]], b = id[t[(k + 1) % 3]];
      if (a > b) std::swap(a, b);
      ++uses[{a, b}];
    }
  std::size_t open = 0;
  for (const auto& [e, n] : uses) open += (n % 2) != 0;
  return open;
}

CellFlags random_filter(std::mt19937_64& rng, const GMap& g) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> nd;
  FilterParams p;
  p.plane.normal = normalized(Vec3{nd(rng), nd(rng), nd(rng)});
  p.plane.enabled = u(rng) < 0.7;
  p.plane.offset = plane_offset_from_slider(g.bounds(), p.plane.normal, 0.6 * u(rng));
  const auto depths = peel_depths(g);
  p.peel_min_depth = peel_from_slider(0.3 * u(rng), max_depth(depths));
  p.regularization = static_cast<int>(rng() % 3);
  for (int i = 0; i < 3; ++i) p.dug.insert(static_cast<CellId>(rng() % g.cell_count()));
  return compose(g, p, depths, {}).hidden;
}

}  // namespace

TEST(Surface, FlatFacesMatchBoundaryOracle) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    HexMesh m = random_subgrid(rng, 6, 0.8);
    const GMap g = GMap::build(m);
    const auto hidden = random_filter(rng, g);
    const auto flat = extract_flat(g, hidden);
    EXPECT_EQ(flat.surface.polygon_count, boundary_oracle(m, hidden).size());
    EXPECT_EQ(flat.surface.triangles.size(), 2 * flat.surface.polygon_count);
  }
}

TEST(Surface, ExposedVerticesMatchOracle) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    HexMesh m = random_subgrid(rng, 6, 0.8);
    const GMap g = GMap::build(m);
    const auto hidden = random_filter(rng, g);
    EXPECT_EQ(exposed_vertices(g, hidden), exposed_oracle(m, hidden));
  }
}

TEST(Surface, FissureAndRoundedCountsMatchOracle) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    HexMesh m = random_subgrid(rng, 6, 0.8);
    jitter(m, rng, 0.15);
    const GMap g = GMap::build(m);
    const auto hidden = random_filter(rng, g);
    const auto o = count_oracle(m, hidden);
    EXPECT_EQ(extract_fissure(g, hidden).polygon_count, o.fissure);
    EXPECT_EQ(extract_rounded(g, hidden).polygon_count, o.rounded);
  }
}

TEST(Surface, RoundedSingleCubeHasFiftyFourFaces) {
  const GMap g = GMap::build(make_grid(1, 1, 1));
  const CellFlags none(1, 0);
  const auto s = extract_rounded(g, none, 0.2);
  EXPECT_EQ(s.polygon_count, 54u);
  EXPECT_EQ(s.triangles.size(), 108u);
  EXPECT_EQ(open_edges_oracle(s), 0u);
}

TEST(Surface, AllModesAreWatertightUnderRandomFilters) {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> param(0.05, 0.45);
  for (int trial = 0; trial < 50; ++trial) {
    HexMesh m = random_subgrid(rng, 6, 0.8);
    jitter(m, rng, 0.15);
    const GMap g = GMap::build(m);
    const auto hidden = random_filter(rng, g);
    const double r = param(rng);
    const auto flat = extract_flat(g, hidden).surface;
    const auto fissure = extract_fissure(g, hidden, r);
    const auto rounded = extract_rounded(g, hidden, r);
    EXPECT_EQ(open_edges_oracle(flat), 0u) << trial;
    EXPECT_EQ(open_edges_oracle(fissure), 0u) << trial;
    EXPECT_EQ(open_edges_oracle(rounded), 0u) << trial;
    EXPECT_EQ(open_edge_count(rounded), open_edges_oracle(rounded));
  }
}

TEST(Surface, FlatFacesPointOutwardAndAreColoredByOrigin) {
  const GMap g = GMap::build(make_grid(3, 1, 1));
  CellFlags hidden{0, 0, 1};
  const auto flat = extract_flat(g, hidden);
  const SurfaceColors colors;
  std::size_t inner = 0;
  for (std::size_t t = 0; t < flat.surface.triangles.size(); ++t) {
    const auto& tri = flat.surface.triangles[t];
    const Vec3 a = flat.surface.positions[tri[0]], b = flat.surface.positions[tri[1]],
               c = flat.surface.positions[tri[2]];
    const Vec3 centroid = (a + b + c) / 3.0;
    const Vec3 n = cross(b - a, c - a);
    const CellId cell = flat.surface.sources[t].cell;
    EXPECT_GT(dot(n, centroid - g.barycenter(cell)), 0.0);
    if (flat.surface.colors[tri[0]] == colors.inner) ++inner;
  }
  EXPECT_EQ(inner, 2u);  // the one exposed interior quad
}

TEST(Surface, WireframeOpacityCountsVisibleCells) {
  const GMap g = GMap::build(make_grid(2, 2, 1));
  const CellFlags none(4, 0);
  const auto flat = extract_flat(g, none, 0.25);
  // 33 grid edges; the central vertical one is interior. Edges through the
  // middle of a side or cap touch two cells, the rest one.
  std::map<double, int> by_opacity;
  for (const auto& s : flat.wireframe.segments) ++by_opacity[s.opacity];
  EXPECT_EQ(flat.wireframe.segments.size(), 32u);
  EXPECT_EQ(by_opacity[0.25], 20);
  EXPECT_EQ(by_opacity[0.5], 12);
}

TEST(Surface, SilhouetteShowsOriginalBoundaryOfHiddenCells) {
  const GMap g = GMap::build(make_grid(3, 3, 3));
  CellFlags hidden(27, 0);
  hidden[0] = 1;   // corner cell: 3 boundary faces
  hidden[13] = 1;  // centre cell: none
  EXPECT_EQ(silhouette_mesh(g, hidden).polygon_count, 3u);
}

TEST(Surface, IrregularGeometryModes) {
  const GMap g = GMap::build(make_tri_split(2));
  const CellFlags none(g.cell_count(), 0);
  EXPECT_TRUE(irregular_geometry(g, none, IrregularMode::Off, false).empty());
  const auto wire = irregular_geometry(g, none, IrregularMode::Wire, false);
  ASSERT_EQ(wire.lines.segments.size(), 2u);  // the central column, one edge per layer
  EXPECT_EQ(wire.lines.segments[0].color, ValenceColors{}.valence3);
  const auto barbed = irregular_geometry(g, none, IrregularMode::Barbed, true);
  EXPECT_GT(barbed.lines.segments.size(), wire.lines.segments.size());
  EXPECT_TRUE(barbed.xray);
  const auto paper = irregular_geometry(g, none, IrregularMode::Paper, false);
  EXPECT_EQ(paper.faces.polygon_count, 2u * 3u * 2u);  // three faces per edge, two-sided
  const CellFlags all(g.cell_count(), 1);
  EXPECT_TRUE(irregular_geometry(g, all, IrregularMode::Wire, false).empty());
}

TEST(Surface, PickFindsTheFrontCell) {
  const GMap g = GMap::build(make_grid(3, 1, 1));
  const CellFlags none(3, 0);
  const auto s = extract_flat(g, none).surface;
  const auto hit = pick(s, Ray{{-5, 0.5, 0.5}, {1, 0, 0}});
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(hit->cell, 0u);
  EXPECT_DOUBLE_EQ(hit->t, 5.0);
  EXPECT_TRUE(g.faces()[hit->face].boundary);
  EXPECT_FALSE(pick(s, Ray{{-5, 5, 0.5}, {1, 0, 0}}).has_value());
}

TEST(Surface, ModeParametersAreValidated) {
  EXPECT_THROW(validate_mode_parameter(ExtractionMode::Fissure, 0.5), ValidationError);
  EXPECT_THROW(validate_mode_parameter(ExtractionMode::Flat, 0.0), ValidationError);
  EXPECT_NO_THROW(validate_mode_parameter(ExtractionMode::Rounded, 0.2));
  EXPECT_THROW(parse_mode("smooth"), ValidationError);
  EXPECT_EQ(parse_irregular_mode("paper"), IrregularMode::Paper);
}
