#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "hexinspect/ao.hpp"
#include "hexinspect/surface.hpp"
#include "test_support.hpp"

using namespace hexinspect;
using namespace testing_support;

namespace {

SurfaceMesh flat_surface(const HexMesh& m) {
  const GMap g = GMap::build(m);
  return extract_flat(g, CellFlags(g.cell_count(), 0)).surface;
}

/// Fibonacci-lattice directions: a dense, deterministic reference set.
ProbeSet fibonacci(std::size_t n) {
  ProbeSet p;
  const double golden = 3.14159265358979323846 * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
    const double r = std::sqrt(1.0 - z * z);
    const double phi = golden * static_cast<double>(i);
    p.directions.push_back({r * std::cos(phi), r * std::sin(phi), z});
  }
  return p;
}

double min_pairwise_angle(const std::vector<Vec3>& d) {
  double best = 4.0;
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = i + 1; j < d.size(); ++j) best = std::min(best, norm2(d[i] - d[j]));
  return 2.0 * std::asin(std::sqrt(best) / 2.0);
}

double rms(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / static_cast<double>(a.size()));
}

/// A 5x5x4 block with an open-topped 3x3 well, so most vertices see partial occlusion.
HexMesh well() {
  HexMesh g = make_grid(5, 5, 4);
  HexMesh m;
  m.vertices = g.vertices;
  for (CellId c = 0; c < g.cell_count(); ++c) {
    const auto p = lattice_of(g, c);
    const bool inside = p[0] >= 1 && p[0] <= 3 && p[1] >= 1 && p[1] <= 3 && p[2] >= 1;
    if (!inside) m.cells.push_back(g.cells[c]);
  }
  return compact(m);
}

}  // namespace

TEST(Probes, DeterministicUnitAndPrefixNested) {
  const auto a = probe_directions(1024, 0), b = probe_directions(1024, 0), c = probe_directions(256, 0);
  ASSERT_EQ(a.size(), 1024u);
  EXPECT_EQ(a.directions, b.directions);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(c.directions[i], a.directions[i]);
  for (const auto& d : a.directions) EXPECT_NEAR(norm(d), 1.0, 1e-12);
  EXPECT_NE(probe_directions(16, 1).directions, probe_directions(16, 2).directions);
  const auto one = probe_directions(1, 7);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_NEAR(norm(one.directions[0]), 1.0, 1e-12);
  EXPECT_THROW(probe_directions(0, 0), ValidationError);
}

TEST(Probes, EveryOctantIsCovered) {
  const auto p = probe_directions(1024, 3);
  std::array<int, 8> octant{};
  for (const auto& d : p.directions) ++octant[(d.x > 0) | ((d.y > 0) << 1) | ((d.z > 0) << 2)];
  for (int n : octant) EXPECT_GT(n, 64);
}

TEST(Probes, BetterSpacedThanUniformRandom) {
  std::vector<double> ours, baseline;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ours.push_back(min_pairwise_angle(probe_directions(1024, seed).directions));
    std::mt19937_64 rng(seed + 1000);
    std::normal_distribution<double> nd;
    std::vector<Vec3> r;
    while (r.size() < 1024) r.push_back(normalized(Vec3{nd(rng), nd(rng), nd(rng)}));
    baseline.push_back(min_pairwise_angle(r));
  }
  std::sort(ours.begin(), ours.end());
  std::sort(baseline.begin(), baseline.end());
  EXPECT_GT(ours[5], baseline[5]);
}

TEST(Ao, ConvexCubeIsFullyLit) {
  const auto s = flat_surface(make_grid(1, 1, 1));
  for (double v : compute_ao(s, probe_directions(1024, 0))) EXPECT_NEAR(v, 1.0, 1e-6);
  const auto block = flat_surface(make_grid(3, 2, 2));
  for (double v : compute_ao(block, probe_directions(256, 5))) EXPECT_NEAR(v, 1.0, 1e-6);
}

TEST(Ao, DeepPocketFloorIsDark) {
  HexMesh g = make_grid(3, 3, 6);
  HexMesh m;
  m.vertices = g.vertices;
  for (CellId c = 0; c < g.cell_count(); ++c) {
    const auto p = lattice_of(g, c);
    if (!(p[0] == 1 && p[1] == 1 && p[2] >= 1)) m.cells.push_back(g.cells[c]);
  }
  const auto s = flat_surface(compact(m));
  const auto ao = compute_ao(s, probe_directions(1024, 0));
  // Opening of the 1x1x5 shaft seen from a floor corner: at most the cosine
  // weighted solid angle of a unit square at height 5, well below 0.25.
  std::size_t floor = 0;
  for (std::size_t v = 0; v < s.positions.size(); ++v) {
    const auto& p = s.positions[v];
    if (p.z == 1.0 && p.x >= 1 && p.x <= 2 && p.y >= 1 && p.y <= 2 && s.normals[v].z > 0.5) {
      EXPECT_LT(ao[v], 0.25);
      ++floor;
    }
  }
  EXPECT_EQ(floor, 4u);
}

TEST(Ao, NearTouchingPlatesAreDarkBetween) {
  HexMesh a = make_grid(20, 20, 1, 0.5);
  HexMesh b = make_grid(20, 20, 1, 0.5, {0, 0, 0.51});
  const auto base = static_cast<VertexId>(a.vertices.size());
  for (const auto& p : b.vertices) a.vertices.push_back(p);
  for (auto c : b.cells) {
    for (auto& v : c) v += base;
    a.cells.push_back(c);
  }
  const auto s = flat_surface(a);
  const auto ao = compute_ao(s, probe_directions(1024, 0));
  std::size_t checked = 0;
  for (std::size_t v = 0; v < s.positions.size(); ++v) {
    const auto& p = s.positions[v];
    if (p.x == 5.0 && p.y == 5.0 && (p.z == 0.5 || p.z == 0.51)) {
      EXPECT_LT(ao[v], 0.05);
      ++checked;
    }
  }
  EXPECT_EQ(checked, 8u);
}

TEST(Ao, DeterministicAcrossRunsThreadsAndBatches) {
  const auto s = flat_surface(well());
  const auto probes = probe_directions(256, 9);
  const auto a = compute_ao(s, probes, 1);
  EXPECT_EQ(a, compute_ao(s, probes, 1));
  EXPECT_EQ(a, compute_ao(s, probes, 4));
  const Bvh bvh(s.positions, s.triangles);
  AoAccumulator acc(s, bvh, ao_epsilon(s));
  acc.add(probes, 0, 6);
  acc.add(probes, 6, 100);
  acc.add(probes, 100, probes.size());
  EXPECT_EQ(acc.probes_used(), probes.size());
  EXPECT_EQ(acc.values(), a);
}

TEST(Ao, ValuesInUnitIntervalAndSharedPositionsMayDiffer) {
  const auto s = flat_surface(well());
  const auto ao = compute_ao(s, probe_directions(512, 2));
  bool some_partial = false;
  for (double v : ao) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    some_partial = some_partial || (v > 0.05 && v < 0.95);
  }
  EXPECT_TRUE(some_partial);
}

TEST(Ao, QuarterTurnOfSurfaceAndProbesIsExact) {
  const auto s = flat_surface(well());
  const auto probes = probe_directions(512, 4);
  const auto turn = [](Vec3 p) { return Vec3{-p.y, p.x, p.z}; };
  SurfaceMesh r = s;
  for (auto& p : r.positions) p = turn(p);
  for (auto& n : r.normals) n = turn(n);
  ProbeSet rp = probes;
  for (auto& d : rp.directions) d = turn(d);
  EXPECT_EQ(compute_ao(s, probes), compute_ao(r, rp));
}

TEST(Ao, RotatingSurfaceAloneChangesLittle) {
  const auto s = flat_surface(well());
  const auto probes = probe_directions(1024, 0);
  const double a = 0.7, c = std::cos(a), si = std::sin(a);
  const auto rot = [&](Vec3 p) { return Vec3{c * p.x - si * p.z, p.y, si * p.x + c * p.z}; };
  SurfaceMesh r = s;
  for (auto& p : r.positions) p = rot(p);
  for (auto& n : r.normals) n = rot(n);
  EXPECT_LE(rms(compute_ao(s, probes), compute_ao(r, probes)), 0.05);
}

TEST(Ao, ErrorShrinksAsProbesDouble) {
  const auto s = flat_surface(well());
  const auto reference = compute_ao(s, fibonacci(16384));
  std::vector<double> err;
  for (std::size_t n = 64; n <= 1024; n *= 2) {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 4; ++seed) total += rms(compute_ao(s, probe_directions(n, seed)), reference);
    err.push_back(total / 4.0);
  }
  for (std::size_t i = 0; i + 1 < err.size(); ++i) {
    const double factor = err[i] / err[i + 1];
    EXPECT_GE(factor, 1.0) << i;
    EXPECT_LE(factor, 4.0) << i;
  }
}
