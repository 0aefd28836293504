#include <gtest/gtest.h>

#include <random>

#include "hexinspect/filters.hpp"
#include "test_support.hpp"

using namespace hexinspect;
using namespace testing_support;

namespace {

bool subset(const CellFlags& a, const CellFlags& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] && !b[i]) return false;
  return true;
}

std::size_t count(const CellFlags& f) { return static_cast<std::size_t>(std::count(f.begin(), f.end(), 1)); }

CellFlags random_flags(std::mt19937_64& rng, std::size_t n, double p) {
  std::bernoulli_distribution b(p);
  CellFlags f(n);
  for (auto& x : f) x = b(rng);
  return f;
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  for (;;) {
    const Vec3 v{nd(rng), nd(rng), nd(rng)};
    if (norm(v) > 1e-6) return normalized(v);
  }
}

struct Fixture {
  HexMesh mesh;
  GMap g;
  std::vector<std::uint32_t> depths;
};

Fixture random_fixture(std::mt19937_64& rng) {
  HexMesh m = random_subgrid(rng, 6, 0.85);
  jitter(m, rng, 0.2);
  GMap g = GMap::build(m);
  auto d = peel_depths(g);
  return {std::move(m), std::move(g), std::move(d)};
}

/// Cells sharing a vertex with `c`, recomputed from raw cell lists.
std::vector<std::vector<CellId>> vertex_neighbors(const HexMesh& m) {
  std::vector<std::vector<CellId>> nb(m.cell_count());
  for (CellId a = 0; a < m.cell_count(); ++a)
    for (CellId b = 0; b < m.cell_count(); ++b) {
      bool share = false;
      for (VertexId u : m.cells[a])
        for (VertexId v : m.cells[b]) share = share || u == v;
      if (share) nb[a].push_back(b);
    }
  return nb;
}

}  // namespace

TEST(Filters, PlaneSliderIsMonotoneWithNullAndCompleteExtremes) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    auto fx = random_fixture(rng);
    Plane p{random_unit(rng), 0.0, true};
    const auto at = [&](double s) {
      p.offset = plane_offset_from_slider(fx.g.bounds(), p.normal, s);
      return plane_filter(fx.g, p);
    };
    EXPECT_EQ(count(at(0.0)), 0u);
    EXPECT_EQ(count(at(1.0)), fx.g.cell_count());
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    EXPECT_TRUE(subset(at(a), at(b)));
  }
}

TEST(Filters, PeelSliderIsMonotoneWithNullAndCompleteExtremes) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    auto fx = random_fixture(rng);
    const auto md = max_depth(fx.depths);
    const auto at = [&](double s) { return peel_filter(fx.depths, peel_from_slider(s, md)); };
    EXPECT_EQ(count(at(0.0)), 0u);
    EXPECT_EQ(count(at(1.0)), fx.g.cell_count());
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    EXPECT_TRUE(subset(at(a), at(b)));
  }
}

TEST(Filters, QualitySliderIsMonotoneWithNullAndCompleteExtremes) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, kAllMetrics.size() - 1);
  for (int trial = 0; trial < 60; ++trial) {
    auto fx = random_fixture(rng);
    const Metric m = kAllMetrics[pick(rng)];
    const auto field = evaluate_metric(fx.mesh, m);
    const auto at = [&](double s) { return quality_filter(field.normalized, quality_threshold_from_slider(m, s)); };
    EXPECT_EQ(count(at(0.0)), 0u) << metric_name(m);
    if (m != Metric::SJ) EXPECT_EQ(count(at(1.0)), fx.g.cell_count()) << metric_name(m);
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    EXPECT_TRUE(subset(at(a), at(b))) << metric_name(m);
  }
}

TEST(Filters, QualitySliderFullKeepsOnlyInvertedScaledJacobianCells) {
  HexMesh m = make_grid(3, 3, 2);
  // Mirror two cells so their scaled Jacobian is negative.
  for (CellId c : {CellId{1}, CellId{7}}) {
    auto& cell = m.cells[c];
    std::swap(cell[1], cell[3]);
    std::swap(cell[5], cell[7]);
  }
  const auto field = evaluate_metric(m, Metric::SJ);
  const auto f = quality_filter(field.normalized, quality_threshold_from_slider(Metric::SJ, 1.0));
  for (CellId c = 0; c < m.cell_count(); ++c) EXPECT_EQ(f[c] == 0, c == 1 || c == 7) << c;
}

TEST(Filters, DilateAndErodeMatchNeighborhoodDefinitions) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    auto fx = random_fixture(rng);
    const auto nb = vertex_neighbors(fx.mesh);
    const auto h = random_flags(rng, fx.g.cell_count(), 0.3);
    const auto d = dilate(fx.g, h), e = erode(fx.g, h);
    for (CellId c = 0; c < fx.g.cell_count(); ++c) {
      bool any = false, all = true;
      for (CellId o : nb[c]) {
        any = any || h[o];
        all = all && h[o];
      }
      EXPECT_EQ(d[c] != 0, any);
      EXPECT_EQ(e[c] != 0, all);
    }
  }
}

TEST(Filters, RegularizationIsIdempotentMonotoneAndExtensive) {
  std::mt19937_64 rng(15);
  std::uniform_int_distribution<int> level(0, kMaxRegularization);
  for (int trial = 0; trial < 60; ++trial) {
    auto fx = random_fixture(rng);
    const int n = level(rng);
    auto a = random_flags(rng, fx.g.cell_count(), 0.3);
    auto b = a;
    for (auto& x : b) x = x || (rng() % 4 == 0);
    const auto ra = regularize(fx.g, a, n);
    const auto rb = regularize(fx.g, b, n);
    EXPECT_EQ(regularize(fx.g, ra, n), ra);
    EXPECT_TRUE(subset(ra, rb));
    EXPECT_TRUE(subset(a, ra));
  }
}

TEST(Filters, DigThenUndigRestoresState) {
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    auto fx = random_fixture(rng);
    FilterParams p;
    p.plane = {random_unit(rng), 0.0, true};
    p.plane.offset = plane_offset_from_slider(fx.g.bounds(), p.plane.normal, 0.5 * u(rng));
    p.regularization = static_cast<int>(rng() % 3);
    const auto s0 = compose(fx.g, p, fx.depths, {});
    const auto faces = current_boundary_faces(fx.g, s0.hidden);
    if (faces.empty()) continue;
    const auto& bf = faces[rng() % faces.size()];
    const auto dug = manual_edit(fx.g, s0, fx.depths, {}, EditAction::Dig, bf.face);
    const auto s1 = compose(fx.g, dug.params, fx.depths, {});
    EXPECT_TRUE(s1.hidden[bf.cell]);
    EXPECT_EQ(s1.hidden_count(), s0.hidden_count() + 1);
    const auto undug = manual_edit(fx.g, s1, fx.depths, {}, EditAction::Undig, bf.face);
    EXPECT_EQ(undug.params, p);
    EXPECT_EQ(compose(fx.g, undug.params, fx.depths, {}).hidden, s0.hidden);
    ++checked;
  }
  EXPECT_GT(checked, 40);
}

TEST(Filters, DigOnFullyVisibleCubeHidesThatCell) {
  const GMap g = GMap::build(make_grid(2, 2, 2));
  const auto depths = peel_depths(g);
  const auto s0 = compose(g, {}, depths, {});
  const auto bf = current_boundary_faces(g, s0.hidden).front();
  const auto r = manual_edit(g, s0, depths, {}, EditAction::Dig, bf.face);
  const auto s1 = compose(g, r.params, depths, {});
  EXPECT_EQ(s1.hidden_count(), 1u);
  EXPECT_TRUE(s1.hidden[bf.cell]);
}

TEST(Filters, UndigWithoutHiddenCellIsNoticeOnly) {
  const GMap g = GMap::build(make_grid(2, 1, 1));
  const auto depths = peel_depths(g);
  const auto s0 = compose(g, {}, depths, {});
  const auto bf = current_boundary_faces(g, s0.hidden).front();
  const auto r = manual_edit(g, s0, depths, {}, EditAction::Undig, bf.face);
  EXPECT_TRUE(r.notice.has_value());
  EXPECT_EQ(r.params, s0.params);
}

TEST(Filters, DigOnInteriorFaceIsRejected) {
  const GMap g = GMap::build(make_grid(2, 1, 1));
  const auto depths = peel_depths(g);
  const auto s0 = compose(g, {}, depths, {});
  FaceId interior = kInvalid;
  for (FaceId f = 0; f < g.faces().size(); ++f)
    if (!g.faces()[f].boundary) interior = f;
  ASSERT_NE(interior, kInvalid);
  EXPECT_THROW(manual_edit(g, s0, depths, {}, EditAction::Dig, interior), ValidationError);
}

TEST(Filters, UndugOverridesAndIsolateOverridesBoth) {
  const GMap g = GMap::build(make_grid(3, 3, 3));
  const auto depths = peel_depths(g);
  FilterParams p;
  p.peel_min_depth = 1;  // only the centre cell remains
  p.undug = {0};
  p.dug = {13};
  auto s = compose(g, p, depths, {});
  EXPECT_FALSE(s.hidden[0]);
  EXPECT_TRUE(s.hidden[13]);
  EXPECT_EQ(s.visible_count(), 1u);
  const auto r = manual_edit(g, s, depths, {}, EditAction::Isolate, 5);
  s = compose(g, r.params, depths, {});
  EXPECT_EQ(s.visible_count(), 1u);
  EXPECT_FALSE(s.hidden[5]);
  EXPECT_TRUE(r.params.dug.empty() && r.params.undug.empty());
}

TEST(Filters, ValidationRejectsBadParameters) {
  const GMap g = GMap::build(make_grid(1, 1, 1));
  const auto depths = peel_depths(g);
  FilterParams p;
  p.regularization = 6;
  EXPECT_THROW(compose(g, p, depths, {}), ValidationError);
  p = {};
  p.dug = {4};
  EXPECT_THROW(compose(g, p, depths, {}), ValidationError);
  p = {};
  p.plane = {{1, 1, 0}, 0, true};
  EXPECT_THROW(compose(g, p, depths, {}), ValidationError);
}

TEST(Filters, PlaneFromViewInvertsWithinTwentyDegrees) {
  const Plane current{{0, 0, 1}, 0.5, true};
  const double a = 15.0 * 3.14159265358979323846 / 180.0;
  const Plane inv = plane_from_view({std::sin(a), 0, -std::cos(a)}, current, false, {});
  EXPECT_EQ(inv.normal, (Vec3{0, 0, -1}));
  EXPECT_EQ(inv.offset, -0.5);
  const double b = 25.0 * 3.14159265358979323846 / 180.0;
  const Plane fresh = plane_from_view({std::sin(b), 0, -std::cos(b)}, current, false, {1, 2, 3});
  EXPECT_NEAR(fresh.normal.x, std::sin(b), 1e-12);
  EXPECT_NEAR(fresh.offset, dot(fresh.normal, Vec3{1, 2, 3}), 1e-12);
  const Plane snapped = plane_from_view({0.3, -0.9, 0.1}, {}, true, {1, 2, 3});
  EXPECT_EQ(snapped.normal, (Vec3{0, -1, 0}));
  EXPECT_EQ(snapped.offset, -2.0);
}

TEST(Filters, RawThresholdHidesCellsNotWorseThanIt) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    HexMesh m = random_subgrid(rng, 5, 0.9);
    jitter(m, rng, 0.3);
    const auto field = evaluate_metric(m, Metric::SJ);
    const auto hidden = quality_filter(field.normalized, quality_threshold_from_raw(field, 0.96));
    for (CellId c = 0; c < m.cell_count(); ++c) EXPECT_EQ(hidden[c] == 0, field.raw[c] < 0.96) << c;
  }
}
