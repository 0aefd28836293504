#include <gtest/gtest.h>

#include <random>
#include <regex>
#include <set>

#include "hexinspect/colormap.hpp"
#include "hexinspect/histogram_svg.hpp"
#include "hexinspect/png.hpp"
#include "hexinspect/raster.hpp"
#include "test_support.hpp"

using namespace hexinspect;
using namespace testing_support;

namespace {

Scene cube_scene() {
  const GMap g = GMap::build(make_grid(1, 1, 1));
  Scene s;
  s.surface = extract_flat(g, CellFlags(1, 0)).surface;
  s.surface.ao.assign(s.surface.positions.size(), 1.0);
  return s;
}

Camera front_camera() {
  Camera c;
  c.direction = {0, 0, -1};
  c.up = {0, 1, 0};
  c.target = {0.5, 0.5, 0.5};
  c.distance = 4.0;
  return c;
}

std::size_t count_color(const Image& img, std::array<std::uint8_t, 4> c) {
  std::size_t n = 0;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) n += img.pixel(x, y) == c;
  return n;
}

}  // namespace

TEST(Colormap, JetRunsFromRedToBlue) {
  const Rgb worst = apply_colormap(0.0, Colormap::Jet), best = apply_colormap(1.0, Colormap::Jet);
  EXPECT_GT(worst.r, 0.4);
  EXPECT_EQ(worst.g, 0.0);
  EXPECT_EQ(worst.b, 0.0);
  EXPECT_EQ(best.r, 0.0);
  EXPECT_GT(best.b, 0.4);
}

TEST(Colormap, MidpointIsTableMidpoint) {
  for (Colormap m : {Colormap::Parula, Colormap::Jet, Colormap::RedBlue}) {
    const auto& t = lut(m);
    const Rgb mid = apply_colormap(0.5, m);
    EXPECT_NEAR(mid.r, 0.5 * (t[127].r + t[128].r), 1e-12);
    EXPECT_NEAR(mid.g, 0.5 * (t[127].g + t[128].g), 1e-12);
    EXPECT_NEAR(mid.b, 0.5 * (t[127].b + t[128].b), 1e-12);
  }
  const Rgb white = apply_colormap(0.5, Colormap::RedBlue);
  EXPECT_GT(white.r, 0.9);
  EXPECT_GT(white.b, 0.9);
}

TEST(Colormap, DeterministicAndClamped) {
  std::vector<double> v{0.0, 0.3, 0.7, 1.0};
  EXPECT_EQ(apply_colormap(v, Colormap::Parula), apply_colormap(v, Colormap::Parula));
  EXPECT_EQ(apply_colormap(-1.0, Colormap::Parula), apply_colormap(0.0, Colormap::Parula));
  EXPECT_EQ(apply_colormap(2.0, Colormap::Parula), apply_colormap(1.0, Colormap::Parula));
  EXPECT_THROW(parse_colormap("viridis"), ValidationError);
  EXPECT_THROW(lut(Colormap::None), ValidationError);
}

TEST(Raster, EmptySceneIsBackground) {
  RenderOptions o;
  o.width = 32;
  o.height = 24;
  o.background = {0.2, 0.4, 0.6};
  const Image img = render({}, front_camera(), o);
  EXPECT_EQ(count_color(img, {51, 102, 153, 255}), 32u * 24u);
  o.width = 0;
  EXPECT_THROW(render({}, front_camera(), o), ValidationError);
}

TEST(Raster, WhiteCubeUnderAoIsUniform) {
  RenderOptions o;
  o.width = 64;
  o.height = 64;
  o.background = {0, 0, 0};
  const Image img = render(cube_scene(), front_camera(), o);
  const std::size_t white = count_color(img, {255, 255, 255, 255});
  const std::size_t black = count_color(img, {0, 0, 0, 255});
  EXPECT_GT(white, 200u);
  EXPECT_EQ(white + black, 64u * 64u);
}

TEST(Raster, DirectLightingFollowsViewAngle) {
  RenderOptions o;
  o.lighting = Lighting::Direct;
  o.width = 64;
  o.height = 64;
  o.background = {0, 0, 0};
  Camera c = front_camera();
  c.direction = {-1, -1, -1};
  const Image img = render(cube_scene(), c, o);
  std::set<std::array<std::uint8_t, 4>> colors;
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) colors.insert(img.pixel(x, y));
  // The three visible faces meet the view ray at the same angle.
  const auto g = static_cast<std::uint8_t>(std::lround(255.0 / std::sqrt(3.0)));
  EXPECT_EQ(colors, (std::set<std::array<std::uint8_t, 4>>{{0, 0, 0, 255}, {g, g, g, 255}}));
}

TEST(Raster, TrianglePermutationDoesNotChangeOpaquePass) {
  std::mt19937_64 rng(5);
  HexMesh m = random_subgrid(rng, 4, 0.7);
  jitter(m, rng, 0.2);
  const GMap g = GMap::build(m);
  Scene a;
  a.surface = extract_flat(g, CellFlags(g.cell_count(), 0)).surface;
  for (std::size_t i = 0; i < a.surface.colors.size(); ++i)
    a.surface.colors[i] = {(i % 7) / 7.0, (i % 5) / 5.0, (i % 3) / 3.0};
  Scene b = a;
  std::vector<std::size_t> perm(b.surface.triangles.size());
  std::iota(perm.begin(), perm.end(), 0u);
  std::shuffle(perm.begin(), perm.end(), rng);
  Scene c = a;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    c.surface.triangles[i] = a.surface.triangles[perm[i]];
    c.surface.sources[i] = a.surface.sources[perm[i]];
  }
  RenderOptions o;
  o.width = 96;
  o.height = 80;
  o.lighting = Lighting::Direct;
  const Camera cam = frame({}, g.bounds());
  EXPECT_EQ(render(a, cam, o).rgba, render(c, cam, o).rgba);
}

TEST(Raster, FramingFitsBoundingSphere) {
  Aabb box;
  box.expand({0, 0, 0});
  box.expand({2, 2, 2});
  const Camera c = frame({}, box);
  EXPECT_EQ(c.target, (Vec3{1, 1, 1}));
  EXPECT_GT(c.distance, std::sqrt(3.0));
  Camera fixed;
  fixed.distance = 7;
  EXPECT_EQ(frame(fixed, box).distance, 7.0);
}

TEST(Raster, RejectsParallelUp) {
  Camera c = front_camera();
  c.up = {0, 0, 1};
  EXPECT_THROW(render({}, c, {}), ValidationError);
}

TEST(Png, EncodeDecodeRoundTrip) {
  Image img{5, 3, {}};
  for (int i = 0; i < 5 * 3 * 4; ++i) img.rgba.push_back(static_cast<std::uint8_t>(i * 17));
  const Bytes png = encode_png(img);
  ASSERT_TRUE(is_png(png));
  const Image back = decode_png(png);
  EXPECT_EQ(back.width, 5);
  EXPECT_EQ(back.height, 3);
  EXPECT_EQ(back.rgba, img.rgba);
  EXPECT_EQ(encode_png(img), png);
}

TEST(Png, TextChunkReplacedBeforeIend) {
  Image img{2, 2, std::vector<std::uint8_t>(16, 200)};
  const Bytes plain = encode_png(img);
  EXPECT_FALSE(extract_text(plain, "hexalab-status").has_value());
  const Bytes once = embed_text(plain, "hexalab-status", "{\"a\":1}");
  const Bytes twice = embed_text(once, "hexalab-status", "{\"a\":2}");
  EXPECT_EQ(*extract_text(twice, "hexalab-status"), "{\"a\":2}");
  const auto chunks = read_chunks(twice);
  std::size_t texts = 0;
  for (const auto& c : chunks) texts += c.type == "tEXt";
  EXPECT_EQ(texts, 1u);
  EXPECT_EQ(chunks[chunks.size() - 2].type, "tEXt");
  EXPECT_EQ(chunks.back().type, "IEND");
  // Pixel data untouched.
  const auto idat = [](const Bytes& b) {
    for (const auto& c : read_chunks(b))
      if (c.type == "IDAT") return c.data;
    return Bytes{};
  };
  EXPECT_EQ(idat(twice), idat(plain));
  EXPECT_EQ(decode_png(twice).rgba, img.rgba);
}

TEST(Png, RejectsNonPngAndCorruption) {
  EXPECT_THROW(read_chunks(to_bytes("GIF89a....")), FormatError);
  Image img{2, 2, std::vector<std::uint8_t>(16, 9)};
  Bytes png = encode_png(img);
  png[20] ^= 0xFF;  // inside IHDR data
  EXPECT_THROW(read_chunks(png), FormatError);
}

TEST(HistogramSvg, SingleBinIsFullWidth) {
  Histogram h;
  h.metric = Metric::SJ;
  h.orientation = Orientation::Horizontal;
  h.counts = {7};
  h.edges = {0, 1};
  h.raw_edges = {0, 1};
  const std::string svg = render_histogram(h, Colormap::Jet);
  EXPECT_NE(svg.find("width=\"400.00\" height=\"200.00\" fill"), std::string::npos) << svg;
}

TEST(HistogramSvg, TwoEqualBinsCarryEndColors) {
  Histogram h;
  h.metric = Metric::SJ;
  h.counts = {1, 1};
  h.edges = {0, 0.5, 1};
  h.raw_edges = {0, 0.5, 1};
  const std::string svg = render_histogram(h, Colormap::Jet);
  const std::regex bar("<rect class=\"bar\"[^>]*width=\"([0-9.]+)\" height=\"([0-9.]+)\" fill=\"(#[0-9a-f]+)\"");
  std::vector<std::smatch> bars;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), bar); it != std::sregex_iterator(); ++it)
    bars.push_back(*it);
  ASSERT_EQ(bars.size(), 2u);
  EXPECT_EQ(bars[0][1], bars[1][1]);
  EXPECT_EQ(bars[0][2], bars[1][2]);
  EXPECT_EQ(bars[0][3].str(), svg_detail::hex(apply_colormap(0.0, Colormap::Jet)));
  EXPECT_EQ(bars[1][3].str(), svg_detail::hex(apply_colormap(1.0, Colormap::Jet)));
}

TEST(HistogramSvg, OrientationsTransposeWithSameLabels) {
  Histogram h;
  h.metric = Metric::ER;
  h.counts = {3, 0, 5, 1};
  h.edges = {0, 0.25, 0.5, 0.75, 1};
  h.raw_edges = {4, 3.25, 2.5, 1.75, 1};
  const auto labels = [](const std::string& s) {
    std::vector<std::string> out;
    const std::regex tick("<text class=\"tick\"[^>]*>([^<]*)</text>");
    for (auto it = std::sregex_iterator(s.begin(), s.end(), tick); it != std::sregex_iterator(); ++it)
      out.push_back((*it)[1]);
    return out;
  };
  const auto geometry = [](const std::string& s) {
    std::vector<std::array<std::string, 4>> out;
    const std::regex r("x=\"([0-9.]+)\" y=\"([0-9.]+)\" width=\"([0-9.]+)\" height=\"([0-9.]+)\"");
    for (auto it = std::sregex_iterator(s.begin(), s.end(), r); it != std::sregex_iterator(); ++it)
      out.push_back({(*it)[1], (*it)[2], (*it)[3], (*it)[4]});
    return out;
  };
  h.orientation = Orientation::Vertical;
  const std::string v = render_histogram(h, Colormap::Parula);
  h.orientation = Orientation::Horizontal;
  const std::string hz = render_histogram(h, Colormap::Parula);
  EXPECT_EQ(labels(v), labels(hz));
  EXPECT_EQ(labels(v), (std::vector<std::string>{"1", "2.5", "4"}));
  const auto gv = geometry(v), gh = geometry(hz);
  ASSERT_EQ(gv.size(), gh.size());
  for (std::size_t i = 0; i < gv.size(); ++i) {
    EXPECT_EQ(gv[i][2], gh[i][3]);  // bar length and thickness swap
    EXPECT_EQ(gv[i][3], gh[i][2]);
  }
}
