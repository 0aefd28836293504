#pragma once

// Per-cell quality metrics (Verdict definitions), normalization to [0,1] with
// 0 = worst, histograms and summaries.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hexinspect/errors.hpp"
#include "hexinspect/gmap.hpp"
#include "hexinspect/hex_mesh.hpp"
#include "hexinspect/numfmt.hpp"

namespace hexinspect {

enum class Metric {
  DIA, DIS, ER, J, MER, MAAF, MEAF, ODD, RSS, SJ, SHA, SHAS, SHE, SHES, SKE, STR, TAP, VOL
};

inline constexpr std::array<Metric, 18> kAllMetrics{
    Metric::DIA, Metric::DIS, Metric::ER,  Metric::J,    Metric::MER, Metric::MAAF,
    Metric::MEAF, Metric::ODD, Metric::RSS, Metric::SJ,  Metric::SHA, Metric::SHAS,
    Metric::SHE, Metric::SHES, Metric::SKE, Metric::STR, Metric::TAP, Metric::VOL};

/// How raw values map into [0,1].
enum class PhiFamily {
  Identity,   ///< q
  ClampedSJ,  ///< max(q, 0)
  MinMax,     ///< (q - qmin) / (qmax - qmin)
  MaxDown1,   ///< (qmax - q) / (qmax - 1)
  MaxDown0,   ///< (qmax - q) / qmax
  MaxOnly,    ///< q / qmax
};

struct Range {
  double lo, hi;
  [[nodiscard]] bool contains(double q) const { return q >= lo && q <= hi; }
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct MetricSpec {
  Metric id;
  std::string_view name;
  std::string_view long_name;
  Range full;
  std::optional<Range> acceptable;
  std::optional<double> unit_cube;
  PhiFamily phi;
};

inline constexpr std::array<MetricSpec, 18> kMetricSpecs{{
    {Metric::DIA, "DIA", "Diagonal", {0, 1}, Range{0.65, 1}, 1.0, PhiFamily::Identity},
    {Metric::DIS, "DIS", "Distortion", {-kInf, kInf}, Range{0.5, 1}, 1.0, PhiFamily::MinMax},
    {Metric::ER, "ER", "Edge Ratio", {1, kInf}, std::nullopt, 1.0, PhiFamily::MaxDown1},
    {Metric::J, "J", "Jacobian", {-kInf, kInf}, Range{0, kInf}, 1.0, PhiFamily::MinMax},
    {Metric::MER, "MER", "Maximum Edge Ratio", {1, kInf}, Range{1, 1.3}, 1.0, PhiFamily::MaxDown1},
    {Metric::MAAF, "MAAF", "Maximum Aspect Frobenius", {1, kInf}, Range{1, 3}, 1.0, PhiFamily::MaxDown1},
    {Metric::MEAF, "MEAF", "Mean Aspect Frobenius", {1, kInf}, Range{1, 3}, 1.0, PhiFamily::MaxDown1},
    {Metric::ODD, "ODD", "Oddy", {0, kInf}, Range{0, 0.5}, 0.0, PhiFamily::MaxDown0},
    {Metric::RSS, "RSS", "Relative Size Squared", {0, 1}, Range{0.5, 1}, std::nullopt, PhiFamily::Identity},
    {Metric::SJ, "SJ", "Scaled Jacobian", {-1, 1}, Range{0.5, 1}, 1.0, PhiFamily::ClampedSJ},
    {Metric::SHA, "SHA", "Shape", {0, 1}, Range{0.3, 1}, 1.0, PhiFamily::Identity},
    {Metric::SHAS, "SHAS", "Shape and Size", {0, 1}, Range{0.2, 1}, std::nullopt, PhiFamily::Identity},
    {Metric::SHE, "SHE", "Shear", {0, 1}, Range{0.3, 1}, 1.0, PhiFamily::Identity},
    {Metric::SHES, "SHES", "Shear and Size", {0, 1}, Range{0.2, 1}, std::nullopt, PhiFamily::Identity},
    {Metric::SKE, "SKE", "Skew", {0, kInf}, Range{0, 0.5}, 0.0, PhiFamily::MaxDown0},
    {Metric::STR, "STR", "Stretch", {0, kInf}, Range{0.25, 1}, 1.0, PhiFamily::MaxOnly},
    {Metric::TAP, "TAP", "Taper", {0, kInf}, Range{0, 0.5}, 0.0, PhiFamily::MaxDown0},
    {Metric::VOL, "VOL", "Volume", {-kInf, kInf}, Range{0, kInf}, 1.0, PhiFamily::MinMax},
}};

inline const MetricSpec& metric_spec(Metric m) { return kMetricSpecs[static_cast<std::size_t>(m)]; }
inline std::string_view metric_name(Metric m) { return metric_spec(m).name; }

inline Metric parse_metric(std::string_view s) {
  std::string up(s);
  for (auto& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (const auto& spec : kMetricSpecs)
    if (spec.name == up) return spec.id;
  std::string ids;
  for (const auto& spec : kMetricSpecs) ids += (ids.empty() ? "" : ", ") + std::string(spec.name);
  throw ValidationError("unknown quality metric '" + std::string(s) + "' (valid: " + ids + ")");
}

/// Stand-in for an unbounded raw value; every metric result is clamped to +-kHuge.
inline constexpr double kHuge = 1e30;
inline constexpr double kTiny = 1e-30;

namespace quality_detail {

using Corners = std::array<Vec3, 8>;

// Derivatives of the trilinear map at the cell center, times 8 (the Verdict efg vectors).
inline Vec3 efg1(const Corners& x) { return x[1] + x[2] + x[5] + x[6] - x[0] - x[3] - x[4] - x[7]; }
inline Vec3 efg2(const Corners& x) { return x[2] + x[3] + x[6] + x[7] - x[0] - x[1] - x[4] - x[5]; }
inline Vec3 efg3(const Corners& x) { return x[4] + x[5] + x[6] + x[7] - x[0] - x[1] - x[2] - x[3]; }
// Mixed second derivatives, times 8.
inline Vec3 efg12(const Corners& x) { return x[0] - x[1] + x[2] - x[3] + x[4] - x[5] + x[6] - x[7]; }
inline Vec3 efg13(const Corners& x) { return x[0] - x[1] - x[2] + x[3] - x[4] + x[5] + x[6] - x[7]; }
inline Vec3 efg23(const Corners& x) { return x[0] + x[1] - x[2] - x[3] - x[4] - x[5] + x[6] + x[7]; }

struct Frame {
  Vec3 a, b, c;
  [[nodiscard]] double det() const { return triple(a, b, c); }
};

inline Frame corner_frame(const Corners& x, int i) {
  const auto& n = kCornerNeighbors[i];
  return {x[n[0]] - x[i], x[n[1]] - x[i], x[n[2]] - x[i]};
}

inline std::array<double, 12> edge_lengths(const Corners& x) {
  std::array<double, 12> l{};
  for (int e = 0; e < 12; ++e) l[e] = norm(x[kHexEdges[e][1]] - x[kHexEdges[e][0]]);
  return l;
}

inline std::array<double, 4> diagonal_lengths(const Corners& x) {
  return {norm(x[6] - x[0]), norm(x[7] - x[1]), norm(x[4] - x[2]), norm(x[5] - x[3])};
}

inline double clampq(double q, double worst) {
  if (std::isnan(q)) return worst;
  return std::clamp(q, -kHuge, kHuge);
}

inline double edge_ratio(const Corners& x) {
  const auto l = edge_lengths(x);
  const auto [lo, hi] = std::minmax_element(l.begin(), l.end());
  if (*lo < kTiny) return kHuge;
  return *hi / *lo;
}

inline double max_edge_ratio(const Corners& x) {
  const double m1 = norm(efg1(x)), m2 = norm(efg2(x)), m3 = norm(efg3(x));
  if (m1 < kTiny || m2 < kTiny || m3 < kTiny) return kHuge;
  const double r12 = std::max(m1 / m2, m2 / m1);
  const double r13 = std::max(m1 / m3, m3 / m1);
  const double r23 = std::max(m2 / m3, m3 / m2);
  return std::max({r12, r13, r23});
}

inline double skew(const Corners& x) {
  const Vec3 e1 = efg1(x), e2 = efg2(x), e3 = efg3(x);
  if (norm(e1) < kTiny || norm(e2) < kTiny || norm(e3) < kTiny) return kHuge;
  const Vec3 u = normalized(e1), v = normalized(e2), w = normalized(e3);
  return std::max({std::abs(dot(u, v)), std::abs(dot(u, w)), std::abs(dot(v, w))});
}

inline double taper(const Corners& x) {
  const double m1 = norm(efg1(x)), m2 = norm(efg2(x)), m3 = norm(efg3(x));
  const double m12 = norm(efg12(x)), m13 = norm(efg13(x)), m23 = norm(efg23(x));
  const double d12 = std::min(m1, m2), d13 = std::min(m1, m3), d23 = std::min(m2, m3);
  if (d12 < kTiny || d13 < kTiny || d23 < kTiny) return kHuge;
  return std::max({m12 / d12, m13 / d13, m23 / d23});
}

inline double volume(const Corners& x) { return triple(efg1(x), efg2(x), efg3(x)) / 64.0; }

inline double stretch(const Corners& x) {
  const auto l = edge_lengths(x);
  const auto d = diagonal_lengths(x);
  const double dmax = *std::max_element(d.begin(), d.end());
  if (dmax < kTiny) return 0.0;
  return std::sqrt(3.0) * *std::min_element(l.begin(), l.end()) / dmax;
}

inline double diagonal(const Corners& x) {
  const auto d = diagonal_lengths(x);
  const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
  if (*hi < kTiny) return 0.0;
  return *lo / *hi;
}

inline double oddy_of(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double det = triple(a, b, c);
  if (det < kTiny) return kHuge;
  const double g11 = dot(a, a), g12 = dot(a, b), g13 = dot(a, c);
  const double g22 = dot(b, b), g23 = dot(b, c), g33 = dot(c, c);
  const double frob2 = g11 * g11 + g22 * g22 + g33 * g33 + 2 * (g12 * g12 + g13 * g13 + g23 * g23);
  const double tr = g11 + g22 + g33;
  return (frob2 - tr * tr / 3.0) / std::pow(det, 4.0 / 3.0);
}

inline double oddy(const Corners& x) {
  double worst = oddy_of(efg1(x) / 4.0, efg2(x) / 4.0, efg3(x) / 4.0);
  for (int i = 0; i < 8; ++i) {
    const Frame f = corner_frame(x, i);
    worst = std::max(worst, oddy_of(f.a, f.b, f.c));
  }
  return worst;
}

inline double jacobian(const Corners& x) {
  double j = volume(x);
  for (int i = 0; i < 8; ++i) j = std::min(j, corner_frame(x, i).det());
  return j;
}

inline double scaled(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double l = norm(a) * norm(b) * norm(c);
  if (norm(a) < kTiny || norm(b) < kTiny || norm(c) < kTiny || l < kTiny) return -1.0;
  return std::clamp(triple(a, b, c) / l, -1.0, 1.0);
}

inline double scaled_jacobian(const Corners& x) {
  double sj = scaled(efg1(x), efg2(x), efg3(x));
  for (int i = 0; i < 8; ++i) {
    const Frame f = corner_frame(x, i);
    sj = std::min(sj, scaled(f.a, f.b, f.c));
  }
  return sj;
}

inline double shear(const Corners& x) {
  double s = 1.0;
  for (int i = 0; i < 8; ++i) {
    const Frame f = corner_frame(x, i);
    s = std::min(s, scaled(f.a, f.b, f.c));
  }
  return std::max(s, 0.0);
}

inline double shape(const Corners& x) {
  double s = 1.0;
  for (int i = 0; i < 8; ++i) {
    const Frame f = corner_frame(x, i);
    const double det = f.det();
    const double den = norm2(f.a) + norm2(f.b) + norm2(f.c);
    if (det <= kTiny || den < kTiny) return 0.0;
    s = std::min(s, 3.0 * std::cbrt(det * det) / den);
  }
  return s;
}

inline double corner_condition(const Frame& f) {
  const double det = f.det();
  if (det <= kTiny) return kHuge;
  const double t1 = norm2(f.a) + norm2(f.b) + norm2(f.c);
  const double t2 = norm2(cross(f.a, f.b)) + norm2(cross(f.b, f.c)) + norm2(cross(f.c, f.a));
  return std::sqrt(t1 * t2) / det;
}

inline double max_aspect_frobenius(const Corners& x) {
  double m = 0.0;
  for (int i = 0; i < 8; ++i) m = std::max(m, corner_condition(corner_frame(x, i)));
  return m >= kHuge ? kHuge : m / 3.0;
}

inline double mean_aspect_frobenius(const Corners& x) {
  double s = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double c = corner_condition(corner_frame(x, i));
    if (c >= kHuge) return kHuge;
    s += c;
  }
  return s / 24.0;
}

/// Jacobian determinant of the trilinear map on [-1,1]^3.
inline double trilinear_det(const Corners& x, double xi, double eta, double zeta) {
  static constexpr int sx[8] = {-1, 1, 1, -1, -1, 1, 1, -1};
  static constexpr int sy[8] = {-1, -1, 1, 1, -1, -1, 1, 1};
  static constexpr int sz[8] = {-1, -1, -1, -1, 1, 1, 1, 1};
  Vec3 dxi, deta, dzeta;
  for (int i = 0; i < 8; ++i) {
    dxi += x[i] * (sx[i] * (1 + sy[i] * eta) * (1 + sz[i] * zeta) / 8.0);
    deta += x[i] * (sy[i] * (1 + sx[i] * xi) * (1 + sz[i] * zeta) / 8.0);
    dzeta += x[i] * (sz[i] * (1 + sx[i] * xi) * (1 + sy[i] * eta) / 8.0);
  }
  return triple(dxi, deta, dzeta);
}

inline double distortion(const Corners& x) {
  const double g = 1.0 / std::sqrt(3.0);
  double vol = 0.0;
  double dmin = kHuge;
  for (int i = 0; i < 8; ++i) {
    const double d = trilinear_det(x, (i & 1) ? g : -g, (i & 2) ? g : -g, (i & 4) ? g : -g);
    vol += d;
    dmin = std::min(dmin, d);
  }
  static constexpr int sx[8] = {-1, 1, 1, -1, -1, 1, 1, -1};
  static constexpr int sy[8] = {-1, -1, 1, 1, -1, -1, 1, 1};
  static constexpr int sz[8] = {-1, -1, -1, -1, 1, 1, 1, 1};
  for (int i = 0; i < 8; ++i) dmin = std::min(dmin, trilinear_det(x, sx[i], sy[i], sz[i]));
  if (std::abs(vol) < kTiny) return -kHuge;
  return dmin / vol * 8.0;
}

/// Mean of the eight corner determinants; the size measure behind RSS.
inline double corner_size(const Corners& x) {
  double s = 0.0;
  for (int i = 0; i < 8; ++i) s += corner_frame(x, i).det();
  return s / 8.0;
}

inline double relative_size_squared(const Corners& x, double reference) {
  if (reference <= kTiny) return 0.0;
  const double tau = corner_size(x) / reference;
  if (tau <= kTiny) return 0.0;
  const double r = std::min(tau, 1.0 / tau);
  return r * r;
}

}  // namespace quality_detail

/// Raw metric value of one cell. `size_reference` is the mesh-average
/// corner_size, used by RSS, SHAS and SHES only.
inline double cell_quality(Metric m, const std::array<Vec3, 8>& x, double size_reference = 1.0) {
  namespace q = quality_detail;
  switch (m) {
    case Metric::DIA: return q::clampq(q::diagonal(x), 0.0);
    case Metric::DIS: return q::clampq(q::distortion(x), -kHuge);
    case Metric::ER: return q::clampq(q::edge_ratio(x), kHuge);
    case Metric::J: return q::clampq(q::jacobian(x), -kHuge);
    case Metric::MER: return q::clampq(q::max_edge_ratio(x), kHuge);
    case Metric::MAAF: return q::clampq(q::max_aspect_frobenius(x), kHuge);
    case Metric::MEAF: return q::clampq(q::mean_aspect_frobenius(x), kHuge);
    case Metric::ODD: return q::clampq(q::oddy(x), kHuge);
    case Metric::RSS: return q::clampq(q::relative_size_squared(x, size_reference), 0.0);
    case Metric::SJ: return q::clampq(q::scaled_jacobian(x), -1.0);
    case Metric::SHA: return q::clampq(q::shape(x), 0.0);
    case Metric::SHAS: return q::clampq(q::relative_size_squared(x, size_reference) * q::shape(x), 0.0);
    case Metric::SHE: return q::clampq(q::shear(x), 0.0);
    case Metric::SHES: return q::clampq(q::relative_size_squared(x, size_reference) * q::shear(x), 0.0);
    case Metric::SKE: return q::clampq(q::skew(x), kHuge);
    case Metric::STR: return q::clampq(q::stretch(x), 0.0);
    case Metric::TAP: return q::clampq(q::taper(x), kHuge);
    case Metric::VOL: return q::clampq(q::volume(x), -kHuge);
  }
  throw ValidationError("unsupported metric");
}

struct Extrema {
  double min = 0.0;
  double max = 0.0;
};

/// Maps a raw value into [0,1], 0 = worst.
inline double normalize(Metric m, double q, Extrema e) {
  double v = 1.0;
  switch (metric_spec(m).phi) {
    case PhiFamily::Identity: v = q; break;
    case PhiFamily::ClampedSJ: v = std::max(q, 0.0); break;
    case PhiFamily::MinMax:
      if (!(e.max > e.min)) return 1.0;
      v = (q - e.min) / (e.max - e.min);
      break;
    case PhiFamily::MaxDown1:
      if (!(e.max > 1.0)) return 1.0;
      v = (e.max - q) / (e.max - 1.0);
      break;
    case PhiFamily::MaxDown0:
      if (!(e.max > 0.0)) return 1.0;
      v = (e.max - q) / e.max;
      break;
    case PhiFamily::MaxOnly:
      if (!(e.max > 0.0)) return 1.0;
      v = q / e.max;
      break;
  }
  if (std::isnan(v)) return 0.0;
  return std::clamp(v, 0.0, 1.0);
}

/// Inverse of normalize; degenerate extrema map every v to e.max.
inline double denormalize(Metric m, double v, Extrema e) {
  switch (metric_spec(m).phi) {
    case PhiFamily::Identity:
    case PhiFamily::ClampedSJ: return v;
    case PhiFamily::MinMax:
      if (!(e.max > e.min)) return e.max;
      return e.min + v * (e.max - e.min);
    case PhiFamily::MaxDown1:
      if (!(e.max > 1.0)) return e.max;
      return 1.0 + (1.0 - v) * (e.max - 1.0);
    case PhiFamily::MaxDown0:
      if (!(e.max > 0.0)) return e.max;
      return (1.0 - v) * e.max;
    case PhiFamily::MaxOnly:
      if (!(e.max > 0.0)) return e.max;
      return v * e.max;
  }
  return v;
}

/// True when the raw-to-normalized map is injective (non-degenerate extrema).
inline bool invertible(Metric m, Extrema e) {
  switch (metric_spec(m).phi) {
    case PhiFamily::Identity:
    case PhiFamily::ClampedSJ: return true;
    case PhiFamily::MinMax: return e.max > e.min;
    case PhiFamily::MaxDown1: return e.max > 1.0;
    case PhiFamily::MaxDown0:
    case PhiFamily::MaxOnly: return e.max > 0.0;
  }
  return false;
}

struct QualityField {
  Metric metric = Metric::SJ;
  std::vector<double> raw;
  std::vector<double> normalized;
  Extrema extrema;

  [[nodiscard]] std::size_t size() const { return raw.size(); }
  [[nodiscard]] double to_raw(double v) const { return denormalize(metric, v, extrema); }
  [[nodiscard]] double to_normalized(double q) const { return normalize(metric, q, extrema); }
};

/// Mesh-average corner_size.
inline double mean_cell_size(const HexMesh& mesh) {
  if (mesh.cells.empty()) return 0.0;
  double s = 0.0;
  for (CellId c = 0; c < mesh.cells.size(); ++c) s += quality_detail::corner_size(mesh.corners(c));
  return s / static_cast<double>(mesh.cells.size());
}

inline QualityField evaluate_metric(const HexMesh& mesh, Metric m) {
  QualityField f;
  f.metric = m;
  const bool sized = m == Metric::RSS || m == Metric::SHAS || m == Metric::SHES;
  const double ref = sized ? mean_cell_size(mesh) : 1.0;
  f.raw.resize(mesh.cells.size());
  for (CellId c = 0; c < mesh.cells.size(); ++c) f.raw[c] = cell_quality(m, mesh.corners(c), ref);
  if (!f.raw.empty()) {
    const auto [lo, hi] = std::minmax_element(f.raw.begin(), f.raw.end());
    f.extrema = {*lo, *hi};
  }
  f.normalized.resize(f.raw.size());
  for (std::size_t i = 0; i < f.raw.size(); ++i) f.normalized[i] = normalize(m, f.raw[i], f.extrema);
  return f;
}

enum class Orientation { Vertical, Horizontal };

struct Histogram {
  Metric metric = Metric::SJ;
  Orientation orientation = Orientation::Vertical;
  std::vector<std::size_t> counts;
  std::vector<double> edges;      ///< normalized, size bins + 1, strictly increasing
  std::vector<double> raw_edges;  ///< Phi^-1 of `edges` (decreasing for max-down families)

  [[nodiscard]] std::size_t bins() const { return counts.size(); }
  [[nodiscard]] std::size_t total() const {
    std::size_t t = 0;
    for (auto c : counts) t += c;
    return t;
  }
  /// Raw interval covered by bin i, ordered low to high.
  [[nodiscard]] std::pair<double, double> raw_interval(std::size_t i) const {
    return std::minmax(raw_edges[i], raw_edges[i + 1]);
  }
};

inline std::size_t histogram_bin(double v, std::size_t bins) {
  const auto b = static_cast<std::size_t>(std::floor(std::clamp(v, 0.0, 1.0) * static_cast<double>(bins)));
  return std::min(bins - 1, b);
}

inline Histogram histogram(const QualityField& field, std::size_t bins = 100,
                           Orientation orientation = Orientation::Vertical) {
  if (bins == 0) throw ValidationError("histogram needs at least one bin");
  Histogram h;
  h.metric = field.metric;
  h.orientation = orientation;
  h.counts.assign(bins, 0);
  for (double v : field.normalized) ++h.counts[histogram_bin(v, bins)];
  h.edges.resize(bins + 1);
  h.raw_edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    h.edges[i] = static_cast<double>(i) / static_cast<double>(bins);
    h.raw_edges[i] = field.to_raw(h.edges[i]);
  }
  return h;
}

inline std::string histogram_csv(const Histogram& h) {
  std::string out = "bin_low_raw,bin_high_raw,count\n";
  for (std::size_t i = 0; i < h.bins(); ++i) {
    const auto [lo, hi] = h.raw_interval(i);
    out += format_double(lo) + "," + format_double(hi) + "," + std::to_string(h.counts[i]) + "\n";
  }
  return out;
}

struct QualitySummary {
  Metric metric = Metric::SJ;
  bool empty = true;
  std::size_t count = 0;
  double min = 0.0;
  double max = 0.0;
  double avg = 0.0;
  std::size_t below_acceptable = 0;  ///< cells outside the acceptable range
};

/// Statistics over raw values of the cells not flagged in `hidden` (all cells if empty).
inline QualitySummary summary(const QualityField& field, const CellFlags& hidden = {}) {
  QualitySummary s;
  s.metric = field.metric;
  const auto& acc = metric_spec(field.metric).acceptable;
  double sum = 0.0;
  for (std::size_t i = 0; i < field.raw.size(); ++i) {
    if (!hidden.empty() && hidden[i]) continue;
    const double q = field.raw[i];
    if (s.count == 0) s.min = s.max = q;
    s.min = std::min(s.min, q);
    s.max = std::max(s.max, q);
    sum += q;
    ++s.count;
    if (acc && !acc->contains(q)) ++s.below_acceptable;
  }
  s.empty = s.count == 0;
  if (!s.empty) s.avg = sum / static_cast<double>(s.count);
  return s;
}

}  // namespace hexinspect
