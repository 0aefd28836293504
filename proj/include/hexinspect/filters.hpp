#pragma once

// Cell filters: slicing plane, peeling, quality threshold, morphological
// regularization, and manual dig / undig / isolate edits.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hexinspect/errors.hpp"
#include "hexinspect/gmap.hpp"
#include "hexinspect/quality.hpp"

namespace hexinspect {

struct Plane {
  Vec3 normal{1, 0, 0};
  double offset = 0.0;
  bool enabled = false;
  friend bool operator==(const Plane&, const Plane&) = default;
};

/// Threshold that hides nothing: every normalized value is below it.
inline const double kQualityThresholdOff = std::nextafter(1.0, 2.0);

inline constexpr int kMaxRegularization = 5;

struct FilterParams {
  Plane plane;
  std::uint32_t peel_min_depth = 0;
  double quality_threshold = kQualityThresholdOff;  ///< hide normalized >= threshold
  int regularization = 0;
  std::set<CellId> dug;
  std::set<CellId> undug;
  std::optional<CellId> isolated;
  friend bool operator==(const FilterParams&, const FilterParams&) = default;
};

struct FilterState {
  CellFlags hidden;
  FilterParams params;

  [[nodiscard]] std::size_t hidden_count() const {
    return static_cast<std::size_t>(std::count_if(hidden.begin(), hidden.end(), [](auto h) { return h != 0; }));
  }
  [[nodiscard]] std::size_t visible_count() const { return hidden.size() - hidden_count(); }
};

inline void validate(const FilterParams& p, std::size_t cell_count) {
  if (p.plane.enabled && std::abs(norm(p.plane.normal) - 1.0) > 1e-9)
    throw ValidationError("plane normal must have unit length");
  if (!std::isfinite(p.plane.offset)) throw ValidationError("plane offset must be finite");
  if (p.regularization < 0 || p.regularization > kMaxRegularization)
    throw ValidationError("regularization must lie in [0, 5]");
  if (!(p.quality_threshold >= 0.0) || p.quality_threshold > 2.0)
    throw ValidationError("quality threshold must lie in [0, 1] (normalized)");
  const auto check = [&](CellId c, const char* what) {
    if (c >= cell_count)
      throw ValidationError(std::string(what) + " cell " + std::to_string(c) + " out of range (" +
                            std::to_string(cell_count) + " cells)");
  };
  for (CellId c : p.dug) check(c, "dug");
  for (CellId c : p.undug) check(c, "undug");
  if (p.isolated) check(*p.isolated, "isolated");
}

inline CellFlags plane_filter(const GMap& g, const Plane& plane) {
  CellFlags f(g.cell_count(), 0);
  if (!plane.enabled) return f;
  for (CellId c = 0; c < g.cell_count(); ++c) f[c] = dot(g.barycenter(c), plane.normal) - plane.offset < 0.0;
  return f;
}

inline CellFlags peel_filter(const std::vector<std::uint32_t>& depths, std::uint32_t min_depth) {
  CellFlags f(depths.size(), 0);
  for (std::size_t c = 0; c < depths.size(); ++c) f[c] = depths[c] < min_depth;
  return f;
}

inline CellFlags quality_filter(const std::vector<double>& normalized, double threshold) {
  CellFlags f(normalized.size(), 0);
  for (std::size_t c = 0; c < normalized.size(); ++c) f[c] = normalized[c] >= threshold;
  return f;
}

/// Adds every cell sharing a vertex with a hidden cell.
inline CellFlags dilate(const GMap& g, const CellFlags& hidden) {
  std::vector<std::uint8_t> touched(g.vertices().size(), 0);
  for (CellId c = 0; c < g.cell_count(); ++c)
    if (hidden[c])
      for (VertexId v : g.cells()[c].vertices) touched[v] = 1;
  CellFlags out(hidden.size(), 0);
  for (CellId c = 0; c < g.cell_count(); ++c) {
    bool h = hidden[c] != 0;
    for (VertexId v : g.cells()[c].vertices) h = h || touched[v];
    out[c] = h;
  }
  return out;
}

/// Removes every hidden cell sharing a vertex with a visible cell.
inline CellFlags erode(const GMap& g, const CellFlags& hidden) {
  std::vector<std::uint8_t> touched(g.vertices().size(), 0);
  for (CellId c = 0; c < g.cell_count(); ++c)
    if (!hidden[c])
      for (VertexId v : g.cells()[c].vertices) touched[v] = 1;
  CellFlags out(hidden.size(), 0);
  for (CellId c = 0; c < g.cell_count(); ++c) {
    bool h = hidden[c] != 0;
    for (VertexId v : g.cells()[c].vertices) h = h && !touched[v];
    out[c] = h;
  }
  return out;
}

/// n dilations followed by n erosions (a closing).
inline CellFlags regularize(const GMap& g, CellFlags hidden, int n) {
  if (n < 0 || n > kMaxRegularization) throw ValidationError("regularization must lie in [0, 5]");
  for (int i = 0; i < n; ++i) hidden = dilate(g, hidden);
  for (int i = 0; i < n; ++i) hidden = erode(g, hidden);
  return hidden;
}

/// Hidden set of `p` given precomputed peel depths and the normalized field of
/// the current metric (empty = no quality filtering).
inline FilterState compose(const GMap& g, const FilterParams& p, const std::vector<std::uint32_t>& depths,
                           const std::vector<double>& normalized) {
  validate(p, g.cell_count());
  const auto n = g.cell_count();
  FilterState s;
  s.params = p;
  if (p.isolated) {
    s.hidden.assign(n, 1);
    s.hidden[*p.isolated] = 0;
  } else {
    CellFlags base = plane_filter(g, p.plane);
    const CellFlags peel = peel_filter(depths, p.peel_min_depth);
    for (std::size_t c = 0; c < n; ++c) base[c] = base[c] || peel[c];
    s.hidden = regularize(g, std::move(base), p.regularization);
    if (!normalized.empty()) {
      const CellFlags q = quality_filter(normalized, p.quality_threshold);
      for (std::size_t c = 0; c < n; ++c) s.hidden[c] = s.hidden[c] || q[c];
    }
  }
  for (CellId c : p.dug) s.hidden[c] = 1;
  for (CellId c : p.undug) s.hidden[c] = 0;
  return s;
}

enum class EditAction { Dig, Undig, Isolate };

struct EditResult {
  FilterParams params;
  std::optional<std::string> notice;  ///< set when the edit changed nothing
};

/// Applies a manual edit. Dig and undig take a face id, isolate a cell id.
/// `state` must be the composition of `params`.
inline EditResult manual_edit(const GMap& g, const FilterState& state, const std::vector<std::uint32_t>& depths,
                              const std::vector<double>& normalized, EditAction action, std::uint32_t target) {
  EditResult r{state.params, std::nullopt};
  FilterParams& p = r.params;
  if (action == EditAction::Isolate) {
    if (target >= g.cell_count()) throw ValidationError("isolate: cell " + std::to_string(target) + " out of range");
    p.isolated = target;
    p.dug.clear();
    p.undug.clear();
    return r;
  }
  if (target >= g.faces().size()) throw ValidationError("face " + std::to_string(target) + " out of range");
  const GFace& f = g.faces()[target];
  const auto hidden_at = [&](int i) { return f.cells[i] != kInvalid && state.hidden[f.cells[i]] != 0; };
  const auto visible_at = [&](int i) { return f.cells[i] != kInvalid && state.hidden[f.cells[i]] == 0; };

  const auto still = [&](CellId c) { return compose(g, p, depths, normalized).hidden[c] != 0; };

  if (action == EditAction::Dig) {
    const int visible = visible_at(0) + visible_at(1);
    if (visible != 1) throw ValidationError("dig: face " + std::to_string(target) + " is not on the current boundary");
    const CellId c = visible_at(0) ? f.cells[0] : f.cells[1];
    p.undug.erase(c);
    p.dug.insert(c);
    return r;
  }

  // Undig: prefer a dug cell, then the first hidden one. The cell is only
  // recorded as undug when dropping it from `dug` does not already reveal it.
  CellId c = kInvalid;
  for (int i = 0; i < 2; ++i)
    if (hidden_at(i) && p.dug.count(f.cells[i])) c = f.cells[i];
  for (int i = 0; i < 2 && c == kInvalid; ++i)
    if (hidden_at(i)) c = f.cells[i];
  if (c == kInvalid) {
    r.notice = "undig: face " + std::to_string(target) + " has no hidden incident cell";
    return r;
  }
  p.dug.erase(c);
  if (still(c)) p.undug.insert(c);
  return r;
}

/// New slicing plane from the view direction (eye to target). A view within
/// 20 degrees of facing the current plane's back side inverts that plane
/// exactly; otherwise the plane takes the (optionally axis-snapped) view
/// direction as normal and passes through `pivot`.
inline Plane plane_from_view(Vec3 view_dir, const Plane& current, bool snap_axis, Vec3 pivot) {
  view_dir = normalized(view_dir);
  if (norm2(view_dir) == 0.0) throw ValidationError("view direction must be non-zero");
  const double tolerance = std::cos(20.0 * 3.14159265358979323846 / 180.0);
  if (current.enabled && dot(view_dir, -current.normal) >= tolerance)
    return {-current.normal, -current.offset, true};
  Vec3 n = view_dir;
  if (snap_axis) {
    int axis = 0;
    for (int i = 1; i < 3; ++i)
      if (std::abs(view_dir[i]) > std::abs(view_dir[axis])) axis = i;
    n = {};
    n[axis] = view_dir[axis] < 0 ? -1.0 : 1.0;
  }
  return {n, dot(pivot, n), true};
}

/// Projected extent of the bounding box along `normal`.
inline std::pair<double, double> projected_extent(const Aabb& box, const Vec3& normal) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const Vec3& c : box.corners()) {
    lo = std::min(lo, dot(c, normal));
    hi = std::max(hi, dot(c, normal));
  }
  return {lo, hi};
}

/// Slider 0 keeps every cell, slider 1 hides every cell.
inline double plane_offset_from_slider(const Aabb& box, const Vec3& normal, double s) {
  const auto [lo, hi] = projected_extent(box, normal);
  const double eps = 1e-9 * (std::abs(lo) + std::abs(hi) + (hi - lo)) + 1e-12;
  return lo + std::clamp(s, 0.0, 1.0) * (hi + eps - lo);
}

inline std::uint32_t peel_from_slider(double s, std::uint32_t max_depth) {
  return static_cast<std::uint32_t>(std::lround(std::clamp(s, 0.0, 1.0) * (static_cast<double>(max_depth) + 1.0)));
}

/// Slider 0 hides nothing; slider 1 hides every cell, except that for SJ cells
/// normalized to 0 (inverted or degenerate) stay visible.
inline double quality_threshold_from_slider(Metric m, double s) {
  s = std::clamp(s, 0.0, 1.0);
  if (s == 0.0) return kQualityThresholdOff;
  const double t = 1.0 - s;
  if (t == 0.0 && m == Metric::SJ) return std::numeric_limits<double>::denorm_min();
  return t;
}

/// Normalized threshold that hides cells with raw quality not worse than `raw`.
inline double quality_threshold_from_raw(const QualityField& f, double raw) { return f.to_normalized(raw); }

}  // namespace hexinspect
