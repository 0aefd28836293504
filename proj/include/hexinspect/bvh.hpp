#pragma once

// Bounding-volume hierarchy over a triangle soup, for ray picking and
// occlusion queries.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "hexinspect/geometry.hpp"

namespace hexinspect {

struct Ray {
  Vec3 origin;
  Vec3 direction;
};

struct RayHit {
  std::uint32_t triangle;
  double t;
};

class Bvh {
 public:
  Bvh() = default;

  Bvh(const std::vector<Vec3>& positions, const std::vector<std::array<std::uint32_t, 3>>& triangles) {
    const auto n = static_cast<std::uint32_t>(triangles.size());
    if (n == 0) return;
    std::vector<Aabb> boxes(n);
    std::vector<Vec3> centroids(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      for (auto v : triangles[i]) boxes[i].expand(positions[v]);
      centroids[i] = (positions[triangles[i][0]] + positions[triangles[i][1]] + positions[triangles[i][2]]) / 3.0;
    }
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0u);
    nodes_.reserve(2 * n);
    nodes_.emplace_back();
    build(0, 0, n, boxes, centroids, 0);
    tris_.reserve(n);
    for (std::uint32_t id : order_) {
      const Vec3& a = positions[triangles[id][0]];
      tris_.push_back({a, positions[triangles[id][1]] - a, positions[triangles[id][2]] - a});
    }
  }

  [[nodiscard]] bool empty() const { return tris_.empty(); }

  /// Nearest hit with t in (tmin, tmax); ties go to the lowest triangle index.
  [[nodiscard]] std::optional<RayHit> closest(const Ray& ray, double tmin = 0.0,
                                              double tmax = std::numeric_limits<double>::infinity()) const {
    std::optional<RayHit> best;
    if (tris_.empty()) return best;
    const Vec3 inv = inverse(ray.direction);
    std::uint32_t stack[kMaxStack];
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
      const Node& n = nodes_[stack[--sp]];
      if (!slab(n, ray.origin, inv, tmin, best ? best->t : tmax)) continue;
      if (n.count > 0) {
        for (std::uint32_t i = n.first; i < n.first + n.count; ++i) {
          double t;
          if (!intersect(tris_[i], ray, tmin, tmax, t)) continue;
          const std::uint32_t id = order_[i];
          if (!best || t < best->t || (t == best->t && id < best->triangle)) best = RayHit{id, t};
        }
      } else {
        push_children(n, ray.direction, stack, sp);
      }
    }
    return best;
  }

  /// True when any triangle is hit with t in (tmin, tmax).
  [[nodiscard]] bool occluded(const Ray& ray, double tmin, double tmax) const {
    if (tris_.empty()) return false;
    const Vec3 inv = inverse(ray.direction);
    std::uint32_t stack[kMaxStack];
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
      const Node& n = nodes_[stack[--sp]];
      if (!slab(n, ray.origin, inv, tmin, tmax)) continue;
      if (n.count > 0) {
        double t;
        for (std::uint32_t i = n.first; i < n.first + n.count; ++i)
          if (intersect(tris_[i], ray, tmin, tmax, t)) return true;
      } else {
        push_children(n, ray.direction, stack, sp);
      }
    }
    return false;
  }

 private:
  static constexpr double kInfinity = std::numeric_limits<double>::infinity();
  static constexpr int kMaxStack = 128;

  struct Node {
    Vec3 lo, hi;
    std::uint32_t first = 0;  ///< first triangle (leaf) or left child (inner)
    std::uint32_t count = 0;  ///< 0 for inner nodes
    int axis = 0;             ///< split axis of inner nodes
  };

  /// Vertex and the two edge vectors from it.
  struct Tri {
    Vec3 a, e1, e2;
  };

  /// Near child popped first.
  static void push_children(const Node& n, const Vec3& d, std::uint32_t* stack, int& sp) {
    if (d[n.axis] < 0.0) {
      stack[sp++] = n.first;
      stack[sp++] = n.first + 1;
    } else {
      stack[sp++] = n.first + 1;
      stack[sp++] = n.first;
    }
  }

  // A zero component becomes a huge finite reciprocal, so slab products never produce NaN.
  static Vec3 inverse(const Vec3& d) {
    const auto inv = [](double v) { return 1.0 / (v == 0.0 ? 1e-300 : v); };
    return {inv(d.x), inv(d.y), inv(d.z)};
  }

  static bool slab(const Node& n, const Vec3& o, const Vec3& inv, double tmin, double tmax) {
    for (int a = 0; a < 3; ++a) {
      double t0 = (n.lo[a] - o[a]) * inv[a];
      double t1 = (n.hi[a] - o[a]) * inv[a];
      if (inv[a] < 0.0) std::swap(t0, t1);
      tmin = t0 > tmin ? t0 : tmin;
      tmax = t1 < tmax ? t1 : tmax;
      if (tmin > tmax) return false;
    }
    return true;
  }

  /// Moller-Trumbore, two-sided.
  static bool intersect(const Tri& tri, const Ray& ray, double tmin, double tmax, double& t) {
    const Vec3 p = cross(ray.direction, tri.e2);
    const double det = dot(tri.e1, p);
    if (std::abs(det) < 1e-300) return false;
    const double inv = 1.0 / det;
    const Vec3 s = ray.origin - tri.a;
    const double u = dot(s, p) * inv;
    if (u < 0.0 || u > 1.0) return false;
    const Vec3 q = cross(s, tri.e1);
    const double v = dot(ray.direction, q) * inv;
    if (v < 0.0 || u + v > 1.0) return false;
    t = dot(tri.e2, q) * inv;
    return t > tmin && t < tmax;
  }

  static double area(const Aabb& b) {
    if (b.empty()) return 0.0;
    const Vec3 e = b.extent();
    return e.x * e.y + e.y * e.z + e.z * e.x;
  }

  /// Binned surface-area-heuristic split; falls back to a median split when
  /// no bin boundary separates the centroids.
  void build(std::uint32_t index, std::uint32_t first, std::uint32_t count, const std::vector<Aabb>& boxes,
             const std::vector<Vec3>& centroids, int depth) {
    Aabb box, cbox;
    for (std::uint32_t i = first; i < first + count; ++i) {
      box.expand(boxes[order_[i]].lo);
      box.expand(boxes[order_[i]].hi);
      cbox.expand(centroids[order_[i]]);
    }
    nodes_[index].lo = box.lo;
    nodes_[index].hi = box.hi;
    const Vec3 ext = cbox.extent();
    int axis = 0;
    if (ext.y > ext[axis]) axis = 1;
    if (ext.z > ext[axis]) axis = 2;
    if (count <= kLeafSize || ext[axis] <= 0.0) {
      nodes_[index].first = first;
      nodes_[index].count = count;
      return;
    }
    constexpr int kBins = 16;
    const double lo = cbox.lo[axis], scale = kBins / ext[axis];
    const auto bin_of = [&](std::uint32_t id) {
      return std::min(kBins - 1, static_cast<int>((centroids[id][axis] - lo) * scale));
    };
    std::array<Aabb, kBins> bin_box;
    std::array<std::uint32_t, kBins> bin_count{};
    for (std::uint32_t i = first; i < first + count; ++i) {
      const int b = bin_of(order_[i]);
      ++bin_count[b];
      bin_box[b].expand(boxes[order_[i]].lo);
      bin_box[b].expand(boxes[order_[i]].hi);
    }
    std::array<double, kBins> right_cost{};
    Aabb acc;
    std::uint32_t acc_n = 0;
    for (int b = kBins - 1; b > 0; --b) {
      acc_n += bin_count[b];
      if (!bin_box[b].empty()) {
        acc.expand(bin_box[b].lo);
        acc.expand(bin_box[b].hi);
      }
      right_cost[b] = area(acc) * acc_n;
    }
    int split = -1;
    double best = std::numeric_limits<double>::infinity();
    acc = {};
    acc_n = 0;
    for (int b = 0; b + 1 < kBins; ++b) {
      acc_n += bin_count[b];
      if (!bin_box[b].empty()) {
        acc.expand(bin_box[b].lo);
        acc.expand(bin_box[b].hi);
      }
      if (acc_n == 0 || acc_n == count) continue;
      const double cost = area(acc) * acc_n + right_cost[b + 1];
      if (cost < best) {
        best = cost;
        split = b;
      }
    }
    std::uint32_t mid;
    if (split < 0 || depth >= kMaxSahDepth) {
      mid = first + count / 2;
      std::nth_element(order_.begin() + first, order_.begin() + mid, order_.begin() + first + count,
                       [&](std::uint32_t a, std::uint32_t b) {
                         const double ca = centroids[a][axis], cb = centroids[b][axis];
                         return ca < cb || (ca == cb && a < b);
                       });
    } else {
      mid = static_cast<std::uint32_t>(
          std::stable_partition(order_.begin() + first, order_.begin() + first + count,
                                [&](std::uint32_t id) { return bin_of(id) <= split; }) -
          order_.begin());
    }
    const auto left = static_cast<std::uint32_t>(nodes_.size());
    nodes_[index].first = left;
    nodes_[index].count = 0;
    nodes_[index].axis = axis;
    nodes_.emplace_back();
    nodes_.emplace_back();
    build(left, first, mid - first, boxes, centroids, depth + 1);
    build(left + 1, mid, first + count - mid, boxes, centroids, depth + 1);
  }

  static constexpr std::uint32_t kLeafSize = 4;
  // Median splits below this depth keep the tree shallower than the traversal stack.
  static constexpr int kMaxSahDepth = 64;

  std::vector<Tri> tris_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace hexinspect
