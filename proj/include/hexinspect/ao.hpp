#pragma once

// Object-space ambient occlusion: cosine-weighted unblocked light from a set
// of probe directions, baked per surface vertex by ray casting.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <thread>
#include <tuple>
#include <vector>

#include "hexinspect/bvh.hpp"
#include "hexinspect/errors.hpp"
#include "hexinspect/surface_mesh.hpp"

namespace hexinspect {

inline constexpr std::size_t kDefaultProbeCount = 1024;

struct ProbeSet {
  std::vector<Vec3> directions;
  std::uint64_t seed = 0;
  [[nodiscard]] std::size_t size() const { return directions.size(); }
};

namespace ao_detail {

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform,
/// unlike std::uniform_real_distribution.
inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline Vec3 random_direction(std::mt19937_64& rng) {
  const double z = 1.0 - 2.0 * unit(rng);
  const double phi = 2.0 * 3.14159265358979323846 * unit(rng);
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {s * std::cos(phi), s * std::sin(phi), z};
}

inline constexpr int kCandidates = 16;

}  // namespace ao_detail

/// Mitchell best-candidate directions: each new probe is the one among a
/// fixed number of random candidates farthest from the probes already placed.
/// A set of n probes is a prefix of any larger set with the same seed.
inline ProbeSet probe_directions(std::size_t count = kDefaultProbeCount, std::uint64_t seed = 0) {
  if (count == 0) throw ValidationError("probe count must be at least 1");
  std::mt19937_64 rng(seed);
  ProbeSet p;
  p.seed = seed;
  p.directions.reserve(count);
  p.directions.push_back(ao_detail::random_direction(rng));
  while (p.directions.size() < count) {
    Vec3 best;
    double best_d = -1.0;
    for (int k = 0; k < ao_detail::kCandidates; ++k) {
      const Vec3 c = ao_detail::random_direction(rng);
      double d = 4.0;
      for (const Vec3& q : p.directions) d = std::min(d, norm2(c - q));
      if (d > best_d) {
        best_d = d;
        best = c;
      }
    }
    p.directions.push_back(best);
  }
  return p;
}

/// Unique (position, normal) pairs of a surface; the ray origins.
struct AoSites {
  std::vector<Vec3> positions;
  std::vector<Vec3> normals;
  std::vector<std::uint32_t> of_vertex;
};

inline AoSites ao_sites(const SurfaceMesh& s) {
  AoSites out;
  std::map<std::tuple<double, double, double, double, double, double>, std::uint32_t> index;
  out.of_vertex.resize(s.positions.size());
  for (std::size_t i = 0; i < s.positions.size(); ++i) {
    const Vec3& p = s.positions[i];
    const Vec3& n = s.normals[i];
    auto [it, fresh] = index.try_emplace({p.x, p.y, p.z, n.x, n.y, n.z}, static_cast<std::uint32_t>(out.positions.size()));
    if (fresh) {
      out.positions.push_back(p);
      out.normals.push_back(n);
    }
    out.of_vertex[i] = it->second;
  }
  return out;
}

/// Incremental AO: probes may be added in batches and the partial estimate
/// read at any time. With all probes added the result equals compute_ao.
class AoAccumulator {
 public:
  AoAccumulator(const SurfaceMesh& surface, const Bvh& occluders, double epsilon)
      : sites_(ao_sites(surface)), bvh_(&occluders), epsilon_(epsilon),
        lit_(sites_.positions.size(), 0.0), total_(sites_.positions.size(), 0.0) {}

  /// Casts `probes[first, last)` from every site; `threads` = 0 picks the hardware count.
  void add(const ProbeSet& probes, std::size_t first, std::size_t last, unsigned threads = 0) {
    last = std::min(last, probes.size());
    if (first >= last) return;
    const std::size_t n = sites_.positions.size();
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, n / 64)));
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
      constexpr std::size_t kChunk = 64;
      for (std::size_t b; (b = next.fetch_add(kChunk)) < n;)
        for (std::size_t i = b; i < std::min(n, b + kChunk); ++i) cast(i, probes, first, last);
    };
    if (threads <= 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    }
    probes_used_ += last - first;
  }

  [[nodiscard]] std::size_t probes_used() const { return probes_used_; }

  /// Per-vertex AO in [0, 1]; vertices whose hemisphere saw no probe read 1.
  [[nodiscard]] std::vector<double> values() const {
    std::vector<double> ao(sites_.of_vertex.size());
    for (std::size_t v = 0; v < ao.size(); ++v) {
      const auto i = sites_.of_vertex[v];
      ao[v] = total_[i] > 0.0 ? std::clamp(lit_[i] / total_[i], 0.0, 1.0) : 1.0;
    }
    return ao;
  }

  [[nodiscard]] std::size_t site_count() const { return sites_.positions.size(); }

 private:
  void cast(std::size_t i, const ProbeSet& probes, std::size_t first, std::size_t last) {
    const Vec3 n = sites_.normals[i];
    const Vec3 origin = sites_.positions[i] + n * epsilon_;
    double lit = lit_[i], total = total_[i];
    for (std::size_t k = first; k < last; ++k) {
      const Vec3& d = probes.directions[k];
      const double w = dot(d, n);
      if (!(w > 0.0)) continue;
      total += w;
      if (!bvh_->occluded(Ray{origin, d}, 0.0, std::numeric_limits<double>::infinity())) lit += w;
    }
    lit_[i] = lit;
    total_[i] = total;
  }

  AoSites sites_;
  const Bvh* bvh_;
  double epsilon_;
  std::vector<double> lit_, total_;
  std::size_t probes_used_ = 0;
};

/// Ray-origin offset along the normal: 1e-4 of the bounding-box diagonal.
inline double ao_epsilon(const SurfaceMesh& occluders) { return 1e-4 * occluders.bounds().diagonal(); }

/// AO for every vertex of `surface`, occluded by `occluders` (usually itself).
inline std::vector<double> compute_ao(const SurfaceMesh& surface, const SurfaceMesh& occluders,
                                      const ProbeSet& probes, unsigned threads = 0) {
  if (surface.empty()) return std::vector<double>(surface.positions.size(), 1.0);
  const Bvh bvh(occluders.positions, occluders.triangles);
  AoAccumulator acc(surface, bvh, ao_epsilon(occluders));
  acc.add(probes, 0, probes.size(), threads);
  return acc.values();
}

inline std::vector<double> compute_ao(const SurfaceMesh& surface, const ProbeSet& probes, unsigned threads = 0) {
  return compute_ao(surface, surface, probes, threads);
}

}  // namespace hexinspect
