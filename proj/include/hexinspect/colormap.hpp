#pragma once

// Quality color maps as 256-entry lookup tables. Input 0 is the worst
// quality, 1 the best.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "hexinspect/errors.hpp"
#include "hexinspect/geometry.hpp"

namespace hexinspect {

enum class Colormap { None, Parula, Jet, RedBlue };

inline std::string_view colormap_name(Colormap c) {
  switch (c) {
    case Colormap::None: return "none";
    case Colormap::Parula: return "parula";
    case Colormap::Jet: return "jet";
    case Colormap::RedBlue: return "redblue";
  }
  return "none";
}

inline Colormap parse_colormap(std::string_view s) {
  if (s == "none") return Colormap::None;
  if (s == "parula") return Colormap::Parula;
  if (s == "jet") return Colormap::Jet;
  if (s == "redblue") return Colormap::RedBlue;
  throw ValidationError("unknown colormap '" + std::string(s) + "' (none|parula|jet|redblue)");
}

using Lut = std::array<Rgb, 256>;

namespace colormap_detail {

struct Stop {
  double at;
  Rgb color;
};

inline Lut from_stops(const std::vector<Stop>& stops) {
  Lut lut{};
  for (int i = 0; i < 256; ++i) {
    const double x = i / 255.0;
    std::size_t k = 0;
    while (k + 2 < stops.size() && x > stops[k + 1].at) ++k;
    const auto& a = stops[k];
    const auto& b = stops[k + 1];
    const double t = std::clamp((x - a.at) / (b.at - a.at), 0.0, 1.0);
    lut[i] = {a.color.r + (b.color.r - a.color.r) * t, a.color.g + (b.color.g - a.color.g) * t,
              a.color.b + (b.color.b - a.color.b) * t};
  }
  return lut;
}

// Stops listed from the best end to the worst end of each map's usual
// orientation, then reversed where needed so that 0 is always the worst.
inline Lut parula() {
  return from_stops({{0.000, {0.9763, 0.9831, 0.0538}},
                     {0.125, {0.9783, 0.7777, 0.2412}},
                     {0.250, {0.7839, 0.7377, 0.3615}},
                     {0.375, {0.4975, 0.7491, 0.4549}},
                     {0.500, {0.1707, 0.7253, 0.6047}},
                     {0.625, {0.0282, 0.6151, 0.7864}},
                     {0.750, {0.0615, 0.4953, 0.8553}},
                     {0.875, {0.0628, 0.3430, 0.9126}},
                     {1.000, {0.2081, 0.1663, 0.5292}}});
}

inline Lut jet() {
  return from_stops({{0.0, {0.5, 0.0, 0.0}},
                     {0.125, {1.0, 0.0, 0.0}},
                     {0.375, {1.0, 1.0, 0.0}},
                     {0.625, {0.0, 1.0, 1.0}},
                     {0.875, {0.0, 0.0, 1.0}},
                     {1.0, {0.0, 0.0, 0.5}}});
}

inline Lut redblue() {
  return from_stops({{0.0, {0.70, 0.09, 0.17}}, {0.5, {0.97, 0.97, 0.97}}, {1.0, {0.13, 0.40, 0.67}}});
}

}  // namespace colormap_detail

inline const Lut& lut(Colormap c) {
  static const Lut p = colormap_detail::parula();
  static const Lut j = colormap_detail::jet();
  static const Lut r = colormap_detail::redblue();
  switch (c) {
    case Colormap::Parula: return p;
    case Colormap::Jet: return j;
    case Colormap::RedBlue: return r;
    case Colormap::None: break;
  }
  throw ValidationError("colormap 'none' has no lookup table");
}

/// Linear interpolation between adjacent table entries; input clamped to [0, 1].
inline Rgb apply_colormap(double v, Colormap c) {
  const Lut& t = lut(c);
  const double x = std::clamp(std::isnan(v) ? 0.0 : v, 0.0, 1.0) * 255.0;
  const int i = std::min(254, static_cast<int>(x));
  const double f = x - i;
  const Rgb& a = t[i];
  const Rgb& b = t[i + 1];
  return {a.r + (b.r - a.r) * f, a.g + (b.g - a.g) * f, a.b + (b.b - a.b) * f};
}

inline std::vector<Rgb> apply_colormap(const std::vector<double>& values, Colormap c) {
  std::vector<Rgb> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(apply_colormap(v, c));
  return out;
}

}  // namespace hexinspect
