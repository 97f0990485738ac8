#pragma once

// Deterministic SVG of a principal configuration: orthographic projection,
// back-facing parts suppressed, one stroke class per foliation, umbilics as
// labeled glyphs. All coordinates are printed with fixed precision.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "principal/catalog/registry.hpp"
#include "principal/foliation.hpp"
#include "principal/surface.hpp"
#include "principal/umbilics.hpp"

namespace principal::io {

struct View {
  Vec3 axis = Vec3::UnitY();  // the camera looks along this direction
  Vec3 up = Vec3::UnitZ();
  int width = 800, height = 800;
  double margin = 40;
};

struct Stroke {
  std::vector<Vec3> points;
  FoliationId foliation = FoliationId::Minimal;
  bool emphasized = false;  // separatrices and cycles
};

inline std::vector<Stroke> strokes(const std::vector<Trajectory>& ts, bool emphasized = false) {
  std::vector<Stroke> out;
  for (const auto& t : ts) out.push_back({t.points, t.foliation, emphasized});
  return out;
}

/// "+x", "-y", ... or "x,y,z".
inline View view_from(const std::string& spec) {
  View v;
  if (spec.empty()) return v;
  const std::string axes = "xyz";
  if (spec.size() == 2 && (spec[0] == '+' || spec[0] == '-') && axes.find(spec[1]) != std::string::npos) {
    const int i = static_cast<int>(axes.find(spec[1]));
    v.axis = Vec3::Unit(i) * (spec[0] == '-' ? -1.0 : 1.0);
  } else {
    const auto c = catalog::detail::parse_list(spec);
    if (c.size() != 3) throw ParamError("view: expected +x/-x/+y/-y/+z/-z or a direction x,y,z");
    v.axis = Vec3(c[0], c[1], c[2]);
  }
  if (!(v.axis.norm() > 0)) throw ParamError("view direction must be nonzero");
  v.axis.normalize();
  if (std::abs(v.axis.dot(v.up)) > 0.99) v.up = Vec3::UnitY();
  return v;
}

namespace detail {

inline std::string f2(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x == 0.0 ? 0.0 : x);  // no "-0.00"
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

inline const char* glyph_class(UmbilicType t) {
  switch (t) {
    case UmbilicType::D1: return "d1";
    case UmbilicType::D2: return "d2";
    case UmbilicType::D3: return "d3";
    default: return "other";
  }
}

}  // namespace detail

/// `surface` drives the hidden-line test (visible where the outward gradient
/// faces the camera); without it everything is drawn.
inline std::string render_svg(const std::vector<Stroke>& scene, const std::vector<UmbilicRecord>& umbilics,
                              const View& view = {}, const ImplicitSurface* surface = nullptr) {
  const Vec3 d = view.axis.normalized();
  const Vec3 right = d.cross(view.up).normalized();
  const Vec3 up = right.cross(d);

  double extent = 0.0;
  for (const auto& s : scene)
    for (const auto& p : s.points) extent = std::max({extent, std::abs(p.dot(right)), std::abs(p.dot(up))});
  for (const auto& u : umbilics)
    extent = std::max({extent, std::abs(u.point.dot(right)), std::abs(u.point.dot(up))});
  if (!(extent > 0)) extent = 1.0;
  const double scale = 0.5 * (std::min(view.width, view.height) - 2 * view.margin) / extent;
  const double cx = 0.5 * view.width, cy = 0.5 * view.height;
  auto X = [&](const Vec3& p) { return detail::f2(cx + scale * p.dot(right)); };
  auto Y = [&](const Vec3& p) { return detail::f2(cy - scale * p.dot(up)); };
  auto visible = [&](const Vec3& p) {
    if (!surface) return true;
    const Vec3 g = surface->local2(p).grad;
    return g.dot(d) <= 1e-6 * g.norm();  // the silhouette counts as visible, with room for tracing noise
  };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << view.width << "\" height=\"" << view.height
    << "\" viewBox=\"0 0 " << view.width << ' ' << view.height << "\">\n";
  o << "<style>\n"
       "  polyline { fill: none; stroke-width: 1; stroke-linejoin: round; }\n"
       "  .minimal { stroke: #1f5fa8; }\n"
       "  .maximal { stroke: #c0392b; }\n"
       "  .emph { stroke-width: 2.5; }\n"
       "  .glyph { stroke: #000; stroke-width: 1; }\n"
       "  .d1 { fill: #f1c40f; } .d2 { fill: #27ae60; } .d3 { fill: #8e44ad; } .other { fill: #fff; }\n"
       "  .back { opacity: 0.35; }\n"
       "  text { font: 11px sans-serif; }\n"
       "</style>\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";

  for (const auto& s : scene) {
    const std::string cls = std::string(to_string(s.foliation)) + (s.emphasized ? " emph" : "");
    std::string run;
    int n = 0;
    auto flush = [&] {
      if (n >= 2) o << "<polyline class=\"" << cls << "\" points=\"" << run << "\"/>\n";
      run.clear();
      n = 0;
    };
    for (const auto& p : s.points) {
      if (!visible(p)) {
        flush();
        continue;
      }
      if (n > 0) run += ' ';
      run += X(p) + ',' + Y(p);
      ++n;
    }
    flush();
  }

  for (std::size_t i = 0; i < umbilics.size(); ++i) {
    const auto& u = umbilics[i];
    const std::string x = X(u.point), y = Y(u.point);
    const double px = cx + scale * u.point.dot(right), py = cy - scale * u.point.dot(up);
    const std::string cls = std::string("glyph ") + detail::glyph_class(u.type) + (visible(u.point) ? "" : " back");
    o << "<g class=\"umbilic\">";
    switch (u.type) {
      case UmbilicType::D1:
        o << "<circle class=\"" << cls << "\" cx=\"" << x << "\" cy=\"" << y << "\" r=\"5\"/>";
        break;
      case UmbilicType::D2:
        o << "<rect class=\"" << cls << "\" x=\"" << detail::f2(px - 5) << "\" y=\"" << detail::f2(py - 5)
          << "\" width=\"10\" height=\"10\"/>";
        break;
      case UmbilicType::D3:
        o << "<polygon class=\"" << cls << "\" points=\"" << x << ',' << detail::f2(py - 6) << ' '
          << detail::f2(px - 5.5) << ',' << detail::f2(py + 4) << ' ' << detail::f2(px + 5.5) << ','
          << detail::f2(py + 4) << "\"/>";
        break;
      default:
        o << "<polygon class=\"" << cls << "\" points=\"" << x << ',' << detail::f2(py - 6) << ' '
          << detail::f2(px + 6) << ',' << y << ' ' << x << ',' << detail::f2(py + 6) << ' ' << detail::f2(px - 6)
          << ',' << y << "\"/>";
    }
    o << "<text x=\"" << detail::f2(px + 8) << "\" y=\"" << detail::f2(py - 8) << "\">u" << i << ' '
      << to_string(u.type) << "</text></g>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace principal::io
