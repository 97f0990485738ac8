#pragma once

// Polyline export: one row per sample, columns x,y,z,arclength,foliation_id.
// Rows of consecutive polylines are separated by their own arclength reset.

#include <cstdio>
#include <string>
#include <vector>

#include "principal/foliation.hpp"

namespace principal::io {

inline constexpr const char* kCsvHeader = "x,y,z,arclength,foliation_id";

inline std::string polylines_csv(const std::vector<Trajectory>& ts) {
  std::string out = std::string(kCsvHeader) + "\n";
  char buf[160];
  for (const auto& t : ts) {
    const int fol = static_cast<int>(t.foliation);
    double s = 0.0;
    for (std::size_t i = 0; i < t.points.size(); ++i) {
      const Vec3& p = t.points[i];
      // recorded arclength when present, otherwise the chord sum
      if (i < t.arclength.size())
        s = t.arclength[i];
      else if (i > 0)
        s += (p - t.points[i - 1]).norm();
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%d\n", p.x(), p.y(), p.z(), s, fol);
      out += buf;
    }
  }
  return out;
}

}  // namespace principal::io
