#pragma once

// Rotation of section crossings under the principal foliation: per-return
// increments and the mean rotation per second return.

#include <cmath>
#include <string>
#include <vector>

#include "principal/errors.hpp"
#include "principal/foliation.hpp"
#include "principal/parallel.hpp"
#include "principal/surface.hpp"
#include "principal/catalog/surfaces.hpp"

namespace principal::catalog {

struct RotationEstimate {
  int section_id = 0;
  FoliationId foliation = FoliationId::Minimal;
  std::vector<std::vector<double>> increments;  // per seed: angle change between consecutive crossings (rad)
  std::vector<double> second_return;            // all second-return increments, wrapped to a period
  double period = 2 * pi;                       // 2 pi / symmetry order
  double mean = 0.0;                            // circular mean of second_return, in (-period/2, period/2]
  double dispersion = 0.0;                      // rms deviation from the mean
  int crossings = 0;
  std::vector<Termination> terminations;
};

struct RotationOptions {
  TraceOptions trace = [] {
    TraceOptions t;
    t.detect_closure = false;
    t.rtol = 1e-10;
    t.record_points = false;
    return t;
  }();
  int returns = 12;             // section crossings per seed
  double angle_floor = 1e-3;    // rad; smaller crossing angles are tangential
  std::optional<FoliationId> foliation;  // default: the one most transverse at the first seed
  int first_leg = -1;  // side of the section the first leg enters (sign of the level function)
  // order of a rotational symmetry of the surface about the section's axis;
  // angles are then only meaningful modulo 2 pi / symmetry
  int symmetry = 1;
};

namespace detail {

inline double wrap_pi(double x) { return std::remainder(x, 2 * pi); }

inline Vec3 level_gradient(const Section& s, const Vec3& p, double h) {
  Vec3 g;
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e[i] = h;
    g[i] = (s.level(p + e) - s.level(p - e)) / (2 * h);
  }
  return g;
}

}  // namespace detail

/// Crossing coordinates are fractions of a turn along the (closed) section.
/// Seeds lying on the section count as the zeroth crossing.
inline RotationEstimate rotation_estimate(const ImplicitSurface& s, const Section& section,
                                          const std::vector<Vec3>& seeds, const RotationOptions& opts = {}) {
  if (seeds.empty()) throw ParamError("rotation_estimate needs at least one seed");
  if (opts.symmetry < 1) throw ParamError("symmetry order must be positive");
  RotationEstimate out;
  const double m = opts.symmetry;
  out.period = 2 * pi / m;
  auto wrap = [&](double x) { return std::remainder(x, out.period); };
  out.section_id = section.id;
  const double h = 1e-6 * s.diameter;
  std::vector<Vec3> starts;
  for (const auto& q : seeds) starts.push_back(s.project(q));
  if (opts.foliation) {
    out.foliation = *opts.foliation;
  } else {
    const PrincipalData pd = implicit_principal_data(s, starts.front());
    const Vec3 g = detail::level_gradient(section, starts.front(), h).normalized();
    out.foliation = std::abs(pd.d1.dot(g)) >= std::abs(pd.d2.dot(g)) ? FoliationId::Minimal : FoliationId::Maximal;
  }
  TraceOptions o = opts.trace;
  o.sections = {section};
  o.stop_after_crossings = opts.returns;
  // the second-return map and its inverse differ by the order of the two
  // legs, so every seed starts on the same side
  auto traces = parallel_map(starts.size(), [&](std::size_t i) {
    TraceOptions oi = o;
    const PrincipalData pd = implicit_principal_data(s, starts[i]);
    const Vec3 d = pd.direction(static_cast<int>(out.foliation));
    const double up = d.dot(detail::level_gradient(section, starts[i], h));
    oi.initial_direction = (up * opts.first_leg >= 0) ? d : Vec3(-d);
    return trace(s, starts[i], out.foliation, oi);
  });

  double sx = 0, sy = 0;
  for (const auto& t : traces) {
    out.terminations.push_back(t.termination);
    if (t.points.size() < 2) continue;  // the start itself failed (an umbilic, say)
    std::vector<double> ang;
    // an off-section start has no meaningful section coordinate
    if (std::abs(section.level(t.start())) <= 1e-9 * s.diameter) ang.push_back(2 * pi * section.coordinate(t.start()));
    for (const auto& c : t.crossings) {
      const Vec3 g = detail::level_gradient(section, c.point, h);
      if (std::abs(c.tangent.dot(g)) < std::sin(opts.angle_floor) * g.norm())
        throw TransversalityError("trajectory crosses the section tangentially");
      ang.push_back(2 * pi * c.coordinate);
    }
    out.crossings += static_cast<int>(t.crossings.size());
    std::vector<double> inc;
    for (std::size_t k = 1; k < ang.size(); ++k) inc.push_back(detail::wrap_pi(ang[k] - ang[k - 1]));
    out.increments.push_back(inc);
    for (std::size_t k = 2; k < ang.size(); k += 2) {
      const double d = wrap(ang[k] - ang[k - 2]);
      out.second_return.push_back(d);
      sx += std::cos(m * d);
      sy += std::sin(m * d);
    }
  }
  if (out.second_return.empty()) throw ReturnFailure("no second return to the section");
  out.mean = std::atan2(sy, sx) / m;
  double v = 0;
  for (double d : out.second_return) v += std::pow(wrap(d - out.mean), 2);
  out.dispersion = std::sqrt(v / static_cast<double>(out.second_return.size()));
  return out;
}

/// Equator seeds at evenly spaced longitudes (offset by half a step).
inline std::vector<Vec3> equator_seeds(double radius, int n) {
  std::vector<Vec3> out;
  for (int i = 0; i < n; ++i) {
    const double lon = 2 * pi * (i + 0.5) / n;
    out.emplace_back(radius * std::cos(lon), radius * std::sin(lon), 0.0);
  }
  return out;
}

struct RotationRow {
  double rho = 0.0;
  double mean = 0.0, dispersion = 0.0;
  int crossings = 0;
  std::string status = "ok";
};

/// Rotation-vs-rho table on S_rho with equator seeds. Failures are recorded
/// per row instead of aborting the sweep.
inline std::vector<RotationRow> s_rho_sweep(const std::vector<double>& rhos, double a, double b, int seeds,
                                            const RotationOptions& opts = {}) {
  std::vector<RotationRow> rows;
  for (double rho : rhos) {
    RotationRow row;
    row.rho = rho;
    try {
      const auto s = s_rho(rho, a, b);
      RotationOptions o = opts;
      o.symmetry = 2;  // f_rho is invariant under the half-turn about the z axis
      const auto est = rotation_estimate(s, equator_section(), equator_seeds(std::min(a, b), seeds), o);
      row.mean = est.mean;
      row.dispersion = est.dispersion;
      row.crossings = est.crossings;
    } catch (const Error& e) {
      row.status = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace principal::catalog
