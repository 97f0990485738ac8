#pragma once

// Principal cycles: detection, Poincare return map on a transversal
// section, and the two estimates of its derivative.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "principal/curvature.hpp"
#include "principal/errors.hpp"
#include "principal/foliation.hpp"
#include "principal/parallel.hpp"
#include "principal/surface.hpp"

namespace principal {

/// Plane section through `anchor` normal to the cycle tangent t0; the
/// coordinate runs along w = n0 x t0.
struct ReturnSection {
  Vec3 anchor = Vec3::Zero();
  Vec3 t0 = Vec3::UnitX(), w = Vec3::UnitY(), n0 = Vec3::UnitZ();
  double window = 0.0;  // absolute radius around the anchor

  double coordinate(const Vec3& p) const { return (p - anchor).dot(w); }

  /// Surface point on the section with coordinate x.
  Vec3 point(const ImplicitSurface& s, double x) const {
    Vec3 p = anchor + x * w;
    for (int it = 0; it < 50; ++it) {
      const Local2 l = s.local2(p);
      const double slope = l.grad.dot(n0);
      if (std::abs(slope) <= s.regularity_floor()) throw ReturnFailure("section is tangent to the surface");
      const double dc = (l.value - s.level) / slope;
      p -= dc * n0;
      if (std::abs(dc) <= 1e-15 * s.scale()) break;
    }
    return p;
  }
};

inline ReturnSection make_section(const ImplicitSurface& s, const Vec3& p, FoliationId fol, const Vec3& hint,
                                  double window) {
  const PrincipalData pd = implicit_principal_data(s, p);
  if (!pd.directions_defined) throw UmbilicProximityError("section anchored at an umbilic");
  ReturnSection sec;
  sec.anchor = p;
  sec.t0 = pd.direction(static_cast<int>(fol));
  if (sec.t0.dot(hint) < 0) sec.t0 = -sec.t0;
  sec.n0 = pd.normal;
  sec.w = sec.n0.cross(sec.t0).normalized();
  sec.window = window;
  return sec;
}

enum class Hyperbolicity { Hyperbolic, NearUnity, Undetermined };

inline const char* to_string(Hyperbolicity h) {
  switch (h) {
    case Hyperbolicity::Hyperbolic: return "Hyperbolic";
    case Hyperbolicity::NearUnity: return "NearUnity";
    case Hyperbolicity::Undetermined: return "Undetermined";
  }
  return "?";
}

struct PrincipalCycle {
  FoliationId foliation = FoliationId::Minimal;
  Trajectory curve;
  double period_length = 0.0;
  ReturnSection section;
  double refine_residual = 0.0;
  int returns_used = 1;  // 2 when the first return reverses the section
  double tprime_fd = std::numeric_limits<double>::quiet_NaN();
  double tprime_fd_err = std::numeric_limits<double>::quiet_NaN();
  // raw line integrals over one traversal: dH/(k2-k1) = (1/2) dH/sqrt(H^2-K), and dk2/(k2-k1)
  double integral_dH = std::numeric_limits<double>::quiet_NaN();
  double integral_dk2 = std::numeric_limits<double>::quiet_NaN();
  double tprime_integral = std::numeric_limits<double>::quiet_NaN();
  double tprime_integral_err = std::numeric_limits<double>::quiet_NaN();
  int sign_branch = 1;
  double min_gap = 0.0;  // min of k2 - k1 along the cycle
  Hyperbolicity verdict = Hyperbolicity::Undetermined;
  bool hyperbolic = false;
  std::string note;
};

struct CycleOptions {
  TraceOptions trace = [] {
    TraceOptions t;
    t.rtol = 1e-12;
    t.detect_closure = false;
    return t;
  }();
  double section_window = 0.05;  // relative to the diameter
  double fd_offset = 1e-3;       // relative to the diameter
  double refine_tol = 1e-12;     // relative to the diameter
  int refine_iter = 40;
  int max_recenter = 20;  // section re-anchorings while chasing a cycle outside the window
  double merge_tol = 1e-3;       // Hausdorff distance, relative to the diameter
  double hyperbolicity_tol = 1e-4;
};

struct ReturnResult {
  double x = 0.0;
  Trajectory trajectory;
};

/// Coordinate of the n-th return to the section of the line through the
/// section point with coordinate x.
inline ReturnResult section_return(const ImplicitSurface& s, FoliationId fol, const ReturnSection& sec, double x,
                                   int returns, const CycleOptions& opts, bool integrals = false) {
  TraceOptions o = opts.trace;
  o.detect_closure = false;
  o.initial_direction = sec.t0;
  o.integrals = integrals;
  Section plane;
  plane.id = -1;
  plane.name = "return";
  const Vec3 a = sec.anchor, t0 = sec.t0;
  const double win = sec.window;
  plane.level = [a, t0](const Vec3& p) { return (p - a).dot(t0); };
  plane.coordinate = [](const Vec3&) { return 0.0; };
  plane.accept = [a, win](const Vec3& p) { return (p - a).norm() < win; };
  plane.direction = 1;
  plane.min_arclength = 2 * win;
  o.sections = {plane};
  o.stop_after_crossings = returns;
  const Vec3 p = sec.point(s, x);
  ReturnResult r;
  r.trajectory = trace(s, p, fol, o);
  if (!r.trajectory.stopped_at_crossing)
    throw ReturnFailure(std::string("no return to the section (") + to_string(r.trajectory.termination) + ")");
  r.x = sec.coordinate(r.trajectory.end());
  return r;
}

inline double hausdorff(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  auto one = [](const std::vector<Vec3>& p, const std::vector<Vec3>& q) {
    double d = 0;
    for (const auto& x : p) d = std::max(d, polyline_distance(q, x));
    return d;
  };
  return std::max(one(a, b), one(b, a));
}

/// Fixed point of the return map near the seed by a secant iteration on
/// the displacement T(x) - x. Returns nullopt when no cycle is found.
inline std::optional<PrincipalCycle> refine_cycle(const ImplicitSurface& s, const Vec3& seed, FoliationId fol,
                                                  const CycleOptions& opts = {}) {
  const double D = s.diameter;
  const double win = opts.section_window * D;
  const double tol = opts.refine_tol * D;
  try {
    const Vec3 p0 = s.project(seed);
    const PrincipalData pd0 = implicit_principal_data(s, p0);
    if (!pd0.directions_defined) return std::nullopt;
    ReturnSection sec = make_section(s, p0, fol, pd0.direction(static_cast<int>(fol)), win);
    auto disp = [&](double x) { return section_return(s, fol, sec, x, 1, opts).x - x; };
    double x = 0.0, d = disp(x);
    double last_edge = 0.0;
    // a slowly attracting or repelling cycle may sit outside the window: when
    // the secant keeps pushing against the edge, re-anchor there and go on
    for (int hop = 0; hop <= opts.max_recenter && std::abs(d) > tol; ++hop) {
      double x0 = x, d0 = d;
      double x1 = std::clamp(x0 + d0, -0.5 * win, 0.5 * win), d1 = disp(x1);
      bool edge = false;
      for (int it = 0; it < opts.refine_iter && std::abs(d1) > tol; ++it) {
        const double den = d1 - d0;
        if (den == 0.0) break;
        const double raw = x1 - d1 * (x1 - x0) / den;
        const double x2 = std::clamp(raw, -0.5 * win, 0.5 * win);
        if (x2 != raw && x1 == x2) {
          edge = true;
          break;
        }
        x0 = x1;
        d0 = d1;
        x1 = x2;
        d1 = disp(x1);
      }
      x = x1;
      d = d1;
      if (!edge) break;
      // pushing back and forth means the displacement is flat, not a far root
      if (last_edge * x < 0) break;
      last_edge = x;
      const Vec3 q = sec.point(s, x);
      const Vec3 t = implicit_principal_data(s, q).direction(static_cast<int>(fol));
      sec = make_section(s, q, fol, t.dot(sec.t0) >= 0 ? t : Vec3(-t), win);
      x = 0.0;
      d = disp(x);
    }
    if (!(std::abs(d) <= std::max(tol, 1e-9 * D))) return std::nullopt;

    PrincipalCycle c;
    c.foliation = fol;
    c.refine_residual = std::abs(d);
    const Vec3 anchor = sec.point(s, x);
    c.section = make_section(s, anchor, fol, sec.t0, win);
    ReturnResult one = section_return(s, fol, c.section, 0.0, 1, opts, true);
    c.curve = std::move(one.trajectory);
    c.curve.termination = Termination::Closed;
    c.curve.stopped_at_crossing = false;
    c.curve.note = "refined principal cycle";
    c.period_length = c.curve.length;
    c.integral_dH = c.curve.integrals.dH;
    c.integral_dk2 = c.curve.integrals.dk2;
    c.min_gap = std::numeric_limits<double>::infinity();
    for (const auto& q : c.curve.points) {
      const PrincipalData pd = implicit_principal_data(s, q);
      c.min_gap = std::min(c.min_gap, pd.umbilic_deviation);
    }
    return c;
  } catch (const ReturnFailure&) {
    return std::nullopt;
  } catch (const CriticalPointError&) {
    return std::nullopt;
  } catch (const UmbilicProximityError&) {
    return std::nullopt;
  }
}

/// Central difference of the return coordinate at offsets +-h and +-h/2,
/// Richardson-extrapolated. Switches to the second return when the first
/// one reverses the section.
inline void return_map_derivative_fd(const ImplicitSurface& s, PrincipalCycle& c, const CycleOptions& opts = {}) {
  const double h = opts.fd_offset * s.diameter;
  auto central = [&](double hh, int n) {
    const double tp = section_return(s, c.foliation, c.section, hh, n, opts).x;
    const double tm = section_return(s, c.foliation, c.section, -hh, n, opts).x;
    return (tp - tm) / (2 * hh);
  };
  int n = 1;
  double d1 = central(h, n);
  if (d1 < 0) {
    n = 2;
    d1 = central(h, n);
  }
  const double d2 = central(0.5 * h, n);
  c.returns_used = n;
  c.tprime_fd = (4 * d2 - d1) / 3;
  c.tprime_fd_err = std::abs(d2 - d1) / 3;
}

/// exp of the line integral along the refined cycle, with the sign branch
/// matched against the finite-difference estimate when one is available.
inline void return_map_derivative_integral(const ImplicitSurface& s, PrincipalCycle& c, const CycleOptions& opts = {}) {
  const double kscale = std::max(1.0, 1.0 / s.diameter);
  if (!(c.min_gap > 1e-6 * kscale)) throw UmbilicProximityError("H^2 - K nearly vanishes along the cycle");
  const double I = c.returns_used * c.integral_dH;
  const double I2 = c.returns_used * c.integral_dk2;
  int branch = 1;
  if (std::isfinite(c.tprime_fd) && c.tprime_fd > 0) {
    const double lf = std::log(c.tprime_fd);
    if (std::abs(lf) > opts.hyperbolicity_tol && lf * I < 0) branch = -1;
  }
  c.sign_branch = branch;
  c.tprime_integral = std::exp(branch * I);
  c.tprime_integral_err = std::abs(I - I2) * c.tprime_integral;
}

inline Hyperbolicity hyperbolicity(PrincipalCycle& c, double tol = 1e-4) {
  const bool fd = std::isfinite(c.tprime_fd) && c.tprime_fd > 0;
  const bool in = std::isfinite(c.tprime_integral) && c.tprime_integral > 0;
  if (!fd && !in) return c.verdict = Hyperbolicity::Undetermined;
  double lt;
  if (fd && in)
    lt = c.tprime_fd_err <= c.tprime_integral_err ? std::log(c.tprime_fd) : std::log(c.tprime_integral);
  else
    lt = fd ? std::log(c.tprime_fd) : std::log(c.tprime_integral);
  c.verdict = std::abs(lt) > tol ? Hyperbolicity::Hyperbolic : Hyperbolicity::NearUnity;
  c.hyperbolic = c.verdict == Hyperbolicity::Hyperbolic;
  return c.verdict;
}

/// Full treatment of one cycle: both derivative estimates and the verdict.
inline void analyze_cycle(const ImplicitSurface& s, PrincipalCycle& c, const CycleOptions& opts = {}) {
  try {
    return_map_derivative_fd(s, c, opts);
  } catch (const ReturnFailure& e) {
    c.note = e.what();
  }
  try {
    return_map_derivative_integral(s, c, opts);
  } catch (const UmbilicProximityError& e) {
    c.note = e.what();
  }
  hyperbolicity(c, opts.hyperbolicity_tol);
}

/// Seeds are traced to a return on their own section and refined to fixed
/// points; duplicates (Hausdorff distance below merge_tol) are dropped in
/// seed order.
inline std::vector<PrincipalCycle> find_cycles(const ImplicitSurface& s, const std::vector<Vec3>& seeds,
                                               FoliationId fol, const CycleOptions& opts = {}) {
  auto found = parallel_map(seeds.size(), [&](std::size_t i) { return refine_cycle(s, seeds[i], fol, opts); });
  std::vector<PrincipalCycle> out;
  for (auto& f : found) {
    if (!f) continue;
    const bool dup = std::any_of(out.begin(), out.end(), [&](const PrincipalCycle& c) {
      return hausdorff(c.curve.points, f->curve.points) < opts.merge_tol * s.diameter;
    });
    if (!dup) out.push_back(std::move(*f));
  }
  auto done = parallel_map(out.size(), [&](std::size_t i) {
    PrincipalCycle c = out[i];
    analyze_cycle(s, c, opts);
    return c;
  });
  return done;
}

}  // namespace principal
