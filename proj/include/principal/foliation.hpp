#pragma once

// Integration of the principal line fields. The fields are not orientable,
// so every step picks the eigendirection sign closest to the previous
// tangent; the state lives in R^3 and is projected back onto the level set.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "principal/curvature.hpp"
#include "principal/errors.hpp"
#include "principal/parallel.hpp"
#include "principal/surface.hpp"

namespace principal {

enum class FoliationId { Minimal = 0, Maximal = 1 };

inline const char* to_string(FoliationId f) { return f == FoliationId::Minimal ? "minimal" : "maximal"; }
inline FoliationId other(FoliationId f) {
  return f == FoliationId::Minimal ? FoliationId::Maximal : FoliationId::Minimal;
}

enum class Termination { Closed, HitUmbilic, DomainExit, MaxLength, StepFailure };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::Closed: return "Closed";
    case Termination::HitUmbilic: return "HitUmbilic";
    case Termination::DomainExit: return "DomainExit";
    case Termination::MaxLength: return "MaxLength";
    case Termination::StepFailure: return "StepFailure";
  }
  return "?";
}

/// A transversal curve given as the zero set of `level` on the surface,
/// optionally restricted by `accept`, with a coordinate in [0, 1).
struct Section {
  int id = 0;
  std::string name;
  std::function<double(const Vec3&)> level;
  std::function<double(const Vec3&)> coordinate;
  std::function<bool(const Vec3&)> accept;
  int direction = 0;  // record only crossings with this sign of d(level)/ds; 0 for both
  double min_arclength = 0.0;  // ignore crossings closer than this to the start (absolute)
};

/// The equator z = 0 of a surface around the z axis, coordinate = longitude / 2pi.
inline Section equator_section(int id = 0) {
  Section s;
  s.id = id;
  s.name = "equator";
  s.level = [](const Vec3& p) { return p.z(); };
  s.coordinate = [](const Vec3& p) {
    const double u = std::atan2(p.y(), p.x()) / (2 * pi);
    return u < 0 ? u + 1.0 : (u >= 1.0 ? 0.0 : u);
  };
  return s;
}

/// The half plane {y = 0, x > 0}, coordinate = angle around the circle of
/// radius R in that plane (a torus meridian).
inline Section meridian_section(double R, int id = 0) {
  Section s;
  s.id = id;
  s.name = "meridian";
  s.level = [](const Vec3& p) { return p.y(); };
  s.accept = [](const Vec3& p) { return p.x() > 0; };
  s.coordinate = [R](const Vec3& p) {
    const double u = std::atan2(p.z(), p.x() - R) / (2 * pi);
    return u < 0 ? u + 1.0 : (u >= 1.0 ? 0.0 : u);
  };
  return s;
}

struct SectionCrossing {
  int section_id = 0;
  double coordinate = 0.0;
  int direction = 0;  // sign of d(level)/ds at the crossing
  double arclength = 0.0;
  Vec3 point = Vec3::Zero();
  Vec3 tangent = Vec3::Zero();
};

/// Line integrals accumulated along a trajectory (per unit of the
/// traversal direction): dH/(k2-k1), dk2/(k2-k1), dk1/(k2-k1).
struct LineIntegrals {
  double dH = 0.0, dk2 = 0.0, dk1 = 0.0;
};

struct Trajectory {
  FoliationId foliation = FoliationId::Minimal;
  std::vector<Vec3> points;
  std::vector<Vec3> tangents;
  std::vector<double> arclength;
  Termination termination = Termination::StepFailure;
  std::vector<SectionCrossing> crossings;
  LineIntegrals integrals;
  double length = 0.0;
  int hit_umbilic = -1;  // index into the known umbilic list when HitUmbilic
  bool stopped_at_crossing = false;
  std::string note;

  const Vec3& start() const { return points.front(); }
  const Vec3& end() const { return points.back(); }
};

/// Custom stop rule, called with each accepted step segment [a, b] and the
/// arclength at b: return a termination to stop after the step.
using StopRule = std::function<std::optional<Termination>(const Vec3& a, const Vec3& b, double s)>;

struct TraceOptions {
  // lengths are relative to the surface diameter
  double max_length = 50.0;
  double max_step = 0.02;
  double min_step = 1e-12;
  double rtol = 1e-8;  // local error per step
  double angle_tol = 0.5 * pi / 180;
  double umbilic_exclusion = 1e-3;
  double closure_tol = 1e-6;
  double closure_window = 0.05;
  bool detect_closure = true;
  int initial_sign = 1;
  std::optional<Vec3> initial_direction;  // overrides initial_sign when set
  std::vector<Vec3> umbilics;
  std::vector<Section> sections;
  bool integrals = false;
  bool record_points = true;
  std::size_t max_steps = 5'000'000;
  StopRule stop;
  int stop_after_crossings = 0;  // stop exactly at the n-th accepted section crossing
};

namespace detail {

using State = Eigen::Matrix<double, 6, 1>;  // position, then the three integrals

struct FieldSample {
  bool ok = false;
  Vec3 dir = Vec3::Zero();
  Vec3 integrand = Vec3::Zero();
};

inline FieldSample field(const ImplicitSurface& s, FoliationId fol, const Vec3& p, const Vec3& ref, bool integrals) {
  FieldSample out;
  Local3 l3;
  Local2 l;
  if (integrals) {
    l3 = s.local3(p);
    l = l3;
  } else {
    l = s.local2(p);
  }
  if (!(l.grad.norm() > s.regularity_floor())) return out;
  const PrincipalData pd = principal_data(tangent_shape(l, s.orientation));
  if (!pd.directions_defined) return out;
  Vec3 d = pd.direction(static_cast<int>(fol));
  if (d.dot(ref) < 0) d = -d;
  out.dir = d;
  out.ok = true;
  if (integrals) {
    const CurvatureRates r = curvature_rates(l3, s.orientation, d);
    const double gap = r.k2 - r.k1;
    out.integrand = Vec3(r.dH / gap, r.dk2 / gap, r.dk1 / gap);
  }
  return out;
}

struct Step {
  bool ok = false;
  State y;
  Vec3 tangent = Vec3::Zero();
  double err = 0.0;
};

/// One Dormand-Prince 5(4) step of length h followed by projection.
inline Step dp45(const ImplicitSurface& s, FoliationId fol, const State& y0, const Vec3& ref, double h,
                 bool integrals) {
  static constexpr double a[7][6] = {
      {0, 0, 0, 0, 0, 0},
      {1.0 / 5, 0, 0, 0, 0, 0},
      {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
      {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
      {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static constexpr double b5[7] = {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0};
  static constexpr double b4[7] = {5179.0 / 57600,      0,           7571.0 / 16695, 393.0 / 640,
                                   -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};
  Step out;
  std::array<State, 7> k;
  for (int i = 0; i < 7; ++i) {
    State yi = y0;
    for (int j = 0; j < i; ++j) yi += h * a[i][j] * k[j];
    const FieldSample f = field(s, fol, yi.head<3>(), ref, integrals);
    if (!f.ok) return out;
    k[i].head<3>() = f.dir;
    k[i].tail<3>() = f.integrand;
  }
  State y5 = y0, y4 = y0;
  for (int i = 0; i < 7; ++i) {
    y5 += h * b5[i] * k[i];
    y4 += h * b4[i] * k[i];
  }
  out.err = (y5.head<3>() - y4.head<3>()).norm();
  try {
    y5.head<3>() = s.project(y5.head<3>());
  } catch (const Error&) {
    return out;
  }
  const FieldSample fe = field(s, fol, y5.head<3>(), ref, false);
  if (!fe.ok) return out;
  out.ok = true;
  out.y = y5;
  out.tangent = fe.dir;
  return out;
}

inline double segment_distance(const Vec3& a, const Vec3& b, const Vec3& q) {
  const Vec3 ab = b - a;
  const double L2 = ab.squaredNorm();
  const double t = L2 > 0 ? std::clamp((q - a).dot(ab) / L2, 0.0, 1.0) : 0.0;
  return (a + t * ab - q).norm();
}

/// Root of g along the step [0, h] by Illinois regula falsi.
template <class G>
double refine_step_root(G&& g, double h, double g0, double g1, double tol) {
  double lo = 0, hi = h, flo = g0, fhi = g1;
  int side = 0;
  double x = 0.5 * h;
  for (int it = 0; it < 100 && hi - lo > tol; ++it) {
    x = (flo * hi - fhi * lo) / (flo - fhi);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    const double fx = g(x);
    if (fx == 0.0) return x;
    if ((fx < 0) == (flo < 0)) {
      lo = x;
      flo = fx;
      if (side == -1) fhi *= 0.5;
      side = -1;
    } else {
      hi = x;
      fhi = fx;
      if (side == 1) flo *= 0.5;
      side = 1;
    }
  }
  return x;
}

}  // namespace detail

/// Integrates the chosen principal line field from `start`.
inline Trajectory trace(const ImplicitSurface& s, const Vec3& start, FoliationId fol, const TraceOptions& o = {}) {
  const double D = s.diameter;
  const double max_len = o.max_length * D, max_step = o.max_step * D, min_step = o.min_step * D;
  const double tol = o.rtol * D;
  const double max_turn = 1.8 * o.angle_tol;
  const double excl = o.umbilic_exclusion * D;
  const double window = o.closure_window * D;

  Trajectory tr;
  tr.foliation = fol;
  // a failed start still records where it was, so start() and end() stay valid
  auto fail = [&](const char* why, const Vec3& at) {
    tr.termination = Termination::StepFailure;
    tr.note = why;
    tr.points = {at};
    tr.tangents = {Vec3::Zero()};
    tr.arclength = {0.0};
    return tr;
  };

  detail::State y = detail::State::Zero();
  try {
    y.head<3>() = s.project(start);
  } catch (const Error&) {
    return fail("start point could not be projected", start);
  }
  const Vec3 p0 = y.head<3>();
  Vec3 ref = Vec3::Zero();
  {
    const Local2 l = s.local2(p0);
    if (!(l.grad.norm() > s.regularity_floor())) return fail("start point is critical", p0);
    const PrincipalData pd = principal_data(tangent_shape(l, s.orientation));
    if (!pd.directions_defined) return fail("start point is umbilic", p0);
    ref = pd.direction(static_cast<int>(fol));
    if (o.initial_direction ? ref.dot(*o.initial_direction) < 0 : o.initial_sign < 0) ref = -ref;
  }
  const Vec3 t0 = ref;
  for (std::size_t i = 0; i < o.umbilics.size(); ++i)
    if ((o.umbilics[i] - p0).norm() < excl) {
      tr.termination = Termination::HitUmbilic;
      tr.hit_umbilic = static_cast<int>(i);
      tr.points = {p0};
      tr.tangents = {t0};
      tr.arclength = {0.0};
      return tr;
    }

  auto record = [&](const detail::State& st, const Vec3& t, double arc, bool force) {
    if (o.record_points || force) {
      tr.points.push_back(st.head<3>());
      tr.tangents.push_back(t);
      tr.arclength.push_back(arc);
    }
  };
  record(y, ref, 0.0, true);

  double sarc = 0.0;
  double h = max_step;
  bool left_start = false;
  std::vector<double> sec_prev(o.sections.size());
  for (std::size_t i = 0; i < o.sections.size(); ++i) sec_prev[i] = o.sections[i].level(p0);
  double sigma_prev = 0.0;

  for (std::size_t n = 0; n < o.max_steps; ++n) {
    h = std::min({h, max_step, max_len - sarc});
    if (h < min_step) {
      if (max_len - sarc <= min_step) {
        tr.termination = Termination::MaxLength;
        break;
      }
      tr.termination = Termination::StepFailure;
      tr.note = "step size underflow";
      break;
    }
    const detail::Step st = detail::dp45(s, fol, y, ref, h, o.integrals);
    if (!st.ok) {
      h *= 0.25;
      continue;
    }
    const double turn = std::acos(std::clamp(st.tangent.dot(ref), -1.0, 1.0));
    if (st.err > tol || turn > max_turn) {
      double f = st.err > tol ? 0.9 * std::pow(tol / st.err, 0.2) : 1.0;
      if (turn > max_turn) f = std::min(f, 0.9 * max_turn / turn);
      h *= std::clamp(f, 0.1, 0.9);
      continue;
    }
    const Vec3 pa = y.head<3>(), pb = st.y.head<3>();
    const double s_next = sarc + h;

    // section crossings within this step
    struct Pending {
      double hstar;
      SectionCrossing c;
    };
    std::vector<Pending> pend;
    for (std::size_t i = 0; i < o.sections.size(); ++i) {
      const Section& sec = o.sections[i];
      const double g1 = sec.level(pb), g0 = sec_prev[i];
      sec_prev[i] = g1;
      if (g0 == 0.0 || (g0 < 0) == (g1 < 0)) continue;
      if (sec.direction != 0 && (g1 > g0 ? 1 : -1) != sec.direction) continue;
      auto g = [&](double hh) {
        const detail::Step sx = detail::dp45(s, fol, y, ref, hh, false);
        return sx.ok ? sec.level(sx.y.head<3>()) : g1;
      };
      const double hs = detail::refine_step_root(g, h, g0, g1, 1e-15 * D);
      const detail::Step sx = detail::dp45(s, fol, y, ref, hs, false);
      const Vec3 q = sx.ok ? Vec3(sx.y.head<3>()) : pb;
      if (sec.accept && !sec.accept(q)) continue;
      if (sarc + hs < sec.min_arclength) continue;
      SectionCrossing c;
      c.section_id = sec.id;
      c.coordinate = sec.coordinate(q);
      c.direction = g1 > g0 ? 1 : -1;
      c.arclength = sarc + hs;
      c.point = q;
      c.tangent = sx.ok ? sx.tangent : st.tangent;
      pend.push_back({hs, c});
    }
    std::sort(pend.begin(), pend.end(), [](const Pending& l, const Pending& r) { return l.hstar < r.hstar; });

    // closure on the plane through the start point normal to the start tangent
    bool closed = false;
    double h_close = h;
    if (o.detect_closure) {
      const double sig = (pb - p0).dot(t0);
      if ((pb - p0).norm() > 2 * window) left_start = true;
      if (left_start && sigma_prev < 0 && sig >= 0 && (pb - p0).norm() < window) {
        auto g = [&](double hh) {
          const detail::Step sx = detail::dp45(s, fol, y, ref, hh, false);
          return sx.ok ? (Vec3(sx.y.head<3>()) - p0).dot(t0) : sig;
        };
        h_close = detail::refine_step_root(g, h, sigma_prev, sig, 1e-15 * D);
        const detail::Step sx = detail::dp45(s, fol, y, ref, h_close, o.integrals);
        if (sx.ok && (Vec3(sx.y.head<3>()) - p0).norm() < o.closure_tol * D &&
            sx.tangent.dot(t0) > std::cos(o.angle_tol)) {
          closed = true;
          for (const auto& pc : pend)
            if (pc.hstar < h_close) tr.crossings.push_back(pc.c);
          y = sx.y;
          sarc += h_close;
          record(y, sx.tangent, sarc, true);
          tr.termination = Termination::Closed;
        }
      }
      sigma_prev = sig;
    }
    if (closed) break;

    if (o.stop_after_crossings > 0 &&
        tr.crossings.size() + pend.size() >= static_cast<std::size_t>(o.stop_after_crossings)) {
      const Pending& last = pend[static_cast<std::size_t>(o.stop_after_crossings) - tr.crossings.size() - 1];
      for (const auto& pc : pend)
        if (pc.hstar <= last.hstar) tr.crossings.push_back(pc.c);
      const detail::Step sx = detail::dp45(s, fol, y, ref, last.hstar, o.integrals);
      if (sx.ok) {
        y = sx.y;
        ref = sx.tangent;
      }
      sarc += last.hstar;
      record(y, ref, sarc, true);
      tr.termination = Termination::MaxLength;
      tr.stopped_at_crossing = true;
      tr.note = "stopped at section crossing";
      break;
    }

    for (const auto& pc : pend) tr.crossings.push_back(pc.c);
    y = st.y;
    ref = st.tangent;
    sarc = s_next;
    record(y, ref, sarc, false);

    bool stop = false;
    for (std::size_t i = 0; i < o.umbilics.size() && !stop; ++i)
      if (detail::segment_distance(pa, pb, o.umbilics[i]) < excl) {
        tr.termination = Termination::HitUmbilic;
        tr.hit_umbilic = static_cast<int>(i);
        stop = true;
      }
    if (!stop && !s.bounding_box.contains(pb)) {
      tr.termination = Termination::DomainExit;
      stop = true;
    }
    if (!stop && o.stop) {
      if (auto t = o.stop(pa, pb, sarc)) {
        tr.termination = *t;
        stop = true;
      }
    }
    if (!stop && sarc >= max_len * (1 - 1e-15)) {
      tr.termination = Termination::MaxLength;
      stop = true;
    }
    if (stop) {
      if (!o.record_points) record(y, ref, sarc, true);
      break;
    }

    // step growth
    const double f_err = st.err > 0 ? 0.9 * std::pow(tol / st.err, 0.2) : 5.0;
    const double f_turn = turn > 0 ? 0.9 * max_turn / turn : 5.0;
    h *= std::clamp(std::min(f_err, f_turn), 0.2, 5.0);
  }
  tr.length = sarc;
  tr.integrals = {y[3], y[4], y[5]};
  return tr;
}

/// Traces a batch of starts in parallel; results in input order.
inline std::vector<Trajectory> trace_many(const ImplicitSurface& s, const std::vector<Vec3>& starts, FoliationId fol,
                                          const TraceOptions& o = {}) {
  return parallel_map(starts.size(), [&](std::size_t i) { return trace(s, starts[i], fol, o); });
}

// Limit sets

enum class OmegaLimit { Umbilic, Cycle, RecurrentOrUndetermined };

inline const char* to_string(OmegaLimit w) {
  switch (w) {
    case OmegaLimit::Umbilic: return "Umbilic";
    case OmegaLimit::Cycle: return "Cycle";
    case OmegaLimit::RecurrentOrUndetermined: return "RecurrentOrUndetermined";
  }
  return "?";
}

struct OmegaVerdict {
  OmegaLimit kind = OmegaLimit::RecurrentOrUndetermined;
  int target = -1;          // umbilic or cycle index; -1 for the trajectory itself
  int eps_returns = 0;      // entries into the epsilon ball
  double min_return_gap = 0.0;  // smallest distance of a late return to the ball center
  double final_cycle_distance = std::numeric_limits<double>::infinity();
  std::vector<double> return_gaps;  // closest approach to the ball center, per return
  // the gaps move monotonically: a slow spiral past the start, not recurrence
  bool drifting = false;
  std::string evidence;

  bool recurrent(int min_returns) const {
    return kind == OmegaLimit::RecurrentOrUndetermined && eps_returns >= min_returns && !drifting;
  }
};

struct OmegaOptions {
  double eps = 1e-2;             // relative to the diameter
  int min_returns = 20;
  double cycle_capture = 1e-3;   // relative to the diameter
  double late_fraction = 0.3;
};

inline double polyline_distance(const std::vector<Vec3>& poly, const Vec3& q) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < poly.size(); ++i) d = std::min(d, detail::segment_distance(poly[i], poly[i + 1], q));
  if (poly.size() == 1) d = (poly[0] - q).norm();
  return d;
}

/// Heuristic limit-set verdict. Never claims more than the data supports:
/// convergence to a known cycle or umbilic is reported as such, everything
/// else is RecurrentOrUndetermined with the return statistics attached.
inline OmegaVerdict omega_limit_classify(const ImplicitSurface& s, const Trajectory& t,
                                         const std::vector<Vec3>& umbilics,
                                         const std::vector<std::vector<Vec3>>& cycles, const OmegaOptions& o = {}) {
  OmegaVerdict v;
  const double D = s.diameter;
  if (t.termination == Termination::HitUmbilic) {
    v.kind = OmegaLimit::Umbilic;
    v.target = t.hit_umbilic;
    if (v.target < 0 && !umbilics.empty()) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < umbilics.size(); ++i) {
        const double d = (umbilics[i] - t.end()).norm();
        if (d < best) {
          best = d;
          v.target = static_cast<int>(i);
        }
      }
    }
    v.evidence = "trajectory entered an umbilic exclusion ball";
    return v;
  }
  if (t.termination == Termination::Closed) {
    v.kind = OmegaLimit::Cycle;
    v.evidence = "trajectory closed on itself";
    return v;
  }

  // convergence toward a known cycle: late distances small and non-increasing
  const std::size_t n = t.points.size();
  const std::size_t late = static_cast<std::size_t>(static_cast<double>(n) * (1 - o.late_fraction));
  for (std::size_t c = 0; c < cycles.size(); ++c) {
    if (cycles[c].size() < 2 || n < 4) continue;
    std::vector<double> d;
    const std::size_t stride = std::max<std::size_t>(1, (n - late) / 50);
    for (std::size_t i = late; i < n; i += stride) d.push_back(polyline_distance(cycles[c], t.points[i]));
    d.push_back(polyline_distance(cycles[c], t.end()));
    const double last = d.back();
    const double first = d.front();
    if (last < o.cycle_capture * D && last <= first * (1 + 1e-6) + 1e-12 * D) {
      v.kind = OmegaLimit::Cycle;
      v.target = static_cast<int>(c);
      v.final_cycle_distance = last;
      v.evidence = "late trajectory approaches a known cycle";
      return v;
    }
    v.final_cycle_distance = std::min(v.final_cycle_distance, last);
  }

  // recurrence: entries into the epsilon ball around the start
  const double eps = o.eps * D;
  const Vec3 c = t.start();
  bool inside = true;
  std::vector<double> gaps;
  double closest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < n; ++i) {
    const double d = detail::segment_distance(t.points[i - 1], t.points[i], c);
    if (d < eps) {
      if (!inside) {
        ++v.eps_returns;
        closest = d;
      } else {
        closest = std::min(closest, d);
      }
      inside = true;
    } else {
      if (inside && v.eps_returns > 0) gaps.push_back(closest);
      inside = false;
    }
  }
  if (inside && v.eps_returns > 0) gaps.push_back(closest);
  v.return_gaps = gaps;
  if (gaps.size() >= 3) {
    bool up = true, down = true;
    for (std::size_t i = 1; i < gaps.size(); ++i) {
      up = up && gaps[i] >= gaps[i - 1];
      down = down && gaps[i] <= gaps[i - 1];
    }
    v.drifting = up || down;
  }
  if (!gaps.empty()) {
    const std::size_t h = gaps.size() / 2;
    v.min_return_gap = *std::min_element(gaps.begin() + static_cast<std::ptrdiff_t>(h), gaps.end());
  }
  v.kind = OmegaLimit::RecurrentOrUndetermined;
  if (v.eps_returns >= o.min_returns && v.drifting)
    v.evidence = "returns drift monotonically away from or toward the start (slow spiral)";
  else if (v.eps_returns >= o.min_returns)
    v.evidence = "repeated returns to the epsilon ball without convergence (dense-line evidence)";
  else
    v.evidence = "no convergence detected; too few returns to call it recurrent";
  return v;
}

}  // namespace principal
