#pragma once

// Separatrix directions by a fate scan on a small circle around each
// umbilic, and the separatrix connection scan.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "principal/foliation.hpp"
#include "principal/umbilics.hpp"

namespace principal {

struct SeparatrixOptions {
  double radius = 1e-3;        // r0, relative to the diameter
  double horizon = 5.0;        // exit radius in units of r0
  double hit_fraction = 0.1;   // hit radius in units of r0
  int scan = 180;              // launch angles on the circle
  int bisect = 18;
  double jump = 0.5;           // rad; exit-angle jump counted as a fate change
  int fine = 24;               // samples of the close look around an isolated radial ray
  double fine_window = 3 * pi / 180;
};

namespace detail {

struct Fate {
  int hits = 0;                 // trajectory ends that reached the hit radius
  std::vector<double> exits;    // exit angles of the other ends
};

inline double circ_dist(double a, double b) { return std::abs(std::remainder(a - b, 2 * pi)); }

inline double wrap2pi(double a) {
  a = std::fmod(a, 2 * pi);
  return a < 0 ? a + 2 * pi : a;
}

struct Local {
  const ImplicitSurface& s;
  const MongeCoefficients& m;
  double r0, r_out, r_hit;

  Vec2 plane(const Vec3& p) const {
    const Vec3 d = p - m.origin;
    return Vec2(d.dot(m.e1), d.dot(m.e2));
  }
  Vec3 on_circle(double al, double r) const {
    return s.project(m.point(r * std::cos(al), r * std::sin(al)));
  }
};

inline Fate fate(const Local& L, FoliationId fol, double al) {
  Fate f;
  const Vec3 p = L.on_circle(al, L.r0);
  TraceOptions o;
  const double D = L.s.diameter;
  o.detect_closure = false;
  o.max_step = 0.5 * L.r0 / D;
  o.max_length = 40 * L.r_out / D;
  o.angle_tol = 5 * pi / 180;
  o.rtol = 1e-10;
  o.umbilic_exclusion = 0;
  o.stop = [&L](const Vec3&, const Vec3& q, double) -> std::optional<Termination> {
    const double r = (q - L.m.origin).norm();
    if (r < L.r_hit) return Termination::HitUmbilic;
    if (r > L.r_out) return Termination::DomainExit;
    return std::nullopt;
  };
  for (int sg : {1, -1}) {
    o.initial_sign = sg;
    const Trajectory t = trace(L.s, p, fol, o);
    if (t.termination == Termination::DomainExit) {
      const Vec2 q = L.plane(t.end());
      f.exits.push_back(wrap2pi(std::atan2(q[1], q[0])));
    } else {
      ++f.hits;
    }
  }
  std::sort(f.exits.begin(), f.exits.end());
  return f;
}

inline bool fate_changed(const Fate& a, const Fate& b, double jump) {
  if (a.hits != b.hits) return true;
  if (a.exits.size() == 2) {
    const double d1 = std::max(circ_dist(a.exits[0], b.exits[0]), circ_dist(a.exits[1], b.exits[1]));
    const double d2 = std::max(circ_dist(a.exits[0], b.exits[1]), circ_dist(a.exits[1], b.exits[0]));
    return std::min(d1, d2) > jump;
  }
  if (a.exits.size() == 1) return circ_dist(a.exits[0], b.exits[0]) > jump;
  return false;
}

/// Angles on the r0 circle where the foliation direction is radial.
inline std::vector<double> radial_rays(const Local& L, FoliationId fol, int samples = 1440) {
  auto g = [&](double al) {
    const Vec3 p = L.on_circle(al, L.r0);
    const PrincipalData pd = principal_data(tangent_shape(L.s.local2(p), L.s.orientation));
    const Vec3 d = pd.direction(static_cast<int>(fol));
    const double psi = std::atan2(d.dot(L.m.e2), d.dot(L.m.e1));
    return std::array<double, 2>{std::sin(2 * (psi - al)), std::cos(2 * (psi - al))};
  };
  // samples sit half a step off the frame axis, where symmetric rays lie
  std::vector<double> out;
  const double step = 2 * pi / samples;
  auto prev = g(0.5 * step);
  for (int i = 1; i <= samples; ++i) {
    const double al = (i + 0.5) * step;
    const auto cur = g(al);
    if ((prev[0] < 0) != (cur[0] < 0) && prev[1] + cur[1] > 0) {
      double lo = al - step, hi = al, flo = prev[0];
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = g(mid)[0];
        if ((fm < 0) == (flo < 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      out.push_back(wrap2pi(0.5 * (lo + hi)));
    }
    prev = cur;
  }
  return out;
}

// Position of `x` inside the circular interval starting at `lo` with length w.
inline bool in_arc(double x, double lo, double w) { return wrap2pi(x - lo) <= w; }

}  // namespace detail

/// Separatrix directions of both foliations at a Darbouxian umbilic. Fills
/// rec.separatrices and rec.separatrix_status.
inline void separatrix_directions(const ImplicitSurface& s, UmbilicRecord& rec, const SeparatrixOptions& opts = {}) {
  rec.separatrices = {};
  if (!is_darbouxian(rec.type)) {
    rec.separatrix_status = SeparatrixStatus::Failed;
    rec.warning = "separatrix search skipped: umbilic is not Darbouxian";
    return;
  }
  const int expected = rec.type == UmbilicType::D1 ? 1 : rec.type == UmbilicType::D2 ? 2 : 3;
  const double r0 = opts.radius * s.diameter;
  const detail::Local L{s, rec.monge, r0, opts.horizon * r0, opts.hit_fraction * r0};
  const int M = opts.scan;
  bool all_match = true;

  for (int f = 0; f < 2; ++f) {
    const FoliationId fol = static_cast<FoliationId>(f);
    std::vector<detail::Fate> fates;
    try {
      fates = parallel_map(static_cast<std::size_t>(M),
                           [&](std::size_t i) { return detail::fate(L, fol, 2 * pi * static_cast<double>(i) / M); });
    } catch (const Error& e) {
      rec.separatrix_status = SeparatrixStatus::Failed;
      rec.warning = std::string("separatrix scan failed: ") + e.what();
      rec.separatrices = {};
      return;
    }
    const std::vector<double> rays = detail::radial_rays(L, fol);

    // hit arcs: launch angles whose line reaches the umbilic, edges bisected
    auto hit = [](const detail::Fate& x) { return x.hits > 0; };
    struct Edge {
      double angle;
      bool rising;
    };
    std::vector<Edge> edges;
    for (int i = 0; i < M; ++i) {
      const detail::Fate& a = fates[static_cast<std::size_t>(i)];
      const detail::Fate& b = fates[static_cast<std::size_t>((i + 1) % M)];
      if (hit(a) == hit(b)) continue;
      double lo = 2 * pi * i / M, hi = 2 * pi * (i + 1) / M;
      for (int it = 0; it < opts.bisect; ++it) {
        const double mid = 0.5 * (lo + hi);
        (hit(detail::fate(L, fol, mid)) == hit(a) ? lo : hi) = mid;
      }
      edges.push_back({detail::wrap2pi(0.5 * (lo + hi)), hit(b)});
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& l, const Edge& r) { return l.angle < r.angle; });
    std::vector<std::pair<double, double>> arcs;  // (start, width)
    const bool all_hit = std::all_of(fates.begin(), fates.end(), hit);
    if (all_hit) arcs.emplace_back(0.0, 2 * pi);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (!edges[i].rising) continue;
      const Edge& e = edges[(i + 1) % edges.size()];
      arcs.emplace_back(edges[i].angle, detail::wrap2pi(e.angle - edges[i].angle));
    }

    std::vector<double> found;
    for (double r : rays) {
      std::optional<std::pair<double, double>> arc;
      for (const auto& a : arcs)
        if (detail::in_arc(r, a.first, a.second)) arc = a;
      bool sep = false;
      if (arc) {
        // a wide arc holding several rays is a parabolic sector: only the
        // rays next to its edges bound it
        std::vector<double> inside;
        for (double q : rays)
          if (detail::in_arc(q, arc->first, arc->second)) inside.push_back(detail::wrap2pi(q - arc->first));
        std::sort(inside.begin(), inside.end());
        const double off = detail::wrap2pi(r - arc->first);
        sep = inside.size() == 1 || off == inside.front() || off == inside.back();
      } else {
        // hit window narrower than the scan grid: look closely around the ray
        const int nf = opts.fine;
        const double half = opts.fine_window;
        detail::Fate prev = detail::fate(L, fol, r - half);
        for (int i = 1; i <= nf && !sep; ++i) {
          const detail::Fate cur = detail::fate(L, fol, r - half + 2 * half * i / nf);
          sep = hit(cur) || detail::fate_changed(prev, cur, opts.jump);
          prev = cur;
        }
      }
      if (sep) found.push_back(r);
    }
    std::sort(found.begin(), found.end());
    const bool match = static_cast<int>(found.size()) == expected;
    all_match = all_match && match;
    for (double a : found) rec.separatrices[static_cast<std::size_t>(f)].push_back({a, match ? 1.0 : 0.5});
  }
  rec.separatrix_status = all_match ? SeparatrixStatus::Converged : SeparatrixStatus::LowConfidence;
  if (!all_match) rec.warning = "separatrix count differs from the type subscript";
}

struct Connection {
  int from = -1, to = -1;
  FoliationId foliation = FoliationId::Minimal;
  double arrival_misalignment = 0.0;  // rad, arrival angle vs the target's separatrix
  double length = 0.0;
};

struct ConnectionScan {
  std::vector<Connection> connections;
  struct Undetermined {
    int umbilic;
    FoliationId foliation;
    double angle;
    Termination termination;
  };
  std::vector<Undetermined> undetermined;
  std::vector<Trajectory> separatrix_traces;
};

struct ConnectionOptions {
  TraceOptions trace;  // umbilics and stop rule are filled in by the scan
  double angle_tol = 0.5 * pi / 180;
  double start_radius = 1e-3;  // relative to the diameter
  // a separatrix only ends at an umbilic once it is this close, in units of
  // the exclusion radius; lines that merely pass through the ball go on
  double capture_fraction = 0.01;
  bool keep_traces = false;
};

/// Traces every separatrix outward; a connection is recorded when it enters
/// another umbilic's exclusion ball along one of that umbilic's separatrix
/// directions of the same foliation (or returns to its own umbilic).
inline ConnectionScan separatrix_connection_scan(const ImplicitSurface& s, const std::vector<UmbilicRecord>& ums,
                                                 const ConnectionOptions& opts = {}) {
  ConnectionScan out;
  struct Job {
    int u;
    FoliationId f;
    double angle;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < ums.size(); ++i)
    for (int f = 0; f < 2; ++f)
      for (const auto& sp : ums[i].separatrices[static_cast<std::size_t>(f)])
        jobs.push_back({static_cast<int>(i), static_cast<FoliationId>(f), sp.angle});

  const double D = s.diameter;
  const double excl = opts.trace.umbilic_exclusion * D;
  auto traces = parallel_map(jobs.size(), [&](std::size_t k) {
    const Job& jb = jobs[k];
    const UmbilicRecord& src = ums[static_cast<std::size_t>(jb.u)];
    const double r = opts.start_radius * D;
    const Vec3 p = s.project(src.monge.point(r * std::cos(jb.angle), r * std::sin(jb.angle)));
    TraceOptions o = opts.trace;
    o.detect_closure = false;
    o.umbilics.clear();
    o.initial_direction = src.monge.tangent(jb.angle);
    const Vec3 home = src.point;
    const double cap = opts.capture_fraction * excl;
    o.stop = [&ums, home, excl, cap, r](const Vec3& a, const Vec3& q, double arc) -> std::optional<Termination> {
      for (const auto& u : ums) {
        const double d = detail::segment_distance(a, q, u.point);
        const bool is_home = (u.point - home).norm() == 0.0;
        if (d < cap && (!is_home || arc > 4 * r + excl)) return Termination::HitUmbilic;
      }
      return std::nullopt;
    };
    return trace(s, p, jb.f, o);
  });

  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const Job& jb = jobs[k];
    const Trajectory& t = traces[k];
    bool connected = false;
    if (t.termination == Termination::HitUmbilic) {
      int target = -1;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < ums.size(); ++j) {
        const double d = (t.end() - ums[j].point).norm();
        if (d < best) {
          best = d;
          target = static_cast<int>(j);
        }
      }
      const UmbilicRecord& dst = ums[static_cast<std::size_t>(target)];
      const Vec3 rel = t.end() - dst.point;
      const double arr = std::atan2(rel.dot(dst.monge.e2), rel.dot(dst.monge.e1));
      double mis = std::numeric_limits<double>::infinity();
      for (const auto& sp : dst.separatrices[static_cast<std::size_t>(jb.f)])
        mis = std::min(mis, detail::circ_dist(arr, sp.angle));
      if (mis <= opts.angle_tol) {
        connected = true;
        const int a = std::min(jb.u, target), b = std::max(jb.u, target);
        const bool dup = std::any_of(out.connections.begin(), out.connections.end(), [&](const Connection& c) {
          return c.from == a && c.to == b && c.foliation == jb.f;
        });
        if (!dup) out.connections.push_back({a, b, jb.f, mis, t.length});
      }
    }
    if (!connected)
      out.undetermined.push_back({jb.u, jb.f, jb.angle, t.termination});
    if (opts.keep_traces) out.separatrix_traces.push_back(t);
  }
  std::sort(out.connections.begin(), out.connections.end(), [](const Connection& l, const Connection& r) {
    return std::tie(l.from, l.to, l.foliation) < std::tie(r.from, r.to, r.foliation);
  });
  return out;
}

}  // namespace principal
