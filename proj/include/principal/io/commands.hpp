#pragma once

// The CLI commands as library functions: each takes a RunConfig and returns
// the report plus the text artifacts. Nothing here touches the filesystem.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <utility>
#include <string>
#include <vector>

#include "principal/catalog/registry.hpp"
#include "principal/catalog/rotation.hpp"
#include "principal/catalog/stability.hpp"
#include "principal/catalog/strata.hpp"
#include "principal/cycles.hpp"
#include "principal/io/config.hpp"
#include "principal/io/csv.hpp"
#include "principal/io/report.hpp"
#include "principal/io/svg.hpp"
#include "principal/separatrices.hpp"
#include "principal/umbilics.hpp"

namespace principal::io {

struct CommandOutput {
  ReportDocument report;
  std::string svg;  // empty when not produced
  std::string csv;
  std::string summary;  // one line for the terminal
};

namespace detail {

inline const std::set<std::string> kCommonKeys = {"surface", "seed", "svg", "csv", "view", "timing", "threads"};

inline void check_keys(const RunConfig& cfg, const std::set<std::string>& own) {
  for (const auto& [k, v] : cfg.values)
    if (!kCommonKeys.count(k) && !own.count(k)) throw ConfigError(cfg.command + ": unknown key '" + k + "'");
}

inline std::string surface_text(const RunConfig& cfg) {
  if (!cfg.has("surface")) throw ConfigError(cfg.command + ": missing 'surface'");
  return cfg.str("surface");
}

inline ImplicitSurface surface(const RunConfig& cfg) { return catalog::make_surface(surface_text(cfg), cfg.seed()); }

inline ReportDocument start_report(const RunConfig& cfg) {
  ReportDocument d;
  d.command = cfg.command;
  d.config = cfg.values;
  d.config.erase("threads");  // a resource knob, not an input
  d.config.erase("timing");
  d.seed = cfg.seed();
  return d;
}

inline std::vector<FoliationId> foliations(const RunConfig& cfg) {
  const std::string f = cfg.str("foliation", "both");
  if (f == "both") return {FoliationId::Minimal, FoliationId::Maximal};
  if (f == "minimal") return {FoliationId::Minimal};
  if (f == "maximal") return {FoliationId::Maximal};
  throw ConfigError("foliation: expected minimal, maximal or both");
}

inline TraceOptions trace_options(const RunConfig& cfg, double default_length) {
  TraceOptions t;
  t.max_length = cfg.positive("length", default_length);
  t.rtol = cfg.positive("rtol", t.rtol);
  t.max_step = cfg.positive("max_step", t.max_step);
  t.umbilic_exclusion = cfg.positive("exclusion", t.umbilic_exclusion);
  t.detect_closure = cfg.flag("closure", true);
  return t;
}

inline std::vector<Vec3> points_of(const std::vector<UmbilicRecord>& ums) {
  std::vector<Vec3> out;
  for (const auto& u : ums) out.push_back(u.point);
  return out;
}

inline std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

/// First crossing of the surface along origin + t dir, t in (0, reach].
inline Vec3 ray_hit(const ImplicitSurface& s, const Vec3& origin, const Vec3& dir, double reach) {
  auto f = [&](double t) { return s.value(origin + t * dir) - s.level; };
  const int n = 400;
  double a = 0.0, fa = f(0.0);  // may be NaN at a singular origin
  for (int i = 1; i <= n; ++i) {
    double b = reach * i / n;
    const double fb = f(b);
    if (std::isfinite(fa) && std::isfinite(fb) && (fa < 0) != (fb < 0)) {
      for (int k = 0; k < 80; ++k) {
        const double m = 0.5 * (a + b), fm = f(m);
        if ((fa < 0) == (fm < 0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      return s.project(origin + 0.5 * (a + b) * dir);
    }
    a = b;
    fa = fb;
  }
  throw ParamError("seed ray does not meet the surface");
}

inline std::string artifact_svg(const RunConfig& cfg, const std::vector<Stroke>& scene,
                                const std::vector<UmbilicRecord>& ums, const ImplicitSurface* s) {
  if (!cfg.flag("svg", true)) return {};
  return render_svg(scene, ums, view_from(cfg.str("view")), s);
}

inline std::string artifact_csv(const RunConfig& cfg, const std::vector<Trajectory>& ts) {
  return cfg.flag("csv", true) ? polylines_csv(ts) : std::string{};
}

template <class F>
CommandOutput timed(const RunConfig& cfg, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  CommandOutput out = body();
  if (cfg.flag("timing"))
    out.report.timing_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

inline double index_sum(const std::vector<UmbilicRecord>& ums) {
  double s = 0;
  for (const auto& u : ums) s += u.index;
  return s;
}

inline UmbilicOptions umbilic_options(const RunConfig& cfg) {
  UmbilicOptions o;
  o.locate.grid = cfg.count("grid", o.locate.grid, 4);
  o.locate.max_grid = cfg.count("max_grid", std::max(o.locate.max_grid, o.locate.grid), o.locate.grid);
  return o;
}

}  // namespace detail

/// Locates and classifies umbilics; optionally traces their separatrices
/// and a few ordinary lines for the picture.
inline CommandOutput cmd_umbilics(const RunConfig& cfg) {
  detail::check_keys(cfg, {"grid", "max_grid", "separatrices", "connection_length", "lines", "line_length"});
  return detail::timed(cfg, [&] {
    CommandOutput out;
    const auto s = detail::surface(cfg);
    auto& rep = out.report = detail::start_report(cfg);
    rep.surface = surface_json(s, detail::surface_text(cfg));
    auto found = find_umbilics(s, detail::umbilic_options(cfg));

    std::vector<Stroke> scene;
    std::vector<Trajectory> lines;
    if (!found.all_umbilic) {
      if (cfg.flag("separatrices", true) && !found.umbilics.empty()) {
        for (auto& u : found.umbilics) separatrix_directions(s, u);
        ConnectionOptions co;
        co.trace.max_length = cfg.positive("connection_length", 10.0);
        co.keep_traces = true;
        const auto scan = separatrix_connection_scan(s, found.umbilics, co);
        for (const auto& c : scan.connections) rep.connections.push_back(connection_json(c));
        for (auto& st : strokes(scan.separatrix_traces, true)) scene.push_back(std::move(st));
      }
      const int n = cfg.count("lines", 6);
      TraceOptions t;
      t.max_length = cfg.positive("line_length", 3.0);
      t.umbilics = detail::points_of(found.umbilics);
      const auto seeds = catalog::detail::ensemble_seeds(s, t.umbilics, n, cfg.seed());
      lines = parallel_map(2 * seeds.size(), [&](std::size_t k) {
        return trace(s, seeds[k / 2], static_cast<FoliationId>(k % 2), t);
      });
      for (auto& st : strokes(lines)) scene.push_back(std::move(st));
    }

    for (std::size_t i = 0; i < found.umbilics.size(); ++i) rep.umbilics.push_back(umbilic_json(found.umbilics[i], i));
    const double isum = detail::index_sum(found.umbilics);
    rep.summary = json{{"count", found.umbilics.size()}, {"index_sum", num(isum)}, {"all_umbilic", found.all_umbilic},
                       {"connections", rep.connections.size()}};
    if (found.all_umbilic) rep.summary["marker"] = "AllUmbilicSurface";
    out.svg = detail::artifact_svg(cfg, scene, found.umbilics, &s);
    out.csv = detail::artifact_csv(cfg, lines);
    out.summary = found.all_umbilic ? "AllUmbilicSurface"
                                    : std::to_string(found.umbilics.size()) + " umbilics, index sum " +
                                          detail::fmt("%.6g", isum) + ", " + std::to_string(rep.connections.size()) +
                                          " separatrix connections";
    return out;
  });
}

/// Traces principal lines from `start` (x,y,z) or from `seeds` sampled points.
inline CommandOutput cmd_trace(const RunConfig& cfg) {
  detail::check_keys(cfg, {"start", "seeds", "foliation", "length", "rtol", "max_step", "exclusion", "closure",
                           "avoid_umbilics"});
  return detail::timed(cfg, [&] {
    CommandOutput out;
    const auto s = detail::surface(cfg);
    auto& rep = out.report = detail::start_report(cfg);
    rep.surface = surface_json(s, detail::surface_text(cfg));
    TraceOptions t = detail::trace_options(cfg, 50.0);
    std::vector<UmbilicRecord> ums;
    if (cfg.flag("avoid_umbilics", true)) {
      const auto found = find_umbilics(s);
      if (found.all_umbilic) throw ConfigError("trace: the surface is totally umbilic, there are no principal lines");
      ums = found.umbilics;
    }
    t.umbilics = detail::points_of(ums);
    std::vector<Vec3> seeds;
    if (cfg.has("start")) seeds.push_back(s.project(cfg.point("start")));
    for (const auto& q : catalog::detail::ensemble_seeds(s, t.umbilics, cfg.count("seeds", cfg.has("start") ? 0 : 4),
                                                         cfg.seed()))
      seeds.push_back(q);
    if (seeds.empty()) throw ConfigError("trace: no seeds (give start or seeds > 0)");
    const auto fols = detail::foliations(cfg);
    const auto lines = parallel_map(seeds.size() * fols.size(), [&](std::size_t k) {
      return trace(s, seeds[k / fols.size()], fols[k % fols.size()], t);
    });
    int closed = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      rep.trajectories.push_back(trajectory_json(lines[i], i));
      closed += lines[i].termination == Termination::Closed;
    }
    for (std::size_t i = 0; i < ums.size(); ++i) rep.umbilics.push_back(umbilic_json(ums[i], i));
    rep.summary = json{{"lines", lines.size()}, {"closed", closed}};
    out.svg = detail::artifact_svg(cfg, strokes(lines), ums, &s);
    out.csv = detail::artifact_csv(cfg, lines);
    out.summary = std::to_string(lines.size()) + " lines traced, " + std::to_string(closed) + " closed";
    return out;
  });
}

/// Principal cycles refined from traced lines, with hyperbolicity.
inline CommandOutput cmd_cycles(const RunConfig& cfg) {
  detail::check_keys(cfg, {"start", "seeds", "foliation", "length", "max_cycles", "max_recenter", "exclusion"});
  return detail::timed(cfg, [&] {
    CommandOutput out;
    const auto s = detail::surface(cfg);
    auto& rep = out.report = detail::start_report(cfg);
    rep.surface = surface_json(s, detail::surface_text(cfg));
    const auto found = find_umbilics(s);
    if (found.all_umbilic) throw ConfigError("cycles: the surface is totally umbilic");
    TraceOptions t;
    t.max_length = cfg.positive("length", 20.0);
    t.umbilic_exclusion = cfg.positive("exclusion", t.umbilic_exclusion);
    t.umbilics = detail::points_of(found.umbilics);
    std::vector<Vec3> seeds;
    if (cfg.has("start")) seeds.push_back(s.project(cfg.point("start")));
    for (const auto& q : catalog::detail::ensemble_seeds(s, t.umbilics, cfg.count("seeds", 4), cfg.seed()))
      seeds.push_back(q);
    if (seeds.empty()) throw ConfigError("cycles: no seeds (give start or seeds > 0)");
    const auto fols = detail::foliations(cfg);
    const auto lines = parallel_map(seeds.size() * fols.size(), [&](std::size_t k) {
      return trace(s, seeds[k / fols.size()], fols[k % fols.size()], t);
    });
    CycleOptions co;
    co.max_recenter = cfg.count("max_recenter", 4);
    const int cap = cfg.count("max_cycles", 8, 1);
    std::vector<PrincipalCycle> cycles;
    for (auto f : fols)
      for (auto& c : catalog::cycles_from_traces(s, lines, f, co, cap)) cycles.push_back(std::move(c));
    std::vector<Trajectory> loops;
    int hyperbolic = 0;
    for (std::size_t i = 0; i < cycles.size(); ++i) {
      rep.cycles.push_back(cycle_json(cycles[i], i));
      hyperbolic += cycles[i].hyperbolic;
      loops.push_back(cycles[i].curve);
    }
    for (std::size_t i = 0; i < found.umbilics.size(); ++i)
      rep.umbilics.push_back(umbilic_json(found.umbilics[i], i));
    rep.summary = json{{"cycles", cycles.size()}, {"hyperbolic", hyperbolic}};
    auto scene = strokes(lines);
    for (auto& st : strokes(loops, true)) scene.push_back(std::move(st));
    out.svg = detail::artifact_svg(cfg, scene, found.umbilics, &s);
    out.csv = detail::artifact_csv(cfg, loops);
    out.summary = std::to_string(cycles.size()) + " cycles, " + std::to_string(hyperbolic) + " hyperbolic";
    return out;
  });
}

/// Second-return rotation on the equator (z = 0) or on the meridian half
/// plane y = 0, x > 0 around the circle of radius `radius`. With `rho` set
/// (S_rho only) it tabulates the rotation over the listed rho values.
inline CommandOutput cmd_rotation(const RunConfig& cfg) {
  detail::check_keys(cfg, {"section", "radius", "seeds", "returns", "symmetry", "foliation", "rho", "rtol",
                           "svg_length"});
  return detail::timed(cfg, [&] {
    CommandOutput out;
    auto& rep = out.report = detail::start_report(cfg);
    const auto spec = catalog::parse_surface_spec(detail::surface_text(cfg));
    const bool symmetric = spec.name == "E_theta" || spec.name == "S_rho";
    catalog::RotationOptions ro;
    ro.returns = cfg.count("returns", ro.returns, 2);
    ro.symmetry = cfg.count("symmetry", symmetric ? 2 : 1, 1);
    ro.trace.rtol = cfg.positive("rtol", ro.trace.rtol);
    const int nseeds = cfg.count("seeds", 6, 1);
    if (cfg.has("foliation")) {
      const auto f = detail::foliations(cfg);
      if (f.size() != 1) throw ConfigError("rotation: foliation must be minimal or maximal");
      ro.foliation = f[0];
    }

    if (cfg.has("rho")) {
      if (spec.name != "S_rho") throw ConfigError("rotation: rho sweeps need an S_rho surface");
      const double a = spec.params.size() > 1 ? spec.params[1] : 3.0, b = spec.params.size() > 2 ? spec.params[2] : 2.0;
      const auto rows = catalog::s_rho_sweep(cfg.list("rho"), a, b, nseeds, ro);
      int ok = 0;
      for (const auto& r : rows) {
        rep.rotation.push_back(rotation_row_json(r));
        ok += r.status == "ok";
      }
      rep.surface = json{{"spec", detail::surface_text(cfg)}, {"name", "S_rho"}};
      rep.summary = json{{"rows", rows.size()}, {"ok", ok}};
      out.summary = std::to_string(rows.size()) + " rho values, " + std::to_string(ok) + " estimated";
      return out;
    }

    const auto s = catalog::make_surface(spec, cfg.seed());
    rep.surface = surface_json(s, detail::surface_text(cfg));
    const std::string which = cfg.str("section", "equator");
    Section sec;
    std::vector<Vec3> seeds;
    if (which == "equator") {
      sec = equator_section();
      for (int i = 0; i < nseeds; ++i) {
        const double lon = 2 * pi * (i + 0.5) / nseeds;
        seeds.push_back(detail::ray_hit(s, Vec3::Zero(), Vec3(std::cos(lon), std::sin(lon), 0), s.diameter));
      }
    } else if (which == "meridian") {
      const bool toroidal = spec.name == "torus" || spec.name == "perturbed_torus";
      const double R = cfg.positive("radius", toroidal && !spec.params.empty() ? spec.params[0] : 2.0);
      sec = meridian_section(R);
      for (int i = 0; i < nseeds; ++i) {
        const double a = 2 * pi * (i + 0.5) / nseeds;
        seeds.push_back(detail::ray_hit(s, Vec3(R, 0, 0), Vec3(std::cos(a), 0, std::sin(a)), s.diameter));
      }
    } else {
      throw ConfigError("section: expected equator or meridian");
    }
    const auto est = catalog::rotation_estimate(s, sec, seeds, ro);
    rep.rotation.push_back(rotation_json(est));
    rep.summary = json{{"mean", num(est.mean)}, {"dispersion", num(est.dispersion)}, {"crossings", est.crossings}};

    TraceOptions t;
    t.max_length = cfg.positive("svg_length", 3.0);
    t.detect_closure = false;
    const auto lines = parallel_map(seeds.size(), [&](std::size_t k) { return trace(s, seeds[k], est.foliation, t); });
    out.svg = detail::artifact_svg(cfg, strokes(lines), {}, &s);
    out.csv = detail::artifact_csv(cfg, lines);
    out.summary = "rotation " + detail::fmt("%.6f", est.mean) + " rad (dispersion " +
                  detail::fmt("%.2e", est.dispersion) + ", " + std::to_string(est.crossings) + " crossings)";
    return out;
  });
}

/// Stratum of a quadric given as diag:... or sym:...
inline CommandOutput cmd_strata(const RunConfig& cfg) {
  detail::check_keys(cfg, {"quadric", "tol"});
  return detail::timed(cfg, [&] {
    CommandOutput out;
    auto& rep = out.report = detail::start_report(cfg);
    if (!cfg.has("quadric")) throw ConfigError("strata: missing 'quadric'");
    const auto st = catalog::quadric_stratum(catalog::parse_quadric(cfg.str("quadric")), cfg.positive("tol", 1e-8));
    rep.strata = stratum_json(st);
    rep.summary = json{{"tag", catalog::to_string(st.tag)}};
    out.summary = std::string(catalog::to_string(st.tag)) + " (margin " + detail::fmt("%.3g", st.margin) + ")";
    return out;
  });
}

/// Audit of the four structural-stability conditions.
inline CommandOutput cmd_stability(const RunConfig& cfg) {
  detail::check_keys(cfg, {"seeds", "start", "trace_length", "connection_length", "max_cycles", "exclusion",
                           "min_returns"});
  return detail::timed(cfg, [&] {
    CommandOutput out;
    const auto s = detail::surface(cfg);
    auto& rep = out.report = detail::start_report(cfg);
    rep.surface = surface_json(s, detail::surface_text(cfg));
    catalog::StabilityBudget b;
    b.seeds = cfg.count("seeds", b.seeds);
    if (cfg.has("start")) b.seed_points.push_back(s.project(cfg.point("start")));
    b.trace_length = cfg.positive("trace_length", b.trace_length);
    b.connection_length = cfg.positive("connection_length", b.connection_length);
    b.max_cycles = cfg.count("max_cycles", b.max_cycles, 1);
    b.umbilic_exclusion = cfg.positive("exclusion", b.umbilic_exclusion);
    b.omega.min_returns = cfg.count("min_returns", b.omega.min_returns, 1);
    b.sequence_offset = cfg.seed();
    b.keep_traces = true;
    const auto r = catalog::stability_report(s, b);

    for (std::size_t i = 0; i < r.umbilics.umbilics.size(); ++i)
      rep.umbilics.push_back(umbilic_json(r.umbilics.umbilics[i], i));
    for (const auto& c : r.connections.connections) rep.connections.push_back(connection_json(c));
    std::vector<Trajectory> loops;
    for (std::size_t i = 0; i < r.cycles.size(); ++i) {
      rep.cycles.push_back(cycle_json(r.cycles[i], i));
      loops.push_back(r.cycles[i].curve);
    }
    for (std::size_t i = 0; i < r.traces.size(); ++i) rep.trajectories.push_back(trajectory_json(r.traces[i], i));
    rep.stability = stability_json(r);
    rep.summary = json{{"overall", catalog::to_string(r.overall)}, {"witnesses", r.witnesses.size()}};

    auto scene = strokes(r.traces);
    for (auto& st : strokes(r.connections.separatrix_traces, true)) scene.push_back(std::move(st));
    for (auto& st : strokes(loops, true)) scene.push_back(std::move(st));
    out.svg = detail::artifact_svg(cfg, scene, r.umbilics.umbilics, &s);
    out.csv = detail::artifact_csv(cfg, r.traces);
    std::string failed;
    const std::pair<char, const catalog::ConditionReport*> conds[] = {{'a', &r.a}, {'b', &r.b}, {'c', &r.c}, {'d', &r.d}};
    for (const auto& [tag, c] : conds)
      if (c->verdict == catalog::ConditionVerdict::Fail) failed += failed.empty() ? std::string(1, tag) : std::string(",") + tag;
    rep.summary["failed_conditions"] = failed;
    out.summary = std::string(catalog::to_string(r.overall));
    if (!failed.empty()) out.summary += "(condition " + failed + ")";
    if (!r.witnesses.empty()) out.summary += ": " + r.witnesses.front();
    return out;
  });
}

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"umbilics", "trace", "cycles", "rotation", "strata", "stability"};
  return names;
}

inline CommandOutput run_command(const RunConfig& cfg) {
  if (cfg.command == "umbilics") return cmd_umbilics(cfg);
  if (cfg.command == "trace") return cmd_trace(cfg);
  if (cfg.command == "cycles") return cmd_cycles(cfg);
  if (cfg.command == "rotation") return cmd_rotation(cfg);
  if (cfg.command == "strata") return cmd_strata(cfg);
  if (cfg.command == "stability") return cmd_stability(cfg);
  throw ConfigError("unknown command '" + cfg.command + "'");
}

}  // namespace principal::io
