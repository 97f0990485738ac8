#pragma once

// Numerical audit of the four structural-stability conditions: Darbouxian
// umbilics, hyperbolic cycles, no umbilic connections, and no recurrent
// limit sets. Each condition yields a verdict with concrete witnesses.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <future>
#include <string>
#include <vector>

#include "principal/cycles.hpp"
#include "principal/foliation.hpp"
#include "principal/parallel.hpp"
#include "principal/separatrices.hpp"
#include "principal/umbilics.hpp"

namespace principal::catalog {

enum class ConditionVerdict { Pass, Fail, Inconclusive };
enum class OverallVerdict { PassEvidence, FailWitness, Inconclusive };

inline const char* to_string(ConditionVerdict v) {
  switch (v) {
    case ConditionVerdict::Pass: return "Pass";
    case ConditionVerdict::Fail: return "Fail";
    case ConditionVerdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

inline const char* to_string(OverallVerdict v) {
  switch (v) {
    case OverallVerdict::PassEvidence: return "PassEvidence";
    case OverallVerdict::FailWitness: return "FailWitness";
    case OverallVerdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

struct ConditionReport {
  ConditionVerdict verdict = ConditionVerdict::Pass;
  std::string summary;
  std::vector<std::string> witnesses;  // concrete counterexamples
  std::vector<std::string> detail;
};

struct StabilityBudget {
  UmbilicOptions umbilics;
  int seeds = 8;                   // ensemble size per foliation
  std::vector<Vec3> seed_points;   // traced first, before the sampled ensemble
  double trace_length = 300.0;     // relative to the diameter
  double connection_length = 10.0; // relative to the diameter
  // a dense line passes arbitrarily close to umbilics, so the ensemble uses
  // a far smaller exclusion ball than single traces do
  double umbilic_exclusion = 1e-5;
  int max_cycles = 8;              // per foliation, after deduplication
  CycleOptions cycles = [] {
    CycleOptions c;
    c.max_recenter = 4;
    return c;
  }();
  OmegaOptions omega;
  std::uint64_t sequence_offset = 0;  // shifts the seed sequence (the run's random seed)
  bool keep_traces = false;           // keep separatrix traces and the ensemble for rendering
};

struct StabilityReport {
  ConditionReport a, b, c, d;
  OverallVerdict overall = OverallVerdict::Inconclusive;
  std::vector<std::string> witnesses;  // "(x) ..." for every failing condition
  std::string caveat;
  UmbilicSearch umbilics;
  std::vector<PrincipalCycle> cycles;
  ConnectionScan connections;
  std::vector<Vec3> seeds;
  std::vector<OmegaVerdict> omega;  // per seed, minimal foliation first
  std::vector<Trajectory> traces;    // the ensemble, when keep_traces
};

namespace detail {

inline std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

inline std::string fmt_point(const Vec3& p) { return fmt("(%.6f, %.6f, %.6f)", p.x(), p.y(), p.z()); }

// additive recurrence (plastic-number ratios) over the sampler square
inline std::vector<Vec3> ensemble_seeds(const ImplicitSurface& s, const std::vector<Vec3>& umbilics, int n,
                                        std::uint64_t offset = 0) {
  std::vector<Vec3> out;
  const double g1 = 0.7548776662466927, g2 = 0.5698402909980532;
  const double keep = 0.05 * s.diameter;
  for (int i = 0; out.size() < static_cast<std::size_t>(n) && i < 50 * n; ++i) {
    const double k = static_cast<double>(offset % 1000003) + i + 1;
    const double u = std::fmod(0.5 + g1 * k, 1.0), v = std::fmod(0.5 + g2 * k, 1.0);
    Vec3 p;
    try {
      p = s.project(s.sampler.point(u, v));
    } catch (const Error&) {
      continue;
    }
    bool near = false;
    for (const auto& q : umbilics) near = near || (q - p).norm() < keep;
    if (near || !implicit_principal_data(s, p).directions_defined) continue;
    out.push_back(p);
  }
  return out;
}

}  // namespace detail

/// Cycle candidates from traced lines: closed ones give their start, the
/// others a late point (a limit cycle, if any, is closest there).
inline std::vector<PrincipalCycle> cycles_from_traces(const ImplicitSurface& s, const std::vector<Trajectory>& traces,
                                                      FoliationId fol, const CycleOptions& opts, int max_cycles) {
  std::vector<Vec3> cand;
  for (const auto& t : traces) {
    if (t.foliation != fol || t.points.size() < 2) continue;
    cand.push_back(t.termination == Termination::Closed ? t.start() : t.points[t.points.size() * 97 / 100]);
  }
  auto cs = find_cycles(s, cand, fol, opts);
  if (cs.size() > static_cast<std::size_t>(max_cycles)) cs.resize(static_cast<std::size_t>(max_cycles));
  return cs;
}

/// Condition (a).
inline ConditionReport umbilic_condition(const UmbilicSearch& found) {
  ConditionReport r;
  if (found.all_umbilic) {
    r.verdict = ConditionVerdict::Fail;
    r.witnesses.push_back("every sampled point is umbilic; no principal foliation exists");
    r.summary = "surface is totally umbilic";
    return r;
  }
  int bad = 0, border = 0;
  for (std::size_t i = 0; i < found.umbilics.size(); ++i) {
    const auto& u = found.umbilics[i];
    r.detail.push_back(detail::fmt("u%zu %s margin %.3g at %s", i, to_string(u.type), u.margin,
                                   detail::fmt_point(u.point).c_str()));
    if (u.type == UmbilicType::NonTransversal) {
      ++bad;
      r.witnesses.push_back(detail::fmt("u%zu is not Darbouxian (transversality fails) at %s", i,
                                        detail::fmt_point(u.point).c_str()));
    } else if (u.type == UmbilicType::NearBoundary) {
      ++border;
    }
  }
  if (bad > 0) {
    r.verdict = ConditionVerdict::Fail;
  } else if (border > 0) {
    r.verdict = ConditionVerdict::Inconclusive;
  }
  r.summary = detail::fmt("%zu umbilics, %d non-Darbouxian, %d near a type boundary", found.umbilics.size(), bad,
                          border);
  return r;
}

/// Condition (b) from the cycles that were found.
inline ConditionReport cycle_condition(const std::vector<PrincipalCycle>& cycles) {
  ConditionReport r;
  int weak = 0, undetermined = 0;
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    const auto& c = cycles[i];
    r.detail.push_back(detail::fmt("cycle %zu (%s) length %.6g T' %.9g %s", i, to_string(c.foliation),
                                   c.period_length, c.tprime_fd, to_string(c.verdict)));
    if (c.verdict == Hyperbolicity::NearUnity) {
      ++weak;
      r.witnesses.push_back(detail::fmt("cycle %zu through %s has T' = %.9g (not hyperbolic)", i,
                                        detail::fmt_point(c.section.anchor).c_str(), c.tprime_fd));
    } else if (c.verdict == Hyperbolicity::Undetermined) {
      ++undetermined;
    }
  }
  if (weak > 0)
    r.verdict = ConditionVerdict::Fail;
  else if (undetermined > 0)
    r.verdict = ConditionVerdict::Inconclusive;
  r.summary = cycles.empty() ? "no cycles found from the seed ensemble"
                             : detail::fmt("%zu cycles, %d non-hyperbolic, %d undetermined", cycles.size(), weak,
                                           undetermined);
  return r;
}

/// Condition (c).
inline ConditionReport connection_condition(const ConnectionScan& scan) {
  ConditionReport r;
  for (const auto& c : scan.connections)
    r.witnesses.push_back(detail::fmt("%s separatrix connects u%d to u%d (length %.6g)", to_string(c.foliation),
                                      c.from, c.to, c.length));
  for (const auto& u : scan.undetermined)
    r.detail.push_back(detail::fmt("u%d %s separatrix at %.4f rad: %s", u.umbilic, to_string(u.foliation), u.angle,
                                   to_string(u.termination)));
  if (!scan.connections.empty()) r.verdict = ConditionVerdict::Fail;
  r.summary = detail::fmt("%zu connections, %zu separatrices unresolved within budget", scan.connections.size(),
                          scan.undetermined.size());
  return r;
}

/// Condition (d): recurrence with enough non-drifting returns is a witness;
/// anything short of that is no counterexample.
inline ConditionReport limit_set_condition(const std::vector<Vec3>& seeds, const std::vector<OmegaVerdict>& omega,
                                           int min_returns) {
  ConditionReport r;
  int counts[4] = {0, 0, 0, 0};  // umbilic, cycle, spiral, undetermined
  for (std::size_t i = 0; i < omega.size(); ++i) {
    const auto& v = omega[i];
    const Vec3& p = seeds[i % seeds.size()];
    const char* fol = i < seeds.size() ? "minimal" : "maximal";
    if (v.recurrent(min_returns)) {
      r.witnesses.push_back(detail::fmt("%s line from %s returns %d times, closest late return %.3g", fol,
                                        detail::fmt_point(p).c_str(), v.eps_returns, v.min_return_gap));
    } else if (v.kind == OmegaLimit::Umbilic) {
      ++counts[0];
    } else if (v.kind == OmegaLimit::Cycle) {
      ++counts[1];
    } else if (v.drifting) {
      ++counts[2];
    } else {
      ++counts[3];
    }
    r.detail.push_back(detail::fmt("%s from %s: %s, %d returns", fol, detail::fmt_point(p).c_str(),
                                   to_string(v.kind), v.eps_returns));
  }
  if (!r.witnesses.empty()) r.verdict = ConditionVerdict::Fail;
  if (omega.empty()) r.verdict = ConditionVerdict::Inconclusive;
  r.summary = detail::fmt("%zu recurrent, %d umbilic, %d cycle, %d slow spiral, %d undetermined", r.witnesses.size(),
                          counts[0], counts[1], counts[2], counts[3]);
  return r;
}

inline StabilityReport stability_report(const ImplicitSurface& s, const StabilityBudget& budget = {}) {
  StabilityReport rep;
  rep.umbilics = find_umbilics(s, budget.umbilics);
  rep.a = umbilic_condition(rep.umbilics);

  if (rep.umbilics.all_umbilic) {
    for (ConditionReport* r : {&rep.b, &rep.c, &rep.d}) {
      r->verdict = ConditionVerdict::Inconclusive;
      r->summary = "principal foliation undefined";
    }
  } else {
    std::vector<Vec3> ums;
    for (auto& u : rep.umbilics.umbilics) {
      ums.push_back(u.point);
      separatrix_directions(s, u);
    }

    // (c) runs alongside the seed ensemble
    auto conn = std::async(std::launch::async, [&] {
      ConnectionOptions co;
      co.trace.max_length = budget.connection_length;
      co.keep_traces = budget.keep_traces;
      return separatrix_connection_scan(s, rep.umbilics.umbilics, co);
    });

    for (const auto& q : budget.seed_points) rep.seeds.push_back(s.project(q));
    for (const auto& q : detail::ensemble_seeds(s, ums, budget.seeds, budget.sequence_offset)) rep.seeds.push_back(q);
    TraceOptions to;
    to.max_length = budget.trace_length;
    to.umbilics = ums;
    to.umbilic_exclusion = budget.umbilic_exclusion;
    const std::size_t n = rep.seeds.size();
    auto traces = parallel_map(2 * n, [&](std::size_t i) {
      return trace(s, rep.seeds[i % n], static_cast<FoliationId>(i / n), to);
    });

    // (b)
    for (int f = 0; f < 2; ++f)
      for (auto& c : cycles_from_traces(s, traces, static_cast<FoliationId>(f), budget.cycles, budget.max_cycles))
        rep.cycles.push_back(std::move(c));
    rep.b = cycle_condition(rep.cycles);

    // (d)
    std::vector<std::vector<Vec3>> loops;
    for (const auto& c : rep.cycles) loops.push_back(c.curve.points);
    for (const auto& t : traces) rep.omega.push_back(omega_limit_classify(s, t, ums, loops, budget.omega));
    rep.d = limit_set_condition(rep.seeds, rep.omega, budget.omega.min_returns);
    if (budget.keep_traces) rep.traces = std::move(traces);
    if (rep.seeds.empty()) rep.d.summary = "no usable seeds";

    rep.connections = conn.get();
    rep.c = connection_condition(rep.connections);
  }

  const std::pair<const char*, const ConditionReport*> all[] = {{"a", &rep.a}, {"b", &rep.b}, {"c", &rep.c}, {"d", &rep.d}};
  bool fail = false, open = false;
  for (const auto& [tag, r] : all) {
    for (const auto& w : r->witnesses) rep.witnesses.push_back(std::string("(") + tag + ") " + w);
    fail = fail || r->verdict == ConditionVerdict::Fail;
    open = open || r->verdict == ConditionVerdict::Inconclusive;
  }
  rep.overall = fail ? OverallVerdict::FailWitness : open ? OverallVerdict::Inconclusive : OverallVerdict::PassEvidence;
  rep.caveat =
      "finite budget: cycles are only those reachable from the seed ensemble, and (d) is evidence only; "
      "no finite trace can rule out recurrence";
  return rep;
}

}  // namespace principal::catalog
