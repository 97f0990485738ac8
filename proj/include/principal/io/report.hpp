#pragma once

// Versioned JSON report written by every CLI command. Library records are
// flattened to plain JSON here; the document itself round-trips through
// text without loss.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "principal/catalog/rotation.hpp"
#include "principal/catalog/stability.hpp"
#include "principal/catalog/strata.hpp"
#include "principal/cycles.hpp"
#include "principal/io/config.hpp"
#include "principal/separatrices.hpp"
#include "principal/umbilics.hpp"

#ifndef PRINCIPAL_VERSION
#define PRINCIPAL_VERSION "0.0.0"
#endif

namespace principal::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

struct ReportDocument {
  int schema_version = kSchemaVersion;
  std::string tool_version = PRINCIPAL_VERSION;
  std::string command;
  std::map<std::string, std::string> config;
  std::uint64_t seed = 0;
  json surface = nullptr;
  json umbilics = json::array();
  json trajectories = json::array();
  json cycles = json::array();
  json connections = json::array();
  json rotation = json::array();
  json strata = nullptr;
  json stability = nullptr;
  json summary = json::object();  // command-specific totals and markers
  std::optional<double> timing_seconds;  // only when asked for: it breaks byte-identical reruns
};

inline void to_json(json& j, const ReportDocument& d) {
  j = json{{"schema_version", d.schema_version},
           {"tool_version", d.tool_version},
           {"command", d.command},
           {"config", d.config},
           {"seed", d.seed},
           {"surface", d.surface},
           {"umbilics", d.umbilics},
           {"trajectories", d.trajectories},
           {"cycles", d.cycles},
           {"connections", d.connections},
           {"rotation", d.rotation},
           {"strata", d.strata},
           {"stability", d.stability},
           {"summary", d.summary},
           {"timing_seconds", d.timing_seconds ? json(*d.timing_seconds) : json(nullptr)}};
}

inline void from_json(const json& j, ReportDocument& d) {
  d.schema_version = j.at("schema_version").get<int>();
  if (d.schema_version != kSchemaVersion)
    throw ConfigError("unsupported report schema version " + std::to_string(d.schema_version));
  d.tool_version = j.at("tool_version").get<std::string>();
  d.command = j.at("command").get<std::string>();
  d.config = j.at("config").get<std::map<std::string, std::string>>();
  d.seed = j.at("seed").get<std::uint64_t>();
  d.surface = j.at("surface");
  d.umbilics = j.at("umbilics");
  d.trajectories = j.at("trajectories");
  d.cycles = j.at("cycles");
  d.connections = j.at("connections");
  d.rotation = j.at("rotation");
  d.strata = j.at("strata");
  d.stability = j.at("stability");
  d.summary = j.at("summary");
  const json& t = j.at("timing_seconds");
  d.timing_seconds = t.is_null() ? std::nullopt : std::optional<double>(t.get<double>());
}

/// Structural check of a parsed report: required keys with the right JSON
/// types. Throws ConfigError naming the first violation.
inline void validate_report(const json& j) {
  auto need = [&](const json& o, const char* key, json::value_t t, const std::string& where) {
    if (!o.is_object() || !o.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    const auto got = o.at(key).type();
    const bool ok = got == t || (t == json::value_t::number_float &&
                                 (got == json::value_t::number_integer || got == json::value_t::number_unsigned ||
                                  got == json::value_t::null)) ||
                    (t == json::value_t::number_integer && got == json::value_t::number_unsigned);
    if (!ok) throw ConfigError(where + ": key '" + key + "' has type " + o.at(key).type_name());
  };
  using V = json::value_t;
  need(j, "schema_version", V::number_integer, "report");
  if (j.at("schema_version") != kSchemaVersion) throw ConfigError("report: unsupported schema version");
  need(j, "tool_version", V::string, "report");
  need(j, "command", V::string, "report");
  need(j, "config", V::object, "report");
  for (const auto& [k, v] : j.at("config").items())
    if (!v.is_string()) throw ConfigError("report: config value '" + k + "' is not a string");
  need(j, "seed", V::number_integer, "report");
  for (const char* k : {"umbilics", "trajectories", "cycles", "connections", "rotation"}) need(j, k, V::array, "report");
  need(j, "summary", V::object, "report");
  if (!j.contains("surface") || !j.contains("strata") || !j.contains("stability") || !j.contains("timing_seconds"))
    throw ConfigError("report: missing a top-level section");
  for (const auto& u : j.at("umbilics")) {
    need(u, "id", V::number_integer, "umbilic");
    need(u, "point", V::array, "umbilic");
    need(u, "type", V::string, "umbilic");
    need(u, "index", V::number_float, "umbilic");
    need(u, "margin", V::number_float, "umbilic");
  }
  for (const auto& t : j.at("trajectories")) {
    need(t, "foliation", V::string, "trajectory");
    need(t, "termination", V::string, "trajectory");
    need(t, "length", V::number_float, "trajectory");
  }
  for (const auto& c : j.at("cycles")) {
    need(c, "foliation", V::string, "cycle");
    need(c, "verdict", V::string, "cycle");
    need(c, "period_length", V::number_float, "cycle");
  }
  for (const auto& c : j.at("connections")) {
    need(c, "from", V::number_integer, "connection");
    need(c, "to", V::number_integer, "connection");
  }
  const json& st = j.at("stability");
  if (!st.is_null()) {
    need(st, "overall", V::string, "stability");
    for (const char* k : {"condition_a", "condition_b", "condition_c", "condition_d"}) {
      need(st, k, V::object, "stability");
      need(st.at(k), "verdict", V::string, k);
    }
  }
}

inline std::string serialize(const ReportDocument& d) { return json(d).dump(2) + "\n"; }

inline ReportDocument parse_report(const std::string& text) {
  try {
    return json::parse(text).get<ReportDocument>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed report: ") + e.what());
  }
}

// Record flattening

inline json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json vec(const Vec3& p) { return json::array({num(p.x()), num(p.y()), num(p.z())}); }

inline json surface_json(const ImplicitSurface& s, const std::string& spec) {
  return json{{"spec", spec},
              {"name", s.name},
              {"diameter", num(s.diameter)},
              {"euler_characteristic", s.euler_characteristic ? json(*s.euler_characteristic) : json(nullptr)}};
}

inline json umbilic_json(const UmbilicRecord& u, std::size_t id) {
  json seps = json::array();
  for (int f = 0; f < 2; ++f) {
    json angles = json::array();
    for (const auto& sp : u.separatrices[static_cast<std::size_t>(f)]) angles.push_back(num(sp.angle));
    seps.push_back(angles);
  }
  return json{{"id", id},
              {"point", vec(u.point)},
              {"type", to_string(u.type)},
              {"margin", num(u.margin)},
              {"index", num(u.index)},
              {"winding", u.winding},
              {"monge", json{{"a", num(u.monge.a)}, {"b", num(u.monge.b)}, {"c", num(u.monge.c)}}},
              {"separatrix_status", to_string(u.separatrix_status)},
              {"separatrix_angles", seps},
              {"warning", u.warning}};
}

inline json trajectory_json(const Trajectory& t, std::size_t id) {
  json crossings = json::array();
  for (const auto& c : t.crossings)
    crossings.push_back(json{{"section", c.section_id}, {"coordinate", num(c.coordinate)}, {"arclength", num(c.arclength)}});
  return json{{"id", id},
              {"foliation", to_string(t.foliation)},
              {"start", t.points.empty() ? json(nullptr) : vec(t.start())},
              {"end", t.points.empty() ? json(nullptr) : vec(t.end())},
              {"length", num(t.length)},
              {"points", t.points.size()},
              {"termination", to_string(t.termination)},
              {"hit_umbilic", t.hit_umbilic},
              {"crossings", crossings},
              {"note", t.note}};
}

inline json cycle_json(const PrincipalCycle& c, std::size_t id) {
  return json{{"id", id},
              {"foliation", to_string(c.foliation)},
              {"anchor", vec(c.section.anchor)},
              {"period_length", num(c.period_length)},
              {"refine_residual", num(c.refine_residual)},
              {"returns_used", c.returns_used},
              {"tprime_fd", num(c.tprime_fd)},
              {"tprime_fd_err", num(c.tprime_fd_err)},
              {"integral_dH", num(c.integral_dH)},
              {"integral_dk2", num(c.integral_dk2)},
              {"tprime_integral", num(c.tprime_integral)},
              {"tprime_integral_err", num(c.tprime_integral_err)},
              {"sign_branch", c.sign_branch},
              {"min_gap", num(c.min_gap)},
              {"verdict", to_string(c.verdict)},
              {"note", c.note}};
}

inline json connection_json(const Connection& c) {
  return json{{"from", c.from},
              {"to", c.to},
              {"foliation", to_string(c.foliation)},
              {"arrival_misalignment", num(c.arrival_misalignment)},
              {"length", num(c.length)}};
}

inline json rotation_json(const catalog::RotationEstimate& r) {
  return json{{"section_id", r.section_id},
              {"foliation", to_string(r.foliation)},
              {"mean", num(r.mean)},
              {"dispersion", num(r.dispersion)},
              {"period", num(r.period)},
              {"crossings", r.crossings},
              {"second_return", r.second_return}};
}

inline json rotation_row_json(const catalog::RotationRow& r) {
  return json{{"rho", num(r.rho)},
              {"mean", num(r.mean)},
              {"dispersion", num(r.dispersion)},
              {"crossings", r.crossings},
              {"status", r.status}};
}

inline json stratum_json(const catalog::Stratum& s) {
  return json{{"tag", to_string(s.tag)},
              {"eigenvalues", json::array({num(s.eigenvalues[0]), num(s.eigenvalues[1]), num(s.eigenvalues[2])})},
              {"multiplicity", s.multiplicity},
              {"center", vec(s.center)},
              {"margin", num(s.margin)},
              {"note", s.note}};
}

inline json condition_json(const catalog::ConditionReport& c) {
  return json{{"verdict", to_string(c.verdict)},
              {"summary", c.summary},
              {"witnesses", c.witnesses},
              {"detail", c.detail}};
}

inline json stability_json(const catalog::StabilityReport& r) {
  return json{{"overall", to_string(r.overall)},
              {"condition_a", condition_json(r.a)},
              {"condition_b", condition_json(r.b)},
              {"condition_c", condition_json(r.c)},
              {"condition_d", condition_json(r.d)},
              {"witnesses", r.witnesses},
              {"caveat", r.caveat}};
}

}  // namespace principal::io
