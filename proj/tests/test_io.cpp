#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "principal/catalog/surfaces.hpp"
#include "principal/io/commands.hpp"

using namespace principal;
using namespace principal::io;

namespace {

RunConfig make(const std::string& command, std::map<std::string, std::string> kv) {
  RunConfig c;
  c.command = command;
  c.values = std::move(kv);
  return c;
}

int count_of(const std::string& hay, const std::string& needle) {
  int n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST(Config, ParsesKeyValueText) {
  const auto m = parse_config_text(
      "# a comment\n"
      "surface = ellipsoid:3,2,1   # trailing\n"
      "\n"
      "seed=7\n"
      "seed = 9\n");
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m.at("surface"), "ellipsoid:3,2,1");
  EXPECT_EQ(m.at("seed"), "9");
}

TEST(Config, RejectsMalformedLines) {
  EXPECT_THROW(parse_config_text("surface ellipsoid\n"), ConfigError);
  EXPECT_THROW(parse_config_text(" = 3\n"), ConfigError);
  EXPECT_THROW(parse_config_text("bad-key = 3\n"), ConfigError);
  EXPECT_THROW(read_config_file("/nonexistent/principal.cfg"), ConfigError);
}

TEST(Config, TypedAccessorsValidate) {
  const auto c = make("trace", {{"a", "1/4"}, {"b", "x"}, {"n", "2.5"}, {"f", "maybe"}, {"p", "1,2"}, {"seed", "-1"}});
  EXPECT_DOUBLE_EQ(c.num("a", 0), 0.25);
  EXPECT_THROW(c.num("b", 0), ConfigError);
  EXPECT_THROW(c.count("n", 0), ConfigError);
  EXPECT_THROW(c.flag("f"), ConfigError);
  EXPECT_THROW(c.point("p"), ConfigError);
  EXPECT_THROW(c.seed(), ConfigError);
  EXPECT_EQ(c.count("missing", 5), 5);
  EXPECT_TRUE(c.flag("missing", true));
}

TEST(Commands, UnknownKeyAndMissingSurfaceAreConfigErrors) {
  EXPECT_THROW(cmd_umbilics(make("umbilics", {{"surface", "sphere"}, {"grdi", "3"}})), ConfigError);
  EXPECT_THROW(cmd_trace(make("trace", {})), ConfigError);
  EXPECT_THROW(cmd_strata(make("strata", {})), ConfigError);
  EXPECT_THROW(run_command(make("frobnicate", {})), ConfigError);
  EXPECT_THROW(cmd_umbilics(make("umbilics", {{"surface", "ellipsoid:3,2,1,9"}})), ParamError);
}

TEST(Report, RoundTripsThroughText) {
  const auto out = cmd_umbilics(make("umbilics", {{"surface", "ellipsoid:3,2,1"}, {"seed", "4"}}));
  const std::string text = serialize(out.report);
  const ReportDocument back = parse_report(text);
  EXPECT_EQ(serialize(back), text);
  EXPECT_EQ(back.seed, 4u);
  EXPECT_EQ(back.config.at("surface"), "ellipsoid:3,2,1");
  EXPECT_FALSE(back.timing_seconds.has_value());
  EXPECT_NO_THROW(validate_report(json::parse(text)));
}

TEST(Report, SchemaViolationsAreCaught) {
  const auto out = cmd_strata(make("strata", {{"quadric", "diag:1/9,1/4,1"}}));
  json j = out.report;
  EXPECT_NO_THROW(validate_report(j));
  json missing = j;
  missing.erase("umbilics");
  EXPECT_THROW(validate_report(missing), ConfigError);
  json wrong_type = j;
  wrong_type["seed"] = "zero";
  EXPECT_THROW(validate_report(wrong_type), ConfigError);
  json future = j;
  future["schema_version"] = kSchemaVersion + 1;
  EXPECT_THROW(validate_report(future), ConfigError);
  EXPECT_THROW(parse_report(future.dump()), ConfigError);
  EXPECT_THROW(parse_report("{not json"), ConfigError);
}

TEST(Report, TimingOnlyWhenAsked) {
  const auto out = cmd_strata(make("strata", {{"quadric", "diag:1,2,3"}, {"timing", "true"}}));
  ASSERT_TRUE(out.report.timing_seconds.has_value());
  EXPECT_GE(*out.report.timing_seconds, 0.0);
  EXPECT_EQ(out.report.config.count("timing"), 0u);
}

TEST(Csv, FixedColumnsAndArclength) {
  const auto s = catalog::ellipsoid(3, 2, 1);
  TraceOptions t;
  t.max_length = 1.0;
  const std::vector<Trajectory> ts{trace(s, s.project(Vec3(1, 1, 0.5)), FoliationId::Minimal, t),
                                   trace(s, s.project(Vec3(1, 1, 0.5)), FoliationId::Maximal, t)};
  const std::string csv = polylines_csv(ts);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x,y,z,arclength,foliation_id");
  std::size_t rows = 0;
  int prev_fol = 0;
  double prev_s = -1;
  while (std::getline(in, line)) {
    double x, y, z, arc;
    int f;
    ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%d", &x, &y, &z, &arc, &f), 5) << line;
    EXPECT_NEAR(s.value(Vec3(x, y, z)), 0.0, 1e-7);
    if (f == prev_fol) EXPECT_GE(arc, prev_s);
    prev_fol = f;
    prev_s = arc;
    ++rows;
  }
  EXPECT_EQ(rows, ts[0].points.size() + ts[1].points.size());
  EXPECT_EQ(prev_fol, 1);
}

TEST(Svg, GlyphOnlyScene) {
  const auto found = find_umbilics(catalog::ellipsoid(3, 2, 1));
  const std::string svg = render_svg({}, found.umbilics);
  EXPECT_EQ(count_of(svg, "<polyline"), 0);
  EXPECT_EQ(count_of(svg, "class=\"umbilic\""), 4);
  EXPECT_EQ(count_of(svg, ">u3 D1<"), 1);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_EQ(svg.substr(svg.size() - 7), "</svg>\n");
}

TEST(Svg, EllipsoidConfigurationIsDeterministic) {
  const auto cfg = make("umbilics", {{"surface", "ellipsoid:3,2,1"}});
  const auto a = cmd_umbilics(cfg);
  const auto b = cmd_umbilics(cfg);
  EXPECT_EQ(a.svg, b.svg);
  EXPECT_EQ(serialize(a.report), serialize(b.report));
  EXPECT_EQ(count_of(a.svg, "class=\"umbilic\""), 4);
  EXPECT_GT(count_of(a.svg, "emph"), 4);  // separatrix strokes
  EXPECT_GT(count_of(a.svg, "class=\"minimal\""), 0);
  EXPECT_GT(count_of(a.svg, "class=\"maximal\""), 0);
  EXPECT_EQ(count_of(a.svg, "-0.00"), 0);
}

TEST(Svg, HiddenSideIsSuppressed) {
  const auto s = catalog::sphere(1);
  Stroke back{{Vec3(0, 1, 0), Vec3(0.1, 0.99498743710662, 0)}, FoliationId::Minimal, false};
  Stroke front{{Vec3(0, -1, 0), Vec3(0.1, -0.99498743710662, 0)}, FoliationId::Maximal, false};
  UmbilicRecord u;
  u.point = Vec3(0, 1, 0);
  u.type = UmbilicType::D2;
  const std::string svg = render_svg({back, front}, {u}, View{}, &s);
  EXPECT_EQ(count_of(svg, "<polyline"), 1);
  EXPECT_EQ(count_of(svg, "class=\"maximal\""), 1);
  EXPECT_EQ(count_of(svg, "back\""), 1);
  // without the surface both strokes are drawn
  EXPECT_EQ(count_of(render_svg({back, front}, {u}), "<polyline"), 2);
}

TEST(Svg, ViewParsing) {
  EXPECT_TRUE(view_from("+y").axis.isApprox(Vec3::UnitY()));
  EXPECT_TRUE(view_from("-x").axis.isApprox(-Vec3::UnitX()));
  EXPECT_TRUE(view_from("1,1,0").axis.isApprox(Vec3(1, 1, 0).normalized()));
  EXPECT_TRUE(view_from("+z").up.isApprox(Vec3::UnitY()));
  EXPECT_THROW(view_from("0,0,0"), ParamError);
  EXPECT_THROW(view_from("sideways"), ParamError);
}

TEST(Commands, UmbilicExamples) {
  const auto e = cmd_umbilics(make("umbilics", {{"surface", "ellipsoid:3,2,1"}}));
  EXPECT_EQ(e.report.umbilics.size(), 4u);
  EXPECT_NEAR(e.report.summary.at("index_sum").get<double>(), 2.0, 1e-12);
  EXPECT_EQ(e.report.connections.size(), 4u);
  const auto t = cmd_umbilics(make("umbilics", {{"surface", "torus:2,1"}}));
  EXPECT_EQ(t.report.umbilics.size(), 0u);
  const auto s = cmd_umbilics(make("umbilics", {{"surface", "sphere:1"}}));
  EXPECT_EQ(s.report.summary.at("marker"), "AllUmbilicSurface");
  EXPECT_EQ(s.summary, "AllUmbilicSurface");
}

TEST(Commands, StrataAndRotationExamples) {
  const auto q = cmd_strata(make("strata", {{"quadric", "diag:1/9,1/4,1"}}));
  EXPECT_EQ(q.report.strata.at("tag"), "E3_triaxial");
  const auto r = cmd_rotation(make("rotation", {{"surface", "E_theta:0.3"}, {"section", "equator"}}));
  ASSERT_EQ(r.report.rotation.size(), 1u);
  EXPECT_NEAR(r.report.rotation[0].at("mean").get<double>(), 0.6, 0.01);
  EXPECT_FALSE(r.svg.empty());
  EXPECT_THROW(cmd_rotation(make("rotation", {{"surface", "E_theta:0.3"}, {"section", "diagonal"}})), ConfigError);
  EXPECT_THROW(cmd_rotation(make("rotation", {{"surface", "sphere"}})), ReturnFailure);
}

TEST(Commands, RhoSweepNeedsSRho) {
  const auto r = cmd_rotation(make("rotation", {{"surface", "S_rho"}, {"rho", "0,0.1"}, {"seeds", "2"}}));
  ASSERT_EQ(r.report.rotation.size(), 2u);
  EXPECT_EQ(r.report.rotation[0].at("status"), "ok");
  EXPECT_THROW(cmd_rotation(make("rotation", {{"surface", "ellipsoid"}, {"rho", "0"}})), ConfigError);
}

TEST(Commands, StabilityExample) {
  const auto r = cmd_stability(make("stability", {{"surface", "ellipsoid:3,2,1"}}));
  EXPECT_EQ(r.report.stability.at("overall"), "FailWitness");
  EXPECT_EQ(r.report.stability.at("condition_c").at("verdict"), "Fail");
  EXPECT_NE(r.summary.find("FailWitness(condition"), std::string::npos);
  EXPECT_NE(r.report.summary.at("failed_conditions").get<std::string>().find('c'), std::string::npos);
  EXPECT_NO_THROW(validate_report(json(r.report)));
}

TEST(Commands, TraceAndCycles) {
  const auto t = cmd_trace(make("trace", {{"surface", "ellipsoid:3,2,1"}, {"start", "1,1,0.5"}, {"length", "5"}}));
  ASSERT_EQ(t.report.trajectories.size(), 2u);
  EXPECT_EQ(t.report.trajectories[0].at("termination"), "Closed");
  EXPECT_EQ(t.report.trajectories[1].at("termination"), "Closed");
  EXPECT_EQ(t.csv.rfind("x,y,z,arclength,foliation_id\n", 0), 0u);
  const auto c = cmd_cycles(make("cycles", {{"surface", "torus:2,1"}, {"seeds", "2"}}));
  ASSERT_FALSE(c.report.cycles.empty());
  for (const auto& cy : c.report.cycles) EXPECT_EQ(cy.at("verdict"), "NearUnity");
}
