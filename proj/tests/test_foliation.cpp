#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "principal/catalog/surfaces.hpp"
#include "principal/cycles.hpp"
#include "principal/foliation.hpp"
#include "principal/umbilics.hpp"

using namespace principal;
using std::numbers::pi;

namespace {

double max_tangent_deviation(const ImplicitSurface& s, const Trajectory& t) {
  double worst = 0;
  for (std::size_t i = 1; i < t.points.size(); ++i) {
    const Vec3 seg = t.points[i] - t.points[i - 1];
    if (seg.norm() < 1e-12) continue;
    const Vec3 mid = s.project(0.5 * (t.points[i] + t.points[i - 1]));
    const auto pd = implicit_principal_data(s, mid);
    const double c = std::abs(seg.normalized().dot(pd.direction(static_cast<int>(t.foliation))));
    worst = std::max(worst, std::acos(std::min(1.0, c)));
  }
  return worst;
}

}  // namespace

TEST(Trace, TorusCirclesHaveAnalyticLength) {
  const auto s = catalog::torus(2, 1);
  const Vec3 start = s.project(Vec3(2 + std::cos(0.7), 0.3, std::sin(0.7)));
  const double rho = std::hypot(start.x(), start.y());
  const auto meridian = trace(s, start, FoliationId::Maximal);
  ASSERT_EQ(meridian.termination, Termination::Closed);
  EXPECT_NEAR(meridian.length / (2 * pi), 1.0, 1e-6);
  const auto parallel = trace(s, start, FoliationId::Minimal);
  ASSERT_EQ(parallel.termination, Termination::Closed);
  EXPECT_NEAR(parallel.length / (2 * pi * rho), 1.0, 1e-6);
}

TEST(Trace, EllipsoidGenericLineCloses) {
  const auto s = catalog::ellipsoid(3, 2, 1);
  for (auto fol : {FoliationId::Minimal, FoliationId::Maximal}) {
    const auto t = trace(s, s.project(Vec3(1, 1.5, 0.5)), fol);
    EXPECT_EQ(t.termination, Termination::Closed) << to_string(fol);
    EXPECT_LT((t.end() - t.start()).norm(), 1e-6 * s.diameter);
    EXPECT_GT(std::abs(t.tangents.back().dot(t.tangents.front())), std::cos(0.5 * pi / 180));
  }
}

TEST(Trace, EllipsoidSeparatrixHitsUmbilic) {
  const auto s = catalog::ellipsoid(3, 2, 1);
  const auto ums = find_umbilics(s);
  ASSERT_EQ(ums.umbilics.size(), 4u);
  TraceOptions o;
  for (const auto& u : ums.umbilics) o.umbilics.push_back(u.point);
  // the y = 0 section of the ellipsoid between two umbilics lies on separatrices
  const Vec3 mid = s.project(Vec3(0, 0, 1));
  int hits = 0;
  for (auto fol : {FoliationId::Minimal, FoliationId::Maximal}) {
    const auto t = trace(s, mid, fol, o);
    if (t.termination == Termination::HitUmbilic) {
      ++hits;
      EXPECT_GE(t.hit_umbilic, 0);
      EXPECT_LT(t.length, 10.0);
    }
  }
  EXPECT_EQ(hits, 1);
}

TEST(Trace, TangentStaysOnTheLineField) {
  const auto s = catalog::ellipsoid(3, 2, 1);
  TraceOptions o;
  for (auto fol : {FoliationId::Minimal, FoliationId::Maximal}) {
    const auto t = trace(s, s.project(Vec3(-0.4, 1.2, 0.7)), fol, o);
    EXPECT_LT(max_tangent_deviation(s, t), o.angle_tol);
    for (std::size_t i = 1; i < t.points.size(); ++i)
      EXPECT_LE((t.points[i] - t.points[i - 1]).norm(), o.max_step * s.diameter * (1 + 1e-9));
  }
}

TEST(Trace, ReversalGivesTheSameCurve) {
  const auto s = catalog::ellipsoid(3, 2, 1);
  const Vec3 p = s.project(Vec3(1, 1.5, 0.5));
  TraceOptions fw, bw;
  fw.detect_closure = bw.detect_closure = false;
  fw.max_length = bw.max_length = 0.5;
  bw.initial_sign = -1;
  const auto a = trace(s, p, FoliationId::Maximal, fw);
  const auto b = trace(s, p, FoliationId::Maximal, bw);
  EXPECT_LT(a.tangents.front().dot(b.tangents.front()), -0.999);
  // walk a backward from its end point: it retraces b
  TraceOptions back = fw;
  back.initial_direction = -a.tangents.back();
  const auto r = trace(s, a.end(), FoliationId::Maximal, back);
  EXPECT_LT((r.end() - p).norm(), 1e-6 * s.diameter);
  double worst = 0;
  for (const auto& q : b.points) worst = std::max(worst, polyline_distance(r.points, q));
  EXPECT_GT(worst, 0.1);  // b went the other way
  double back_on_a = 0;
  for (const auto& q : r.points) back_on_a = std::max(back_on_a, polyline_distance(a.points, q));
  EXPECT_LT(back_on_a, 1e-3);
}

TEST(Trace, FoliationsCrossAtRightAngles) {
  const auto s = catalog::ellipsoid(3, 2, 1);
  for (const Vec3& q : {Vec3(1, 1.5, 0.5), Vec3(-2, 0.4, 0.6), Vec3(0.3, -1.9, 0.2)}) {
    const Vec3 p = s.project(q);
    TraceOptions o;
    o.max_length = 0.01;
    const auto a = trace(s, p, FoliationId::Minimal, o);
    const auto b = trace(s, p, FoliationId::Maximal, o);
    const double ang = std::acos(std::abs(a.tangents.front().dot(b.tangents.front())));
    EXPECT_NEAR(ang, pi / 2, 0.5 * pi / 180);
  }
}

TEST(Trace, StepHalvingBarelyMovesClosedLength) {
  const auto s = catalog::ellipsoid(3, 2, 1);
  const Vec3 p = s.project(Vec3(1, 1.5, 0.5));
  TraceOptions o;
  const auto a = trace(s, p, FoliationId::Minimal, o);
  o.max_step /= 2;
  const auto b = trace(s, p, FoliationId::Minimal, o);
  ASSERT_EQ(a.termination, Termination::Closed);
  ASSERT_EQ(b.termination, Termination::Closed);
  EXPECT_LT(std::abs(a.length - b.length), 1e-6 * a.length);
}

TEST(Trace, SectionCrossingsOnTorusParallel) {
  const auto s = catalog::torus(2, 1);
  TraceOptions o;
  o.sections = {meridian_section(2)};
  const auto t = trace(s, s.project(Vec3(2.5, 0.3, 0.8)), FoliationId::Minimal, o);
  ASSERT_EQ(t.termination, Termination::Closed);
  ASSERT_GE(t.crossings.size(), 1u);
  for (std::size_t i = 0; i < t.crossings.size(); ++i) {
    const auto& c = t.crossings[i];
    EXPECT_GE(c.coordinate, 0.0);
    EXPECT_LT(c.coordinate, 1.0);
    if (i) EXPECT_GE(c.arclength, t.crossings[i - 1].arclength);
  }
}

TEST(Omega, HitUmbilicMapsToUmbilic) {
  Trajectory t;
  t.termination = Termination::HitUmbilic;
  t.points = {Vec3(1, 0, 0), Vec3(0.5, 0, 0)};
  const auto s = catalog::sphere(1);
  const auto v = omega_limit_classify(s, t, {Vec3(3, 0, 0), Vec3(0.5, 0, 0.001)}, {});
  EXPECT_EQ(v.kind, OmegaLimit::Umbilic);
  EXPECT_EQ(v.target, 1);
}

TEST(Omega, SpiralIntoHyperbolicCycle) {
  const auto s = catalog::perturbed_torus(2, 0.5, 0.05);
  const auto cycles = find_cycles(s, {Vec3(2.45, 0, 0.35)}, FoliationId::Minimal);
  ASSERT_EQ(cycles.size(), 1u);
  const auto& c = cycles[0];
  ASSERT_TRUE(c.hyperbolic);
  ASSERT_LT(c.tprime_fd, 1.0);  // attracting in the traced direction
  TraceOptions o;
  o.detect_closure = false;
  o.max_length = 250;
  o.initial_direction = c.section.t0;
  Section plane;
  const Vec3 a = c.section.anchor, t0 = c.section.t0;
  plane.level = [a, t0](const Vec3& p) { return (p - a).dot(t0); };
  plane.coordinate = [](const Vec3&) { return 0.0; };
  plane.accept = [a](const Vec3& p) { return (p - a).norm() < 0.3; };
  plane.direction = 1;
  o.sections = {plane};
  const auto t = trace(s, c.section.point(s, 0.02), FoliationId::Minimal, o);
  ASSERT_GT(t.crossings.size(), 40u);
  double prev = std::abs(c.section.coordinate(t.crossings[0].point));
  for (std::size_t i = 1; i < t.crossings.size(); ++i) {
    const double g = std::abs(c.section.coordinate(t.crossings[i].point));
    EXPECT_LT(g, prev);
    prev = g;
  }
  const auto v = omega_limit_classify(s, t, {}, {c.curve.points});
  EXPECT_EQ(v.kind, OmegaLimit::Cycle);
  EXPECT_EQ(v.target, 0);
}

TEST(Omega, ClosedTrajectoryIsItsOwnCycle) {
  const auto s = catalog::torus(2, 1);
  const auto t = trace(s, s.project(Vec3(3, 0, 0.1)), FoliationId::Maximal);
  EXPECT_EQ(omega_limit_classify(s, t, {}, {}).kind, OmegaLimit::Cycle);
}
