#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "principal/catalog/surfaces.hpp"
#include "principal/separatrices.hpp"

using namespace principal;
using std::numbers::pi;

namespace {

UmbilicRecord synthetic(double a, double b, double c) {
  const auto s = catalog::monge_graph(1, a, b, c);
  UmbilicRecord rec;
  rec.point = Vec3::Zero();
  characterize(s, rec);
  separatrix_directions(s, rec);
  return rec;
}

}  // namespace

TEST(Separatrices, CountMatchesSubscript) {
  struct Case {
    double a, b, c;
    std::size_t n;
  };
  for (const Case& cs : {Case{4, 1, 0, 1}, Case{1.5, 1, 0.3, 2}, Case{0.5, 1, 0, 3}, Case{1.2, 1, 0, 2},
                         Case{3, 1, 1.5, 1}}) {
    const auto rec = synthetic(cs.a, cs.b, cs.c);
    EXPECT_EQ(rec.separatrix_status, SeparatrixStatus::Converged) << cs.a << " " << cs.c;
    for (const auto& fol : rec.separatrices) EXPECT_EQ(fol.size(), cs.n) << cs.a << " " << cs.c;
  }
}

TEST(Separatrices, D3DirectionsMatchBruteForceScan) {
  const auto s = catalog::monge_graph(1, 0.5, 1, 0);
  const auto rec = synthetic(0.5, 1, 0);
  ASSERT_EQ(rec.type, UmbilicType::D3);
  const double r0 = 1e-3 * s.diameter;
  const detail::Local L{s, rec.monge, r0, 5 * r0, 0.1 * r0};
  for (int f = 0; f < 2; ++f) {
    const auto fol = static_cast<FoliationId>(f);
    const auto& found = rec.separatrices[static_cast<std::size_t>(f)];
    ASSERT_EQ(found.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = i + 1; j < 3; ++j)
        EXPECT_GT(detail::circ_dist(found[i].angle, found[j].angle), 20 * pi / 180);
    // fate changes on a 0.1 degree grid
    const int n = 3600;
    std::vector<double> changes;
    detail::Fate prev = detail::fate(L, fol, 0.0);
    for (int i = 1; i <= n; ++i) {
      const double al = 2 * pi * i / n;
      const detail::Fate cur = detail::fate(L, fol, al);
      if (cur.hits > 0 || detail::fate_changed(prev, cur, 0.5)) changes.push_back(al - pi / n);
      prev = cur;
    }
    for (const auto& sp : found) {
      double best = 1e9;
      for (double c : changes) best = std::min(best, detail::circ_dist(c, sp.angle));
      EXPECT_LT(best, 0.2 * pi / 180) << sp.angle;
    }
  }
}

TEST(Separatrices, EllipsoidSeparatricesLieInSymmetryPlane) {
  const auto s = catalog::ellipsoid(3, 2, 1);
  auto res = find_umbilics(s);
  ASSERT_EQ(res.umbilics.size(), 4u);
  for (auto& u : res.umbilics) {
    separatrix_directions(s, u);
    EXPECT_EQ(u.separatrix_status, SeparatrixStatus::Converged);
    for (const auto& fol : u.separatrices) {
      ASSERT_EQ(fol.size(), 1u);
      const Vec3 t = u.monge.tangent(fol[0].angle);
      EXPECT_LT(std::abs(t.y()), 1e-3);
    }
  }
}

TEST(Separatrices, NonDarbouxianIsSkipped) {
  UmbilicRecord rec;
  rec.type = UmbilicType::NonTransversal;
  separatrix_directions(catalog::sphere(1), rec);
  EXPECT_EQ(rec.separatrix_status, SeparatrixStatus::Failed);
  EXPECT_TRUE(rec.separatrices[0].empty());
  EXPECT_FALSE(rec.warning.empty());
}

TEST(Connections, EllipsoidFourConnectionPattern) {
  const auto s = catalog::ellipsoid(3, 2, 1);
  auto res = find_umbilics(s);
  for (auto& u : res.umbilics) separatrix_directions(s, u);
  const auto scan = separatrix_connection_scan(s, res.umbilics);
  ASSERT_EQ(scan.connections.size(), 4u);
  int per_umbilic[4] = {0, 0, 0, 0};
  for (const auto& c : scan.connections) {
    EXPECT_NE(c.from, c.to);
    ++per_umbilic[c.from];
    ++per_umbilic[c.to];
    // pairs share a sign of x or of z
    const Vec3 a = res.umbilics[static_cast<std::size_t>(c.from)].point;
    const Vec3 b = res.umbilics[static_cast<std::size_t>(c.to)].point;
    EXPECT_TRUE(a.x() * b.x() > 0 || a.z() * b.z() > 0);
    EXPECT_LT(c.arrival_misalignment, 0.5 * pi / 180);
  }
  for (int k : per_umbilic) EXPECT_EQ(k, 2);
  EXPECT_TRUE(scan.undetermined.empty());
}

TEST(Connections, TorusHasNone) {
  const auto s = catalog::torus(2, 1);
  const auto scan = separatrix_connection_scan(s, {});
  EXPECT_TRUE(scan.connections.empty());
}
