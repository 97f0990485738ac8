#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "principal/catalog/surfaces.hpp"
#include "principal/umbilics.hpp"

using namespace principal;
using std::numbers::pi;

namespace {

// Closed-form umbilics of x^2/a^2 + y^2/b^2 + z^2/c^2 = 1, a > b > c.
std::vector<Vec3> ellipsoid_umbilics(double a, double b, double c) {
  const double x = a * std::sqrt((a * a - b * b) / (a * a - c * c));
  const double z = c * std::sqrt((b * b - c * c) / (a * a - c * c));
  return {Vec3(-x, 0, -z), Vec3(-x, 0, z), Vec3(x, 0, -z), Vec3(x, 0, z)};
}

// Ellipsoid moved by a rotation, a translation and a uniform scale.
ImplicitSurface moved_ellipsoid(double a, double b, double c, const Mat3& R, const Vec3& t, double scale) {
  auto f = [=](const auto& x, const auto& y, const auto& z) {
    // back to body coordinates: q = R^T (p - t) / scale
    const auto px = x - t[0], py = y - t[1], pz = z - t[2];
    const auto X = (R(0, 0) * px + R(1, 0) * py + R(2, 0) * pz) * (1.0 / scale);
    const auto Y = (R(0, 1) * px + R(1, 1) * py + R(2, 1) * pz) * (1.0 / scale);
    const auto Z = (R(0, 2) * px + R(1, 2) * py + R(2, 2) * pz) * (1.0 / scale);
    return X * X / (a * a) + Y * Y / (b * b) + Z * Z / (c * c) - 1.0;
  };
  const Vec3 ext = Vec3::Constant(1.2 * scale * std::max({a, b, c}));
  auto s = ImplicitSurface::analytic(f, {t - ext, t + ext});
  s.diameter = 2 * scale * std::max({a, b, c});
  s.euler_characteristic = 2;
  s.sampler = {[=](double u, double v) {
                 const double lon = 2 * pi * u, lat = pi * (v - 0.5);
                 const Vec3 body(a * std::cos(lat) * std::cos(lon), b * std::cos(lat) * std::sin(lon),
                                 c * std::sin(lat));
                 return Vec3(t + scale * R * body);
               },
               true, false};
  return s;
}

}  // namespace

TEST(Classify, DefiningInequalities) {
  EXPECT_EQ(classify(4, 1, 0).type, UmbilicType::D1);
  EXPECT_EQ(classify(1.5, 1, 0).type, UmbilicType::D2);
  EXPECT_EQ(classify(0.5, 1, 0).type, UmbilicType::D3);
  EXPECT_EQ(classify(1, 0, 0).type, UmbilicType::NonTransversal);
  EXPECT_EQ(classify(1, 1, 0.3).type, UmbilicType::NonTransversal);  // a = b
}

TEST(Classify, BoundaryBands) {
  EXPECT_EQ(classify(2, 1, 0.5).type, UmbilicType::NearBoundary);  // a = 2b inside D2
  EXPECT_EQ(classify(2.25, 1, 1).type, UmbilicType::NearBoundary);  // on the parabola
  EXPECT_EQ(classify(2.25, 1, 1).nominal, UmbilicType::D2);
  const auto cl = classify(4, 1, 0);
  EXPECT_NEAR(cl.margin, std::sqrt(1.75), 1e-12);  // foot of the parabola at t^2 = 3/2
  EXPECT_EQ(umbilic_index(UmbilicType::D1), 0.5);
  EXPECT_EQ(umbilic_index(UmbilicType::D2), 0.5);
  EXPECT_EQ(umbilic_index(UmbilicType::D3), -0.5);
}

TEST(Classify, ParabolaDistanceMatchesDenseSearch) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> ux(-1, 6), uy(-2, 2);
  for (int i = 0; i < 200; ++i) {
    const double X = ux(gen), y = uy(gen);
    double best = 1e300;
    for (int k = -40000; k <= 40000; ++k) {
      const double t = k * 1e-4;
      best = std::min(best, std::hypot(X - t * t - 2, y - t));
    }
    best = std::min({best, std::abs(X - 1), std::abs(X - 2)});
    EXPECT_NEAR(classify(X, 1.0, 2 * y).margin, best, 1e-6);
  }
}

TEST(MongeForm, SyntheticGraphAtOrigin) {
  const auto s = catalog::monge_graph(1, 4, 1, 0);
  const auto m = monge_form(s, Vec3::Zero());
  EXPECT_NEAR(m.k, 1, 1e-13);
  EXPECT_NEAR(m.a, 4, 1e-12);
  EXPECT_NEAR(m.b, 1, 1e-12);
  EXPECT_NEAR(m.c, 0, 1e-12);
  EXPECT_EQ(m.rotation, 0.0);
  EXPECT_EQ(classify(m).type, UmbilicType::D1);
}

TEST(MongeForm, RotationInvariance) {
  const double rot = 17 * pi / 180;
  const auto s = catalog::monge_graph(1, 4, 1, 0, rot);
  const auto m = monge_form(s, Vec3::Zero());
  EXPECT_LT(std::abs(m.residual_x2y), 1e-9 * 4);
  // the only other choice is the half-turn, which negates the cubic
  const double sg = m.a > 0 ? 1 : -1;
  EXPECT_NEAR(sg * m.a, 4, 1e-10);
  EXPECT_NEAR(sg * m.b, 1, 1e-10);
  EXPECT_NEAR(sg * m.c, 0, 1e-10);
  EXPECT_NEAR(m.rotation, rot, 1e-12);
  EXPECT_EQ(classify(m).type, UmbilicType::D1);
}

TEST(MongeForm, KillsMixedTerm) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 50; ++i) {
    const double a = u(gen), b = u(gen), c = u(gen), d = u(gen);
    const auto s = catalog::monge_graph(0.7, a, b, c, 0.0, d);
    const auto m = monge_form(s, Vec3::Zero());
    const double sc = std::max({std::abs(m.a), std::abs(m.b), std::abs(m.c), 1.0});
    EXPECT_LT(std::abs(m.residual_x2y), 1e-9 * sc);
    EXPECT_GE(m.rotation, 0.0);
    EXPECT_LT(m.rotation, pi);
    // smallest root: no sign change of the x^2y coefficient before it
    detail::Cubic cub{a, d, b, c};
    const double q0 = cub.x2y(0.0);
    for (int k = 1; k < 200; ++k) {
      const double phi = m.rotation * k / 200;
      EXPECT_GT(q0 * cub.x2y(phi), 0.0);
    }
  }
}

TEST(MongeForm, RoundTripRecoversTypeOnGrid) {
  int checked = 0;
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) {
      const double X = -1 + 6.0 * i / 11, y = -2 + 4.0 * j / 11;
      const double b = 0.8, a = X * b, c = 2 * b * y;
      const auto direct = classify(a, b, c);
      if (!is_darbouxian(direct.type) || direct.margin < 0.05) continue;
      const auto s = catalog::monge_graph(1.3, a, b, c, 0.4 + 0.1 * i);
      const auto m = monge_form(s, Vec3::Zero());
      EXPECT_EQ(classify(m).type, direct.type) << X << " " << y;
      ++checked;
    }
  EXPECT_GT(checked, 80);
}

TEST(Umbilics, TriaxialEllipsoidClosedForm) {
  const auto s = catalog::ellipsoid(3, 2, 1);
  const auto res = find_umbilics(s);
  ASSERT_FALSE(res.all_umbilic);
  ASSERT_EQ(res.umbilics.size(), 4u);
  const auto expected = ellipsoid_umbilics(3, 2, 1);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_LT((res.umbilics[i].point - expected[i]).norm(), 1e-8);
    EXPECT_EQ(res.umbilics[i].type, UmbilicType::D1);
    EXPECT_EQ(res.umbilics[i].index, 0.5);
    EXPECT_EQ(res.umbilics[i].winding, 1);
    EXPECT_GT(res.umbilics[i].monge.k, 0.0);
  }
  const auto sum = index_sum_check(s, res.umbilics);
  EXPECT_EQ(sum.sum, 2.0);
  EXPECT_TRUE(sum.consistent);
}

TEST(Umbilics, SphereIsAllUmbilic) {
  const auto res = find_umbilics(catalog::sphere(1.5));
  EXPECT_TRUE(res.all_umbilic);
  EXPECT_TRUE(res.umbilics.empty());
}

TEST(Umbilics, TorusHasNone) {
  const auto s = catalog::torus(2, 1);
  const auto res = find_umbilics(s);
  EXPECT_FALSE(res.all_umbilic);
  EXPECT_TRUE(res.umbilics.empty());
  const auto sum = index_sum_check(s, res.umbilics);
  EXPECT_EQ(sum.sum, 0.0);
  EXPECT_TRUE(sum.consistent);
}

TEST(Umbilics, MongeReconstructionIsFourthOrder) {
  const auto s = catalog::ellipsoid(3, 2, 1);
  const auto m = monge_form(s, ellipsoid_umbilics(3, 2, 1)[3]);
  EXPECT_LT(m.quadratic_residual, 1e-9);
  auto max_err = [&](double rho) {
    double e = 0;
    for (int i = 0; i < 64; ++i) {
      const double al = 2 * pi * i / 64;
      const Vec3 q = m.point(rho * std::cos(al), rho * std::sin(al));
      const Local2 l = s.local2(q);
      e = std::max(e, std::abs(l.value) / l.grad.norm());
    }
    return e;
  };
  const double e1 = max_err(2e-2), e2 = max_err(1e-2), e3 = max_err(5e-3);
  const double slope = std::log(e1 / e3) / std::log(4.0);
  EXPECT_GE(slope, 3.8);
  EXPECT_GT(e1 / e2, 12.0);
}

TEST(Umbilics, ClassificationInvariantUnderRigidMotionAndScale) {
  const auto base = find_umbilics(catalog::ellipsoid(3, 2, 1));
  ASSERT_EQ(base.umbilics.size(), 4u);
  const double X0 = base.umbilics[0].monge.a / base.umbilics[0].monge.b;
  const double Y0 = base.umbilics[0].monge.c / (2 * base.umbilics[0].monge.b);
  const Mat3 R = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  const auto s = moved_ellipsoid(3, 2, 1, R, Vec3(0.3, -0.2, 0.5), 1.7);
  const auto res = find_umbilics(s);
  ASSERT_EQ(res.umbilics.size(), 4u);
  for (const auto& u : res.umbilics) {
    EXPECT_EQ(u.type, UmbilicType::D1);
    EXPECT_NEAR(u.monge.a / u.monge.b, X0, 1e-6);
    EXPECT_NEAR(std::abs(u.monge.c / (2 * u.monge.b)), std::abs(Y0), 1e-6);
    EXPECT_NEAR(u.monge.k * 1.7, base.umbilics[0].monge.k, 1e-8);
  }
}

TEST(Umbilics, WindingMatchesIndexOnSyntheticGraphs) {
  struct Case {
    double a, b, c;
    UmbilicType t;
  };
  for (const Case& cs : {Case{4, 1, 0, UmbilicType::D1}, Case{1.5, 1, 0.3, UmbilicType::D2},
                         Case{0.5, 1, 0, UmbilicType::D3}}) {
    const auto s = catalog::monge_graph(1, cs.a, cs.b, cs.c);
    UmbilicRecord rec;
    rec.point = Vec3::Zero();
    characterize(s, rec);
    EXPECT_EQ(rec.type, cs.t);
    EXPECT_EQ(rec.winding, static_cast<int>(2 * umbilic_index(cs.t)));
  }
}
