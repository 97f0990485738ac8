#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "principal/catalog/surfaces.hpp"
#include "principal/curvature.hpp"

using namespace principal;
using std::numbers::pi;

namespace {

// Normal curvature of direction w (chart coordinates) as the ratio of forms.
double forms_ratio(const FundamentalForms& ff, const Vec2& w) { return ff.second(w, w) / ff.first(w, w); }

}  // namespace

TEST(FundamentalForms, UnitSphereEquator) {
  auto chart = catalog::sphere_chart(1.0);
  const auto ff = fundamental_forms(chart, 0.3, 0.0);
  EXPECT_NEAR(ff.E, 1.0, 1e-15);
  EXPECT_NEAR(ff.F, 0.0, 1e-15);
  EXPECT_NEAR(ff.G, 1.0, 1e-15);
  EXPECT_NEAR(ff.e, -1.0, 1e-15);  // outward normal
  EXPECT_NEAR(ff.f, 0.0, 1e-15);
  EXPECT_NEAR(ff.g, -1.0, 1e-15);
  chart.orientation = Orientation::Negative;
  const auto inward = fundamental_forms(chart, 0.3, 0.0);
  EXPECT_NEAR(inward.e, 1.0, 1e-15);
  EXPECT_NEAR(inward.g, 1.0, 1e-15);
}

TEST(FundamentalForms, PlaneHasZeroSecondForm) {
  const auto ff = fundamental_forms(catalog::plane_chart(), 0.2, -0.4);
  EXPECT_EQ(ff.e, 0.0);
  EXPECT_EQ(ff.f, 0.0);
  EXPECT_EQ(ff.g, 0.0);
}

TEST(FundamentalForms, ParaboloidVertex) {
  const auto ff = fundamental_forms(catalog::monge_graph_chart(1.0, 0, 0, 0), 0.0, 0.0);
  EXPECT_DOUBLE_EQ(ff.E, 1.0);
  EXPECT_DOUBLE_EQ(ff.G, 1.0);
  EXPECT_DOUBLE_EQ(ff.F, 0.0);
  EXPECT_DOUBLE_EQ(ff.e, 1.0);
  EXPECT_DOUBLE_EQ(ff.g, 1.0);
  EXPECT_DOUBLE_EQ(ff.f, 0.0);
}

TEST(FundamentalForms, SingularChartPointIsRejected) {
  // The pole of the spherical chart is not an immersion point.
  EXPECT_THROW(fundamental_forms(catalog::sphere_chart(1.0), 0.0, pi / 2), RegularityError);
}

TEST(PrincipalData, SphereIsUmbilicEverywhere) {
  auto chart = catalog::sphere_chart(2.0);
  chart.orientation = Orientation::Negative;
  const auto pd = principal_data(chart, 1.1, 0.4);
  EXPECT_NEAR(pd.k1, 0.5, 1e-14);
  EXPECT_NEAR(pd.k2, 0.5, 1e-14);
  EXPECT_FALSE(pd.directions_defined);
  EXPECT_THROW(normal_curvature(pd, 0.3), UmbilicReferenceError);
}

TEST(PrincipalData, CylinderAxisCarriesZeroCurvature) {
  const double r = 0.5;
  auto chart = catalog::cylinder_chart(r);
  chart.orientation = Orientation::Negative;
  const auto pd = principal_data(chart, 0.7, 0.1);
  EXPECT_NEAR(pd.k1, 0.0, 1e-14);
  EXPECT_NEAR(pd.k2, 1.0 / r, 1e-14);
  EXPECT_NEAR(std::abs(pd.d1.dot(Vec3::UnitZ())), 1.0, 1e-14);
}

TEST(PrincipalData, EllipsoidAxisPointMatchesThetaScan) {
  auto chart = catalog::ellipsoid_chart(3, 2, 1);
  chart.orientation = Orientation::Negative;
  const auto ff = fundamental_forms(chart, 0.0, 0.0);
  const auto pd = principal_data(ff);
  // Symmetry planes: the directions are the y and z axes.
  EXPECT_NEAR(std::abs(pd.d1.dot(Vec3::UnitY())), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(pd.d2.dot(Vec3::UnitZ())), 1.0, 1e-12);
  // Oracle: extremes of the forms ratio over a dense direction scan.
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < 36000; ++i) {
    const double t = pi * i / 36000.0;
    const double k = forms_ratio(ff, Vec2(std::cos(t), std::sin(t)));
    lo = std::min(lo, k);
    hi = std::max(hi, k);
  }
  EXPECT_NEAR(pd.k1, lo, 1e-8);
  EXPECT_NEAR(pd.k2, hi, 1e-8);
  // Hand-computed section curvatures a/b^2 and a/c^2.
  EXPECT_NEAR(pd.k1, 0.75, 1e-13);
  EXPECT_NEAR(pd.k2, 3.0, 1e-13);
}

TEST(NormalCurvature, EulerFormulaEndpointsAndLimit) {
  PrincipalData pd;
  pd.k1 = -0.3;
  pd.k2 = 1.7;
  pd.directions_defined = true;
  EXPECT_DOUBLE_EQ(normal_curvature(pd, 0.0), -0.3);
  EXPECT_NEAR(normal_curvature(pd, pi / 2), 1.7, 1e-15);
  pd.k1 = pd.k2 = 0.8;
  for (double t : {0.0, 0.4, 1.3, 2.9}) EXPECT_NEAR(normal_curvature(pd, t), 0.8, 1e-15);
}

TEST(NormalCurvature, MatchesRatioOfFormsAtRandomPoints) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto chart = catalog::torus_chart(2.0, 0.7);
  for (int i = 0; i < 200; ++i) {
    const double u = 2 * pi * U(gen), v = 2 * pi * U(gen), t = pi * U(gen);
    const auto ff = fundamental_forms(chart, u, v);
    const auto pd = principal_data(ff);
    const Vec2 w = std::cos(t) * pd.c1 + std::sin(t) * pd.c2;
    const double oracle = forms_ratio(ff, w);
    EXPECT_NEAR(normal_curvature(pd, t), oracle, 1e-9 * std::max(1.0, std::abs(oracle)));
  }
}

TEST(PrincipalData, OrientationFlipSwapsCurvatures) {
  auto chart = catalog::ellipsoid_chart(3, 2, 1);
  auto flipped_chart = chart;
  flipped_chart.orientation = Orientation::Negative;
  for (double u : {0.2, 1.9, 4.0})
    for (double v : {-0.8, 0.1, 1.2}) {
      const auto a = principal_data(chart, u, v);
      const auto b = principal_data(flipped_chart, u, v);
      EXPECT_EQ(b.k1, -a.k2);
      EXPECT_EQ(b.k2, -a.k1);
      EXPECT_NEAR(std::abs(b.d1.dot(a.d2)), 1.0, 1e-12);
      EXPECT_NEAR(std::abs(b.d2.dot(a.d1)), 1.0, 1e-12);
    }
}

TEST(PrincipalData, InvariantsOnRandomSamples) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto chart = catalog::ellipsoid_chart(3, 2, 1);
  for (int i = 0; i < 500; ++i) {
    const double u = 2 * pi * U(gen), v = (U(gen) - 0.5) * 3.0;
    const auto ff = fundamental_forms(chart, u, v);
    const auto pd = principal_data(ff);
    EXPECT_LE(pd.k1, pd.k2);
    EXPECT_NEAR(pd.H, 0.5 * (pd.k1 + pd.k2), 1e-12 * std::abs(pd.H) + 1e-300);
    EXPECT_GE(pd.H * pd.H - pd.K, -1e-12 * pd.H * pd.H);
    if (pd.directions_defined) {
      EXPECT_LT(std::abs(ff.first(pd.c1, pd.c2)), 1e-9);
      EXPECT_LT(std::abs(pd.d1.dot(pd.d2)), 1e-9);
    }
  }
}

TEST(PrincipalData, FiniteDifferenceChartAgreesWithAnalytic) {
  auto analytic = catalog::torus_chart(2.0, 1.0);
  auto sampled = SurfaceChart::sampled([&](double u, double v) { return analytic.eval(u, v); }, analytic.domain,
                                       true, true);
  sampled.scale = analytic.scale;
  const auto pa = principal_data(analytic, 0.4, 1.1);
  const auto ps = principal_data(sampled, 0.4, 1.1);
  EXPECT_NEAR(pa.k1, ps.k1, 1e-7);
  EXPECT_NEAR(pa.k2, ps.k2, 1e-7);
  const auto a3 = analytic.partials(0.4, 1.1), s3 = sampled.partials(0.4, 1.1);
  EXPECT_LT((a3.Xuuv - s3.Xuuv).norm(), 1e-6);
  EXPECT_LT((a3.Xvvv - s3.Xvvv).norm(), 1e-6);
}

TEST(ImplicitPrincipalData, UnitSphereIsUmbilic) {
  const auto s = catalog::sphere(1.0);
  const Vec3 p = Vec3(0.3, -0.5, 0.8).normalized();
  const auto pd = implicit_principal_data(s, p);
  EXPECT_NEAR(std::abs(pd.k1), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(pd.k2), 1.0, 1e-14);
  EXPECT_FALSE(pd.directions_defined);
}

TEST(ImplicitPrincipalData, ParaboloidVertex) {
  auto s = catalog::monge_graph(1.0, 0, 0, 0);
  const auto pd = implicit_principal_data(s, Vec3::Zero());
  EXPECT_NEAR(pd.k1, 1.0, 1e-14);
  EXPECT_NEAR(pd.k2, 1.0, 1e-14);
  EXPECT_FALSE(pd.directions_defined);
}

TEST(ImplicitPrincipalData, AgreesWithChartOnEllipsoid) {
  const auto s0 = catalog::s_rho(0.0, 3.0, 2.0);  // x^2/9 + y^2/4 + z^2 = 1
  auto chart = catalog::ellipsoid_chart(3, 2, 1);
  chart.orientation = Orientation::Negative;  // inward, like the level set default
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double u = 2 * pi * U(gen), v = (U(gen) - 0.5) * 2.8;
    const auto pc = principal_data(chart, u, v);
    const auto pi_ = implicit_principal_data(s0, chart.eval(u, v));
    EXPECT_NEAR(pc.k1, pi_.k1, 1e-8);
    EXPECT_NEAR(pc.k2, pi_.k2, 1e-8);
    EXPECT_NEAR(std::abs(pc.d1.dot(pi_.d1)), 1.0, 1e-8);
  }
}

TEST(ImplicitPrincipalData, CriticalPointIsRejected) {
  // Cone x^2 + y^2 - z^2 = 0 has a critical point at its apex.
  auto cone = ImplicitSurface::analytic([](const auto& x, const auto& y, const auto& z) { return x * x + y * y - z * z; },
                                        Box{});
  EXPECT_THROW(implicit_principal_data(cone, Vec3::Zero()), CriticalPointError);
}

TEST(CurvatureRates, DirectionalDerivativeMatchesDifferences) {
  const auto s = catalog::ellipsoid(3, 2, 1);
  const Vec3 p = s.project(Vec3(1.0, 1.2, 0.5));
  const auto pd = implicit_principal_data(s, p);
  const Vec3 t = pd.d1;
  const auto r = curvature_rates(s.local3(p), s.orientation, t);
  const double h = 1e-5;
  const auto a = implicit_principal_data(s, s.project(p + h * t));
  const auto b = implicit_principal_data(s, s.project(p - h * t));
  EXPECT_NEAR(r.H, pd.H, 1e-12);
  EXPECT_NEAR(r.k2, pd.k2, 1e-12);
  EXPECT_NEAR(r.dH, (a.H - b.H) / (2 * h), 1e-6);
  EXPECT_NEAR(r.dk2, (a.k2 - b.k2) / (2 * h), 1e-6);
}
